//! Exact rational linear programming.
//!
//! A dense two-phase primal simplex over [`Rat`] with simple (box) variable bounds
//! handled implicitly and Bland's smallest-index anti-cycling rule, so results are
//! exact and the chosen optimal vertex is deterministic. Problem sizes in this crate
//! are tiny (tens of variables, at most a few hundred rows), so a dense tableau is
//! the right trade-off.

use num::{Signed, Zero};

use crate::rat::{rint, Rat};
use crate::{Error, Result};

/// Row sense of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

/// A linear program `maximize c·x subject to rows, l ≤ x ≤ u`.
#[derive(Debug, Clone)]
pub struct Lp {
    n: usize,
    objective: Vec<Rat>,
    lower: Vec<Option<Rat>>,
    upper: Vec<Option<Rat>>,
    rows: Vec<(Vec<(usize, Rat)>, Rel, Rat)>,
}

/// Outcome of [`Lp::solve`].
#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal { objective: Rat, x: Vec<Rat> },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable, held at value 0.
    Free,
}

impl Lp {
    /// A program over `n` free variables with zero objective.
    pub fn new(n: usize) -> Self {
        Lp {
            n,
            objective: vec![Rat::zero(); n],
            lower: vec![None; n],
            upper: vec![None; n],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Set the maximization coefficient of variable `j`.
    pub fn set_objective(&mut self, j: usize, c: Rat) {
        self.objective[j] = c;
    }

    /// Set the box bounds of variable `j` (`None` = unbounded on that side).
    pub fn set_bounds(&mut self, j: usize, lower: Option<Rat>, upper: Option<Rat>) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    /// Add the row `Σ coeffs · x  rel  rhs`. Returns the row index.
    pub fn add_row(&mut self, coeffs: impl IntoIterator<Item = (usize, Rat)>, rel: Rel, rhs: Rat) -> usize {
        // Merge duplicate indices so the dense tableau is well defined.
        let mut dense = vec![Rat::zero(); self.n];
        for (j, c) in coeffs {
            assert!(j < self.n, "variable index out of range");
            dense[j] += c;
        }
        let sparse: Vec<(usize, Rat)> = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        self.rows.push((sparse, rel, rhs));
        self.rows.len() - 1
    }

    /// Solve exactly. Deterministic: identical inputs give identical vertices.
    pub fn solve(&self) -> Result<LpResult> {
        if self.lower.iter().zip(&self.upper).any(|(l, u)| match (l, u) {
            (Some(l), Some(u)) => l > u,
            _ => false,
        }) {
            return Ok(LpResult::Infeasible);
        }
        Tableau::build(self).solve()
    }
}

/// Dense simplex tableau: the equality system `T x = beta` over structural
/// variables, slacks and artificials, with implicit variable bounds.
struct Tableau {
    n_struct: usize,
    ncols: usize,
    t: Vec<Vec<Rat>>,
    beta: Vec<Rat>,
    lower: Vec<Option<Rat>>,
    upper: Vec<Option<Rat>>,
    status: Vec<Status>,
    /// Nonbasic value per column (meaningful only when nonbasic).
    val: Vec<Rat>,
    basis: Vec<usize>,
    first_artificial: usize,
    objective: Vec<Rat>,
}

enum Step {
    Optimal,
    Unbounded,
    Continue,
}

impl Tableau {
    fn build(lp: &Lp) -> Tableau {
        let m = lp.rows.len();

        // Initial nonbasic point: each structural variable at a finite bound
        // (free ones at 0); residual r_i = rhs − lhs decides whether the row's
        // slack can start basic or an artificial is required.
        let mut init_val = Vec::with_capacity(lp.n);
        let mut init_status = Vec::with_capacity(lp.n);
        for j in 0..lp.n {
            let (s, v) = match (&lp.lower[j], &lp.upper[j]) {
                (Some(l), _) => (Status::AtLower, l.clone()),
                (None, Some(u)) => (Status::AtUpper, u.clone()),
                (None, None) => (Status::Free, Rat::zero()),
            };
            init_status.push(s);
            init_val.push(v);
        }
        let residuals: Vec<Rat> = lp
            .rows
            .iter()
            .map(|(coeffs, _, rhs)| {
                let mut r = rhs.clone();
                for (j, c) in coeffs {
                    if !init_val[*j].is_zero() {
                        r -= c * &init_val[*j];
                    }
                }
                r
            })
            .collect();
        // A row needs an artificial when its slack cannot absorb the residual.
        let needs_art = |i: usize| -> bool {
            match lp.rows[i].1 {
                Rel::Le => residuals[i] < Rat::zero(),
                Rel::Ge => residuals[i] > Rat::zero(),
                Rel::Eq => true,
            }
        };
        let n_slack = lp.rows.iter().filter(|(_, rel, _)| *rel != Rel::Eq).count();
        let n_art = (0..m).filter(|&i| needs_art(i)).count();
        let ncols = lp.n + n_slack + n_art;
        let first_artificial = lp.n + n_slack;

        let mut t = vec![vec![Rat::zero(); ncols]; m];
        let mut beta = Vec::with_capacity(m);
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        lower.resize(ncols, Some(Rat::zero()));
        upper.resize(ncols, None);

        let mut status = init_status;
        let mut val = init_val;
        for _ in lp.n..ncols {
            status.push(Status::AtLower);
            val.push(Rat::zero());
        }

        let mut slack = lp.n;
        let mut art = first_artificial;
        let mut basis = Vec::with_capacity(m);
        for (i, (coeffs, rel, rhs)) in lp.rows.iter().enumerate() {
            for (j, c) in coeffs {
                t[i][*j] = c.clone();
            }
            let mut rhs = rhs.clone();
            let slack_col = match rel {
                Rel::Le => {
                    t[i][slack] = rint(1);
                    slack += 1;
                    Some(slack - 1)
                }
                Rel::Ge => {
                    t[i][slack] = rint(-1);
                    slack += 1;
                    Some(slack - 1)
                }
                Rel::Eq => None,
            };
            let basic = if needs_art(i) {
                // Flip the row so the artificial's coefficient is +1 with a
                // nonnegative starting value |residual|.
                if residuals[i] < Rat::zero() {
                    for c in t[i].iter_mut() {
                        *c = -c.clone();
                    }
                    rhs = -rhs;
                }
                t[i][art] = rint(1);
                art += 1;
                art - 1
            } else {
                // The slack itself starts basic; normalize its coefficient to +1.
                let sc = slack_col.expect("satisfiable row has a slack");
                if t[i][sc] < Rat::zero() {
                    for c in t[i].iter_mut() {
                        *c = -c.clone();
                    }
                    rhs = -rhs;
                }
                sc
            };
            beta.push(rhs);
            status[basic] = Status::Basic;
            basis.push(basic);
        }
        Tableau {
            n_struct: lp.n,
            ncols,
            t,
            beta,
            lower,
            upper,
            status,
            val,
            basis,
            first_artificial,
            objective: lp.objective.clone(),
        }
    }

    fn solve(mut self) -> Result<LpResult> {
        // Phase 1 (only when artificials exist): maximize −Σ artificials.
        if self.first_artificial < self.ncols {
            let mut c1 = vec![Rat::zero(); self.ncols];
            for j in self.first_artificial..self.ncols {
                c1[j] = rint(-1);
            }
            loop {
                match self.step(&c1)? {
                    Step::Optimal => break,
                    Step::Unbounded => {
                        return Err(Error::Internal(
                            "phase-1 objective cannot be unbounded".into(),
                        ))
                    }
                    Step::Continue => {}
                }
            }
        }
        let xb = self.basic_values();
        let infeas: Rat = (0..self.basis.len())
            .filter(|&i| self.basis[i] >= self.first_artificial)
            .map(|i| xb[i].clone())
            .sum();
        if !infeas.is_zero() {
            return Ok(LpResult::Infeasible);
        }
        // Pin artificials to zero and optimize the real objective.
        for j in self.first_artificial..self.ncols {
            self.upper[j] = Some(Rat::zero());
        }
        let mut c2 = vec![Rat::zero(); self.ncols];
        c2[..self.n_struct].clone_from_slice(&self.objective);
        loop {
            match self.step(&c2)? {
                Step::Optimal => break,
                Step::Unbounded => return Ok(LpResult::Unbounded),
                Step::Continue => {}
            }
        }
        let x = self.point();
        let objective = x
            .iter()
            .zip(&self.objective)
            .map(|(xi, ci)| xi * ci)
            .sum();
        Ok(LpResult::Optimal { objective, x })
    }

    /// Current value of each basic variable, from the nonbasic values.
    fn basic_values(&self) -> Vec<Rat> {
        (0..self.basis.len())
            .map(|i| {
                let mut v = self.beta[i].clone();
                for j in 0..self.ncols {
                    if self.status[j] != Status::Basic
                        && !self.t[i][j].is_zero()
                        && !self.val[j].is_zero()
                    {
                        v -= &self.t[i][j] * &self.val[j];
                    }
                }
                v
            })
            .collect()
    }

    /// Full current point over all columns.
    fn full_point(&self) -> Vec<Rat> {
        let xb = self.basic_values();
        let mut x = self.val.clone();
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = xb[i].clone();
        }
        x
    }

    fn point(&self) -> Vec<Rat> {
        let mut x = self.full_point();
        x.truncate(self.n_struct);
        x
    }

    /// One simplex iteration under objective `c` (Bland's rule throughout).
    fn step(&mut self, c: &[Rat]) -> Result<Step> {
        // Reduced costs d_j = c_j − y·T_j with y = c over the basis.
        let cb: Vec<Rat> = self.basis.iter().map(|&b| c[b].clone()).collect();
        let mut entering: Option<(usize, i8)> = None;
        for j in 0..self.ncols {
            if self.status[j] == Status::Basic {
                continue;
            }
            let mut d = c[j].clone();
            for i in 0..self.basis.len() {
                if !cb[i].is_zero() && !self.t[i][j].is_zero() {
                    d -= &cb[i] * &self.t[i][j];
                }
            }
            let dir = match self.status[j] {
                Status::AtLower if d > Rat::zero() => 1,
                Status::AtUpper if d < Rat::zero() => -1,
                Status::Free if d > Rat::zero() => 1,
                Status::Free if d < Rat::zero() => -1,
                _ => continue,
            };
            entering = Some((j, dir));
            break; // Bland: smallest improving index.
        }
        let Some((j, dir)) = entering else {
            return Ok(Step::Optimal);
        };

        // Ratio test: entering moves by t·dir, t ≥ 0; basic i moves by −T[i][j]·dir·t.
        let xb = self.basic_values();
        // Candidate limits as (t, limiting variable index, leaving row or None).
        let mut best: Option<(Rat, usize, Option<usize>)> = None;
        let mut consider = |t: Rat, var: usize, row: Option<usize>| {
            debug_assert!(t >= Rat::zero());
            match &best {
                Some((bt, bvar, _)) if *bt < t || (*bt == t && *bvar <= var) => {}
                _ => best = Some((t, var, row)),
            }
        };
        // The entering variable's own opposite bound.
        match dir {
            1 => {
                if let Some(u) = &self.upper[j] {
                    consider(u - &self.val[j], j, None);
                }
            }
            _ => {
                if let Some(l) = &self.lower[j] {
                    consider(&self.val[j] - l, j, None);
                }
            }
        }
        for i in 0..self.basis.len() {
            if self.t[i][j].is_zero() {
                continue;
            }
            let delta = -&self.t[i][j] * rint(dir as i64); // d(x_basic[i])/dt
            let b = self.basis[i];
            if delta > Rat::zero() {
                if let Some(u) = &self.upper[b] {
                    consider((u - &xb[i]) / &delta, b, Some(i));
                }
            } else if let Some(l) = &self.lower[b] {
                consider((&xb[i] - l) / delta.abs(), b, Some(i));
            }
        }
        let Some((t, _, row)) = best else {
            return Ok(Step::Unbounded);
        };

        let new_val = &self.val[j] + &t * rint(dir as i64);
        match row {
            None => {
                // Bound flip: the entering variable just moves to its other bound.
                self.val[j] = new_val;
                self.status[j] = if dir == 1 { Status::AtUpper } else { Status::AtLower };
            }
            Some(i) => {
                // Pivot: basis[i] leaves to the bound it hit, j enters.
                let leaving = self.basis[i];
                let delta_sign = -&self.t[i][j] * rint(dir as i64);
                if delta_sign > Rat::zero() {
                    self.status[leaving] = Status::AtUpper;
                    self.val[leaving] = self.upper[leaving].clone().unwrap();
                } else {
                    self.status[leaving] = Status::AtLower;
                    self.val[leaving] = self.lower[leaving].clone().unwrap();
                }
                let pivot = self.t[i][j].clone();
                for v in self.t[i].iter_mut() {
                    *v /= &pivot;
                }
                self.beta[i] /= &pivot;
                for k in 0..self.basis.len() {
                    if k == i || self.t[k][j].is_zero() {
                        continue;
                    }
                    let f = self.t[k][j].clone();
                    for col in 0..self.ncols {
                        if !self.t[i][col].is_zero() {
                            let sub = &f * &self.t[i][col];
                            self.t[k][col] -= sub;
                        }
                    }
                    let sub = &f * &self.beta[i];
                    self.beta[k] -= sub;
                }
                self.basis[i] = j;
                self.status[j] = Status::Basic;
                self.val[j] = new_val; // kept for bookkeeping; unused while basic
            }
        }
        Ok(Step::Continue)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn solve(lp: &Lp) -> LpResult {
        lp.solve().unwrap()
    }

    #[test]
    fn textbook_optimum() {
        // max 3x + 2y s.t. x + y ≤ 4, x + 3y ≤ 6, x,y ≥ 0 → (4,0), objective 12.
        let mut lp = Lp::new(2);
        lp.set_objective(0, rint(3));
        lp.set_objective(1, rint(2));
        lp.set_bounds(0, Some(rint(0)), None);
        lp.set_bounds(1, Some(rint(0)), None);
        lp.add_row([(0, rint(1)), (1, rint(1))], Rel::Le, rint(4));
        lp.add_row([(0, rint(1)), (1, rint(3))], Rel::Le, rint(6));
        assert_eq!(
            solve(&lp),
            LpResult::Optimal {
                objective: rint(12),
                x: vec![rint(4), rint(0)]
            }
        );
    }

    #[test]
    fn fractional_vertex() {
        // max x + y s.t. 2x + y ≤ 3, x + 2y ≤ 3, x,y ≥ 0 → (1,1); try a vertex at 3/2.
        let mut lp = Lp::new(2);
        lp.set_objective(0, rint(2));
        lp.set_objective(1, rint(1));
        lp.set_bounds(0, Some(rint(0)), None);
        lp.set_bounds(1, Some(rint(0)), None);
        lp.add_row([(0, rint(2)), (1, rint(1))], Rel::Le, rint(3));
        lp.add_row([(0, rint(1)), (1, rint(2))], Rel::Le, rint(3));
        let LpResult::Optimal { objective, x } = solve(&lp) else {
            panic!("expected optimal")
        };
        assert_eq!(objective, rint(3));
        // Multiple optimal vertices exist; check the returned one is one of them.
        assert!(x == vec![rat(3, 2), rint(0)] || x == vec![rint(1), rint(1)], "{x:?}");
        // Determinism: repeated solves return the identical vertex.
        assert_eq!(solve(&lp), solve(&lp));
    }

    #[test]
    fn free_variable_and_equalities() {
        // max g s.t. o + t = 0, o − t ≥ g, t ∈ [−2,2], o and g free, g ≥ 0.
        // This is the one-qubit identity-function system: optimum t = −2, g = 4.
        let mut lp = Lp::new(3); // o, t, g
        lp.set_objective(2, rint(1));
        lp.set_bounds(1, Some(rint(-2)), Some(rint(2)));
        lp.set_bounds(2, Some(rint(0)), None);
        lp.add_row([(0, rint(1)), (1, rint(1))], Rel::Eq, rint(0));
        lp.add_row([(0, rint(1)), (1, rint(-1)), (2, rint(-1))], Rel::Ge, rint(0));
        let LpResult::Optimal { objective, x } = solve(&lp) else {
            panic!("expected optimal")
        };
        assert_eq!(objective, rint(4));
        assert_eq!(x[1], rint(-2));
        assert_eq!(x[0], rint(2));
    }

    #[test]
    fn unbounded_and_infeasible() {
        let mut lp = Lp::new(1);
        lp.set_objective(0, rint(1));
        lp.set_bounds(0, Some(rint(0)), None);
        assert_eq!(solve(&lp), LpResult::Unbounded);

        let mut lp = Lp::new(1);
        lp.set_bounds(0, Some(rint(0)), Some(rint(1)));
        lp.add_row([(0, rint(1))], Rel::Ge, rint(2));
        assert_eq!(solve(&lp), LpResult::Infeasible);

        let mut lp = Lp::new(2);
        lp.add_row([(0, rint(1)), (1, rint(1))], Rel::Eq, rint(1));
        lp.add_row([(0, rint(1)), (1, rint(1))], Rel::Eq, rint(2));
        assert_eq!(solve(&lp), LpResult::Infeasible);
    }

    #[test]
    fn bound_flip_only() {
        // max x + y with x,y ∈ [−1, 1] and a slack row: optimum at the box corner.
        let mut lp = Lp::new(2);
        lp.set_objective(0, rint(1));
        lp.set_objective(1, rint(1));
        lp.set_bounds(0, Some(rint(-1)), Some(rint(1)));
        lp.set_bounds(1, Some(rint(-1)), Some(rint(1)));
        lp.add_row([(0, rint(1)), (1, rint(-1))], Rel::Le, rint(5));
        assert_eq!(
            solve(&lp),
            LpResult::Optimal {
                objective: rint(2),
                x: vec![rint(1), rint(1)]
            }
        );
    }

    #[test]
    fn degenerate_does_not_cycle() {
        // A classically degenerate LP; Bland's rule must terminate.
        let mut lp = Lp::new(4);
        for j in 0..4 {
            lp.set_bounds(j, Some(rint(0)), None);
        }
        lp.set_objective(0, rat(3, 4));
        lp.set_objective(1, rint(-150));
        lp.set_objective(2, rat(1, 50));
        lp.set_objective(3, rint(-6));
        lp.add_row(
            [(0, rat(1, 4)), (1, rint(-60)), (2, rat(-1, 25)), (3, rint(9))],
            Rel::Le,
            rint(0),
        );
        lp.add_row(
            [(0, rat(1, 2)), (1, rint(-90)), (2, rat(-1, 50)), (3, rint(3))],
            Rel::Le,
            rint(0),
        );
        lp.add_row([(2, rint(1))], Rel::Le, rint(1));
        let LpResult::Optimal { objective, .. } = solve(&lp) else {
            panic!("expected optimal")
        };
        assert_eq!(objective, rat(1, 20));
    }

    // ---- brute-force oracle: vertex enumeration over row/bound equalities ----

    /// Solve an LP whose variables all have finite box bounds by enumerating every
    /// candidate vertex (each choice of `n` tight constraints), keeping feasible
    /// ones, and maximizing. Exponential, for cross-checking only.
    fn oracle(lp: &OracleLp) -> Option<(Rat, Vec<Rat>)> {
        let n = lp.lower.len();
        // Tightenable constraints: every row as equality, plus each bound.
        let mut cands: Vec<(Vec<Rat>, Rat)> = Vec::new();
        for (coeffs, _, rhs) in &lp.rows {
            cands.push((coeffs.clone(), rhs.clone()));
        }
        for j in 0..n {
            let mut e = vec![Rat::zero(); n];
            e[j] = rint(1);
            cands.push((e.clone(), lp.lower[j].clone()));
            cands.push((e, lp.upper[j].clone()));
        }
        let mut best: Option<(Rat, Vec<Rat>)> = None;
        let k = cands.len();
        let mut pick = vec![0usize; n];
        fn rec(
            cands: &[(Vec<Rat>, Rat)],
            lp: &OracleLp,
            pick: &mut Vec<usize>,
            depth: usize,
            start: usize,
            k: usize,
            best: &mut Option<(Rat, Vec<Rat>)>,
        ) {
            let n = lp.lower.len();
            if depth == n {
                if let Some(x) = solve_square(cands, pick, n) {
                    if lp.feasible(&x) {
                        let obj: Rat = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
                        if best.as_ref().map(|(b, _)| obj > *b).unwrap_or(true) {
                            *best = Some((obj, x));
                        }
                    }
                }
                return;
            }
            for i in start..k {
                pick[depth] = i;
                rec(cands, lp, pick, depth + 1, i + 1, k, best);
            }
        }
        rec(&cands, lp, &mut pick, 0, 0, k, &mut best);
        best
    }

    /// Gaussian elimination over the picked square system; None when singular.
    fn solve_square(cands: &[(Vec<Rat>, Rat)], pick: &[usize], n: usize) -> Option<Vec<Rat>> {
        let mut a: Vec<Vec<Rat>> = pick
            .iter()
            .map(|&i| {
                let mut row = cands[i].0.clone();
                row.push(cands[i].1.clone());
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, piv);
            let p = a[col][col].clone();
            for v in a[col].iter_mut() {
                *v /= &p;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..=n {
                        let sub = &f * &a[col][c];
                        a[r][c] -= sub;
                    }
                }
            }
        }
        Some((0..n).map(|r| a[r][n].clone()).collect())
    }

    struct OracleLp {
        objective: Vec<Rat>,
        lower: Vec<Rat>,
        upper: Vec<Rat>,
        rows: Vec<(Vec<Rat>, Rel, Rat)>,
    }

    impl OracleLp {
        fn feasible(&self, x: &[Rat]) -> bool {
            for (j, v) in x.iter().enumerate() {
                if *v < self.lower[j] || *v > self.upper[j] {
                    return false;
                }
            }
            for (coeffs, rel, rhs) in &self.rows {
                let lhs: Rat = coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
                let ok = match rel {
                    Rel::Le => lhs <= *rhs,
                    Rel::Ge => lhs >= *rhs,
                    Rel::Eq => lhs == *rhs,
                };
                if !ok {
                    return false;
                }
            }
            true
        }

        fn to_lp(&self) -> Lp {
            let n = self.lower.len();
            let mut lp = Lp::new(n);
            for j in 0..n {
                lp.set_objective(j, self.objective[j].clone());
                lp.set_bounds(j, Some(self.lower[j].clone()), Some(self.upper[j].clone()));
            }
            for (coeffs, rel, rhs) in &self.rows {
                lp.add_row(
                    coeffs.iter().cloned().enumerate().filter(|(_, c)| !c.is_zero()),
                    *rel,
                    rhs.clone(),
                );
            }
            lp
        }
    }

    #[test]
    fn random_lps_match_vertex_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut optimal = 0;
        let mut infeasible = 0;
        for _ in 0..60 {
            let n = rng.gen_range(2..=3usize);
            let m = rng.gen_range(1..=5usize);
            let olp = OracleLp {
                objective: (0..n).map(|_| rint(rng.gen_range(-3..=3))).collect(),
                lower: (0..n).map(|_| rint(rng.gen_range(-3..=0))).collect(),
                upper: (0..n).map(|_| rint(rng.gen_range(0..=3))).collect(),
                rows: (0..m)
                    .map(|_| {
                        (
                            (0..n).map(|_| rint(rng.gen_range(-3..=3))).collect(),
                            match rng.gen_range(0..3) {
                                0 => Rel::Le,
                                1 => Rel::Ge,
                                _ => Rel::Eq,
                            },
                            rint(rng.gen_range(-4..=4)),
                        )
                    })
                    .collect(),
            };
            let got = olp.to_lp().solve().unwrap();
            match (oracle(&olp), got) {
                (Some((obj, _)), LpResult::Optimal { objective, x }) => {
                    assert_eq!(objective, obj, "objective mismatch");
                    assert!(olp.feasible(&x), "simplex point infeasible");
                    optimal += 1;
                }
                (None, LpResult::Infeasible) => infeasible += 1,
                (o, g) => panic!("oracle {o:?} vs simplex {g:?}"),
            }
        }
        // The mix must exercise both outcomes.
        assert!(optimal >= 10 && infeasible >= 5, "{optimal} optimal / {infeasible} infeasible");
    }
}
