//! Exact rational scalars used for all model coefficients and gaps.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::{Error, Result};

/// Exact rational number; every Ising coefficient, gap and LP entry uses this type.
pub type Rat = BigRational;

/// Build the rational `n/d`.
///
/// Panics when `d == 0`; intended for literals in code and tests.
pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Build the integer rational `n`.
pub fn rint(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Parse `"p/q"`, an integer, or a plain decimal (e.g. `"1.5"`).
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse {
        line: 0,
        msg: format!("invalid rational literal {s:?}"),
    };
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        // Decimal literal: int.frac == (int*10^k + frac) / 10^k with the sign of `int`.
        let negative = int.trim_start().starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let num: BigInt = frac.parse().map_err(|_| bad())?;
        let den = BigInt::from(10u8).pow(frac.len() as u32);
        let frac_part = BigRational::new(num, den);
        let int_part = BigRational::from_integer(int);
        return Ok(if negative {
            int_part - frac_part
        } else {
            int_part + frac_part
        });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

/// Render a rational as `"p"` for integers or `"p/q"` otherwise (the file-format form).
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Convert to `f64` for the sampler; exact rationals at model scale always fit.
pub fn rat_to_f64(r: &Rat) -> f64 {
    // BigRational has no direct conversion; go through a scaled integer division.
    let num = r.numer();
    let den = r.denom();
    let fnum = bigint_to_f64(num);
    let fden = bigint_to_f64(den);
    fnum / fden
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    // Model coefficients are tiny; fall back to string parsing for oversized values.
    use num::ToPrimitive;
    b.to_f64().unwrap_or_else(|| {
        if b.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}
