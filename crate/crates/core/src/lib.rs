//! Compile small Boolean problems (SAT / weighted MaxSAT) into Ising models on a
//! Chimera hardware graph, and solve the result with classical samplers.
//!
//! The pipeline has an offline phase and an online phase:
//!
//! * offline — [`synth`] derives maximum-gap penalty functions for small Boolean
//!   relations on tile-sized subgraphs (exact rational LP plus witness search) and
//!   [`gatelib`] stores the verified results as a cell library;
//! * online — [`frontend`] parses DIMACS CNF/WCNF, builds an AND-inverter graph and
//!   maps it onto library cells, [`placeroute`] assigns cells to tiles and routes
//!   variable chains (a minor embedding), and [`sampler`] draws samples from the
//!   assembled Ising model and decodes them back to Boolean assignments.
//!
//! All model coefficients and certified gaps use exact rational arithmetic; floating
//! point appears only inside the simulated-annealing sampler.

pub mod benchgen;
pub mod boolfn;
pub mod chimera;
pub mod error;
pub mod frontend;
pub mod gatelib;
pub mod ising;
pub mod lp;
pub mod penalty;
pub mod pipeline;
pub mod placeroute;
pub mod rat;
pub mod sampler;
pub mod synth;

pub use error::{Error, Result};
pub use rat::Rat;
