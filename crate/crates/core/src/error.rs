//! Error type shared across the toolchain.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the compilation and solving stages.
///
/// Variants mirror the failure classes of the individual stages so that the CLI can
/// tag diagnostics with the stage that produced them.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the operation's arguments was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// The instance exceeds a documented exhaustive-enumeration bound.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A combined coefficient left the admissible range ([-2,2] biases, [-1,1] couplings).
    #[error("range error at {location}: coefficient {value} out of range")]
    Range { location: String, value: String },

    /// Malformed DIMACS/WCNF or JSON input.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// No witness profile admits a positive gap on any candidate placement.
    #[error("synthesis infeasible: {0}")]
    Infeasible(String),

    /// Cell placement failed (not enough tiles, or an unplaceable footprint).
    #[error("placement error: {0}")]
    Placement(String),

    /// Chain routing failed for a net.
    #[error("routing error: {0}")]
    Routing(String),

    /// The mapper needed a fallback cell the library does not provide.
    #[error("configuration error: {0}")]
    Config(String),

    /// Benchmark generation exhausted its retry budget.
    #[error("generation error: {0}")]
    Generation(String),

    /// An internal consistency check failed; indicates a bug, not bad input.
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
