//! Exact, witness-producing implementations of homogeneous-pair extraction in
//! hereditary graph classes: weighted pair lemmas for line graphs and claw-free
//! Berge graphs, clique-separator tree decompositions, structured-pair analysis
//! with module extraction, active-hook growing, double-hook assembly, and the
//! random construction showing the limits of linear homogeneous pairs.
//!
//! Everything runs on exact rational arithmetic, every returned witness can be
//! re-validated independently, and desk-scale brute-force oracles back each
//! constructive pipeline.

pub mod bits;
pub mod clawfree;
pub mod corpus;
pub mod counterexample;
pub mod decomp;
pub mod graph;
pub mod hooks;
pub mod io;
pub mod line_pairs;
pub mod lineroot;
pub mod measure;
pub mod oracle;
pub mod recognition;
pub mod structured;
pub mod witness;

pub use bits::VertexSet;
pub use graph::{Graph, Multigraph};
pub use measure::{Measure, Rat};

/// Unified error type for the whole library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A numeric parameter is outside the documented range for the operation.
    #[error("parameter out of range: {0}")]
    Parameter(String),
    /// An input exceeds a compile-time-visible size cap of an exact search.
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An object failed its validator; the message names the violation.
    #[error("validation failed: {0}")]
    Validation(String),
    /// A step that the underlying argument proves impossible happened anyway.
    /// Either the input was outside the operation's class or there is a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    /// Malformed file or text input.
    #[error("input error: {0}")]
    Input(String),
    /// An honest negative: the requested object provably does not exist at
    /// the requested size, or cannot be certified within the caps.
    #[error("honest negative: {0}")]
    NotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
