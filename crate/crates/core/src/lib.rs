//! Continuous-variable quantum secret sharing with random passive interferometers.
//!
//! A dealer mixes `m` secret modes with `n` momentum-squeezed ancillas in a
//! passive interferometer and hands one output mode to each player. This crate
//! decides which player subsets can decode, builds their decoding matrices,
//! synthesizes explicit Gaussian decoders and scores reconstruction quality
//! against input squeezing.
//!
//! Quadrature vectors are always ordered as all positions followed by all
//! momenta, and the vacuum quadrature variance is 1/2.

pub mod channel;
pub mod curve;
pub mod error;
pub mod haar;
pub mod linalg;
pub mod report;
pub mod scheme_file;
pub mod search;
pub mod sharing;
pub mod symplectic;
pub mod synthesis;

pub use error::{Error, Result};

/// Default tolerance for structural checks (symplecticity, unitarity).
pub const DEFAULT_TOL: f64 = 1e-9;
