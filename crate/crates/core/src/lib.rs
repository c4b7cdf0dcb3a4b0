//! Exact Lie theory and formal deformation quantization on symmetric bounded
//! domains: Pyatetskii-Shapiro algebras, su(1,N) root data, Chevalley-Eilenberg
//! cohomology, Moyal star products and quantum moment maps on the unit ball.

pub mod ball;
pub mod cli;
pub mod cohomology;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod psd;
pub mod report;
pub mod retract;
pub mod scalar;
pub mod star;
pub mod su1n;

pub use error::{Error, Result};
pub use scalar::{GScalar, Scalar};
