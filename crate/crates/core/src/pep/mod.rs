//! Exact matrix machinery for pairwise error analysis.

mod bounds;
mod eigen;
mod hermitian;

pub use bounds::*;
pub use eigen::*;
pub use hermitian::*;
