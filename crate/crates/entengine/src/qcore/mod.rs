//! Complex linear-algebra substrate: dense/sparse matrices, tensor products,
//! partial traces, vectorization, and density-operator validity checks.
//!
//! All types are immutable after construction; operations are pure functions.

mod density;
mod eig;
mod matrix;
pub mod rng;
mod superop;

pub use density::{partial_trace_matrix, DensityOperator, Tolerances};
pub use eig::{hermitian_eigenvalues, min_hermitian_eigenvalue};
pub use matrix::{kron, trace_product, C64, ComplexMatrix, SparseComplexMatrix};
pub use superop::{devectorize, vectorize, Liouvillian};

use crate::error::Result;

/// Smallest eigenvalue of a Hermitian matrix; errors on non-Hermitian input.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    min_hermitian_eigenvalue(m, 1e-8)
}

/// Reduced operator with `site` traced out.
pub fn partial_trace(rho: &DensityOperator, site: usize) -> Result<DensityOperator> {
    rho.partial_trace(site)
}
