//! Vectorization and sparse superoperators.
//!
//! Column-stacking convention: `vec(rho)[j*dim + i] = rho(i, j)`, so that
//! `vec(A rho B) = (B^T ⊗ A) vec(rho)` and superoperators act as sparse
//! dim² x dim² matrices on vectorized states.

use num_complex::Complex64 as C64;

use super::matrix::{ComplexMatrix, SparseComplexMatrix};
use crate::error::{Error, Result};

/// Column-stacks a matrix.
pub fn vectorize(m: &ComplexMatrix) -> Vec<C64> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut v = vec![C64::new(0.0, 0.0); rows * cols];
    for j in 0..cols {
        for i in 0..rows {
            v[j * rows + i] = m[(i, j)];
        }
    }
    v
}

/// Inverse of [`vectorize`] for square matrices.
pub fn devectorize(v: &[C64], dim: usize) -> Result<ComplexMatrix> {
    if v.len() != dim * dim {
        return Err(Error::InvalidInput(format!(
            "vector length {} is not {dim}^2",
            v.len()
        )));
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            m[(i, j)] = v[j * dim + i];
        }
    }
    Ok(m)
}

/// Sparse linear generator acting on column-vectorized density matrices.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    site_dims: Vec<usize>,
    dim: usize,
    action: SparseComplexMatrix,
}

impl Liouvillian {
    pub fn new(site_dims: Vec<usize>, action: SparseComplexMatrix) -> Result<Self> {
        let dim: usize = site_dims.iter().product();
        if action.rows() != dim * dim || action.cols() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "superoperator is {}x{}, expected {}x{}",
                action.rows(),
                action.cols(),
                dim * dim,
                dim * dim
            )));
        }
        Ok(Self { site_dims, dim, action })
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Superoperator dimension (dim squared).
    pub fn dim2(&self) -> usize {
        self.dim * self.dim
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.site_dims
    }

    pub fn action(&self) -> &SparseComplexMatrix {
        &self.action
    }

    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        self.action.apply(v)
    }

    /// L[rho] as a matrix.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let v = vectorize(m);
        devectorize(&self.action.apply(&v), self.dim).expect("dimension preserved")
    }
}
