//! Density operators on mixed qubit/qutrit product spaces.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::eig::min_hermitian_eigenvalue;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Validation tolerances for density operators.
///
/// Steady-state solves leave ~1e-12 noise on the constraints; the defaults
/// keep two orders of magnitude of margin.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max allowed |rho - rho†| entry.
    pub hermiticity: f64,
    /// Max allowed |Tr(rho) - 1|.
    pub trace: f64,
    /// Eigenvalues may dip this far below zero.
    pub psd_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { hermiticity: 1e-10, trace: 1e-10, psd_slack: 1e-8 }
    }
}

/// Hermitian, unit-trace, positive-semidefinite (within tolerance) operator
/// on a product of 2- and 3-level sites.
///
/// Site 0 is the leftmost tensor factor: the composite basis index is
/// big-endian mixed-radix over `site_dims`, matching ket notation
/// |site0, site1, ...>.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dim: usize,
    site_dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates and wraps a matrix as a density operator.
    pub fn try_new(
        matrix: ComplexMatrix,
        site_dims: Vec<usize>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let dim: usize = site_dims.iter().product();
        if site_dims.is_empty() || site_dims.iter().any(|&d| d != 2 && d != 3) {
            return Err(Error::InvalidInput(
                "site dimensions must be a non-empty list of 2s and 3s".into(),
            ));
        }
        if !matrix.is_square() || matrix.rows() != dim {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{} but site dims give {}",
                matrix.rows(),
                matrix.cols(),
                dim
            )));
        }
        if !matrix.all_finite() {
            return Err(Error::InvalidInput("density matrix has non-finite entries".into()));
        }
        let herm = matrix.hermiticity_defect();
        if herm > tol.hermiticity {
            return Err(Error::InvalidInput(format!(
                "not Hermitian: defect {herm:.3e} > {:.3e}",
                tol.hermiticity
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidInput(format!(
                "trace {tr} deviates from one by more than {:.3e}",
                tol.trace
            )));
        }
        let min_eig = min_hermitian_eigenvalue(&matrix, tol.hermiticity.max(1e-12))?;
        if min_eig < -tol.psd_slack {
            return Err(Error::InvalidInput(format!(
                "not positive semidefinite: min eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { dim, site_dims, matrix })
    }

    /// |psi><psi| for a normalized state vector.
    pub fn from_pure(state: &[C64], site_dims: Vec<usize>) -> Result<Self> {
        let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "state vector norm {} is not 1",
                norm.sqrt()
            )));
        }
        let m = ComplexMatrix::outer(state, state);
        Self::try_new(m, site_dims, &Tolerances::default())
    }

    pub fn maximally_mixed(site_dims: Vec<usize>) -> Self {
        let dim: usize = site_dims.iter().product();
        let m = ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0));
        Self { dim, site_dims, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.site_dims
    }

    pub fn n_sites(&self) -> usize {
        self.site_dims.len()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_hermitian_eigenvalue(&self.matrix, 1e-8)
    }

    /// Tr(rho^2).
    pub fn purity(&self) -> f64 {
        super::matrix::trace_product(&self.matrix, &self.matrix).re
    }

    /// Traces out one site, returning the reduced operator on the rest.
    pub fn partial_trace(&self, site: usize) -> Result<DensityOperator> {
        let m = partial_trace_matrix(&self.matrix, &self.site_dims, site)?;
        let mut dims = self.site_dims.clone();
        dims.remove(site);
        if dims.is_empty() {
            return Err(Error::InvalidInput(
                "cannot trace out the only site of a density operator".into(),
            ));
        }
        let dim = dims.iter().product();
        Ok(DensityOperator { dim, site_dims: dims, matrix: m })
    }

    /// JSON export: dimensions plus row-major entries.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .matrix
            .data()
            .iter()
            .map(|z| serde_json::json!({ "re": z.re, "im": z.im }))
            .collect();
        serde_json::json!({
            "dim": self.dim,
            "site_dims": self.site_dims,
            "entries": entries,
        })
    }

    pub fn from_json(v: &serde_json::Value, tol: &Tolerances) -> Result<Self> {
        let dim = v["dim"]
            .as_u64()
            .ok_or_else(|| Error::InvalidInput("missing dim".into()))? as usize;
        let site_dims: Vec<usize> = v["site_dims"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("missing site_dims".into()))?
            .iter()
            .map(|d| d.as_u64().unwrap_or(0) as usize)
            .collect();
        let raw = v["entries"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("missing entries".into()))?;
        if raw.len() != dim * dim {
            return Err(Error::InvalidInput("entry count does not match dim^2".into()));
        }
        let data: Vec<C64> = raw
            .iter()
            .map(|e| C64::new(e["re"].as_f64().unwrap_or(f64::NAN), e["im"].as_f64().unwrap_or(f64::NAN)))
            .collect();
        let m = ComplexMatrix::try_from_vec(dim, dim, data)?;
        Self::try_new(m, site_dims, tol)
    }
}

/// Partial trace over `site` of a matrix on the product space described by
/// `site_dims`.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    site_dims: &[usize],
    site: usize,
) -> Result<ComplexMatrix> {
    if site >= site_dims.len() {
        return Err(Error::InvalidInput(format!(
            "site {site} out of range for {} sites",
            site_dims.len()
        )));
    }
    let dim: usize = site_dims.iter().product();
    assert_eq!(m.rows(), dim);
    let d_s = site_dims[site];
    let post: usize = site_dims[site + 1..].iter().product();
    let pre: usize = dim / (d_s * post);
    let rdim = pre * post;
    let compose = |x: usize, l: usize, y: usize| (x * d_s + l) * post + y;
    let mut out = ComplexMatrix::zeros(rdim, rdim);
    for x1 in 0..pre {
        for y1 in 0..post {
            for x2 in 0..pre {
                for y2 in 0..post {
                    let mut acc = C64::new(0.0, 0.0);
                    for l in 0..d_s {
                        acc += m[(compose(x1, l, y1), compose(x2, l, y2))];
                    }
                    out[(x1 * post + y1, x2 * post + y2)] = acc;
                }
            }
        }
    }
    Ok(out)
}
