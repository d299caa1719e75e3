//! Unique steady state of a Liouvillian via a sparse LU solve.
//!
//! The singular system L x = 0, Tr x = 1 is made square by replacing the
//! last row of L with the trace functional and putting 1 in the right-hand
//! side at that row. Uniqueness is probed on the modified matrix M: if the
//! kernel of L contains a traceless direction, M is singular, so a small
//! smallest singular value of M (estimated by inverse iteration on M†M
//! using the LU factors) flags a degenerate steady-state space.

use faer::linalg::solvers::SolveCore;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Conj, Mat};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qcore::rng::SplitMix64;
use crate::qcore::{devectorize, vectorize, DensityOperator, Liouvillian, SparseComplexMatrix, Tolerances};

/// Max allowed |L[rho]| entry for an accepted steady state.
const RESIDUAL_CAP: f64 = 1e-9;
/// sigma_min(M) below this (relative to the generator scale) means the
/// kernel is effectively more than one-dimensional.
const DEGENERACY_FLOOR: f64 = 1e-12;
const REFINEMENT_ROUNDS: usize = 2;
const INVERSE_ITERATIONS: usize = 16;

fn ensure_sequential_faer() {
    // Solves must be bit-reproducible regardless of the machine's thread
    // count; sweeps parallelize across solves instead.
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Solves for the unique steady state of `l`.
///
/// Errors with [`Error::DegenerateSteadyState`] when the numerical null
/// space has more than one dimension, and [`Error::Numerical`] when the
/// residual cannot be pushed below 1e-9.
pub fn steady_state(l: &Liouvillian) -> Result<DensityOperator> {
    ensure_sequential_faer();
    let dim = l.dim();
    let d2 = l.dim2();
    let trace_row = d2 - 1;

    // M = L with the last row replaced by the trace functional.
    let mut triplets: Vec<(usize, usize, C64)> = l
        .action()
        .triplets()
        .into_iter()
        .filter(|&(r, _, _)| r != trace_row)
        .collect();
    for i in 0..dim {
        triplets.push((trace_row, i * dim + i, C64::new(1.0, 0.0)));
    }
    let m_csr = SparseComplexMatrix::from_triplets(d2, d2, triplets.clone())?;

    let faer_triplets: Vec<Triplet<usize, usize, c64>> =
        triplets.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
    let m = SparseColMat::<usize, c64>::try_new_from_triplets(d2, d2, &faer_triplets)
        .map_err(|e| Error::Numerical(format!("sparse assembly failed: {e:?}")))?;

    let symbolic = SymbolicLu::try_new(m.symbolic())
        .map_err(|e| Error::Numerical(format!("symbolic factorization failed: {e:?}")))?;
    let lu = Lu::try_new_with_symbolic(symbolic, m.as_ref()).map_err(|e| {
        Error::DegenerateSteadyState(format!("LU factorization failed: {e:?}"))
    })?;

    let solve = |rhs: &[C64]| -> Vec<C64> {
        let mut x = Mat::<c64>::zeros(d2, 1);
        for (i, &v) in rhs.iter().enumerate() {
            x[(i, 0)] = v;
        }
        lu.solve_in_place_with_conj(Conj::No, x.as_mut());
        (0..d2).map(|i| x[(i, 0)]).collect()
    };
    let solve_adjoint = |rhs: &[C64]| -> Vec<C64> {
        let mut x = Mat::<c64>::zeros(d2, 1);
        for (i, &v) in rhs.iter().enumerate() {
            x[(i, 0)] = v;
        }
        lu.solve_transpose_in_place_with_conj(Conj::Yes, x.as_mut());
        (0..d2).map(|i| x[(i, 0)]).collect()
    };

    let mut b = vec![C64::new(0.0, 0.0); d2];
    b[trace_row] = C64::new(1.0, 0.0);

    let mut x = solve(&b);
    for _ in 0..REFINEMENT_ROUNDS {
        let mx = m_csr.apply(&x);
        let r: Vec<C64> = b.iter().zip(&mx).map(|(&bi, &mi)| bi - mi).collect();
        let dx = solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
    }
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::DegenerateSteadyState(
            "solve produced non-finite entries (singular system)".into(),
        ));
    }

    // Uniqueness probe: inverse power iteration on M†M estimates
    // sigma_min(M); each step solves with M and then with M†.
    let scale = l.action().max_abs_entry().max(1.0);
    let mut rng = SplitMix64::new(0x5EED_CAFE);
    let mut w: Vec<C64> = (0..d2).map(|_| C64::new(rng.next_sym(), rng.next_sym())).collect();
    let mut sigma_min = f64::INFINITY;
    for _ in 0..INVERSE_ITERATIONS {
        let norm_w = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm_w.is_finite() || norm_w == 0.0 {
            return Err(Error::DegenerateSteadyState(
                "uniqueness probe diverged (singular system)".into(),
            ));
        }
        for z in w.iter_mut() {
            *z /= norm_w;
        }
        let z = solve(&w);
        let next = solve_adjoint(&z);
        // |next| approaches 1/sigma_min^2.
        let growth = next.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !growth.is_finite() {
            return Err(Error::DegenerateSteadyState(
                "uniqueness probe diverged (singular system)".into(),
            ));
        }
        sigma_min = 1.0 / growth.sqrt();
        w = next;
    }
    if sigma_min < DEGENERACY_FLOOR * scale {
        return Err(Error::DegenerateSteadyState(format!(
            "smallest singular value {sigma_min:.3e} below {:.3e}",
            DEGENERACY_FLOOR * scale
        )));
    }

    // Clean up: exact Hermiticity and unit trace, then re-check the
    // residual against the original generator.
    let rho = devectorize(&x, dim)?.hermitize();
    let tr = rho.trace().re;
    if !(tr.is_finite()) || (tr - 1.0).abs() > 1e-6 {
        return Err(Error::Numerical(format!("steady-state trace {tr} is off unity")));
    }
    let rho = rho.scale(C64::new(1.0 / tr, 0.0));

    let residual = l
        .apply_vec(&vectorize(&rho))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if residual > RESIDUAL_CAP {
        return Err(Error::Numerical(format!(
            "steady-state residual {residual:.3e} exceeds {RESIDUAL_CAP:.1e}"
        )));
    }

    DensityOperator::try_new(rho, l.site_dims().to_vec(), &Tolerances::default())
}
