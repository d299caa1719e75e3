//! Shared helpers for integration tests.

use entengine::qcore::rng::SplitMix64;
use entengine::qcore::{ComplexMatrix, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian(dim: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(dim, dim, |_, _| c(rng.next_sym(), rng.next_sym()));
    a.add(&a.adjoint()).scale(c(0.5, 0.0))
}

/// Random Hermitian unit-trace matrix (not necessarily positive).
pub fn random_hermitian_unit_trace(dim: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    let mut m = random_hermitian(dim, rng);
    let shift = (1.0 - m.trace().re) / dim as f64;
    for i in 0..dim {
        m[(i, i)] += c(shift, 0.0);
    }
    m
}

/// Random density matrix (PSD, unit trace).
pub fn random_density(dim: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(dim, dim, |_, _| c(rng.next_sym(), rng.next_sym()));
    let p = a.matmul(&a.adjoint());
    let tr = p.trace().re;
    p.scale(c(1.0 / tr, 0.0)).hermitize()
}

/// Random normalized pure state vector.
pub fn random_pure_state(dim: usize, rng: &mut SplitMix64) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| c(rng.next_sym(), rng.next_sym())).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
    v
}
