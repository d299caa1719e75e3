//! Eigenvalues of complex Hermitian matrices via cyclic Jacobi rotations.
//!
//! Each pivot combines a phase rotation (making the off-diagonal entry real)
//! with a real Givens rotation that annihilates it. Only eigenvalues are
//! tracked; the dimensions here (at most a few hundred) make Jacobi's
//! robustness a better fit than a faster tridiagonalization.

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// All eigenvalues of a Hermitian matrix, ascending.
///
/// `herm_tol` bounds the accepted hermiticity defect of the input.
pub fn hermitian_eigenvalues(m: &ComplexMatrix, herm_tol: f64) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::InvalidInput("eigenvalues of a non-square matrix".into()));
    }
    let defect = m.hermiticity_defect();
    let scale = m.max_abs_entry().max(1.0);
    if defect > herm_tol * scale.max(1.0) {
        return Err(Error::InvalidInput(format!(
            "matrix is not Hermitian: defect {defect:.3e} exceeds {herm_tol:.3e}"
        )));
    }

    let n = m.rows();
    // Work on the exactly-Hermitian part so roundoff asymmetry cannot bias
    // the rotations.
    let mut a = m.hermitize();
    if n == 1 {
        return Ok(vec![a[(0, 0)].re]);
    }

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    };
    let tol = 1e-14 * scale * (n as f64);

    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= tol {
            let mut vals: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
            vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
            return Ok(vals);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b <= 1e-300 {
                    continue;
                }
                // Phase that makes the pivot entry real and positive.
                let phase = apq / b;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Unitary on columns (p, q): U(p,p)=c, U(q,p)=-s*conj(phase),
                // U(p,q)=s*phase? derived so that (U† A U)(p,q)=0.
                let u_pp = C64::new(c, 0.0);
                let u_qp = -phase.conj() * s;
                let u_pq = phase * s;
                let u_qq = C64::new(c, 0.0);

                // Column update A <- A U on columns p, q.
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * u_pp + aiq * u_qp;
                    a[(i, q)] = aip * u_pq + aiq * u_qq;
                }
                // Row update A <- U† A on rows p, q.
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = u_pp.conj() * apj + u_qp.conj() * aqj;
                    a[(q, j)] = u_pq.conj() * apj + u_qq.conj() * aqj;
                }
                // Clean the pivot pair exactly.
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }
    Err(Error::Numerical("Jacobi eigensolver did not converge".into()))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_hermitian_eigenvalue(m: &ComplexMatrix, herm_tol: f64) -> Result<f64> {
    Ok(hermitian_eigenvalues(m, herm_tol)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::rng::SplitMix64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn two_by_two_known_spectrum() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = ComplexMatrix::try_from_vec(
            2,
            2,
            vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)],
        )
        .unwrap();
        let vals = hermitian_eigenvalues(&m, 1e-10).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn construct_then_rotate_recovers_spectrum() {
        // Build a matrix with a known spectrum by rotating a diagonal with
        // a product of complex Givens rotations, then check we recover it.
        let n = 8;
        let mut rng = SplitMix64::new(0xDE51EE);
        let spectrum: Vec<f64> = (0..n).map(|_| 4.0 * rng.next_sym()).collect();
        let mut m = ComplexMatrix::from_real_diag(&spectrum);
        for _ in 0..40 {
            let p = (rng.next_u64() as usize) % n;
            let mut q = (rng.next_u64() as usize) % n;
            if p == q {
                q = (q + 1) % n;
            }
            let theta = std::f64::consts::PI * rng.next_sym();
            let phi = std::f64::consts::PI * rng.next_sym();
            let (cth, sth) = (theta.cos(), theta.sin());
            let ph = C64::from_polar(1.0, phi);
            // G = identity with a 2x2 unitary block at (p, q).
            let mut g = ComplexMatrix::identity(n);
            g[(p, p)] = c(cth, 0.0);
            g[(p, q)] = ph * sth;
            g[(q, p)] = -ph.conj() * sth;
            g[(q, q)] = c(cth, 0.0);
            m = g.adjoint().matmul(&m).matmul(&g);
        }
        let mut want = spectrum.clone();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let got = hermitian_eigenvalues(&m, 1e-8).unwrap();
        for (w, g) in want.iter().zip(&got) {
            assert!((w - g).abs() < 1e-9, "want {w}, got {g}");
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::try_from_vec(
            2,
            2,
            vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        assert!(hermitian_eigenvalues(&m, 1e-10).is_err());
    }
}
