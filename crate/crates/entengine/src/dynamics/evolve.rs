//! Classical RK4 integration of d(rho)/dt = L[rho].
//!
//! Serves as the independent oracle for the linear-solve steady state:
//! both paths must land on the same fixed point.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qcore::{devectorize, vectorize, DensityOperator, Liouvillian, Tolerances};

/// Largest RK4 step accepted for this generator: 0.1 over the max absolute
/// row sum, comfortably inside the stability region.
pub fn stable_step(l: &Liouvillian) -> f64 {
    0.1 / l.action().inf_norm().max(1e-300)
}

/// Integrates rho forward by `t_final` in steps of `dt`.
///
/// `dt` must respect [`stable_step`]; the trace is monitored and drift
/// beyond 1e-8 aborts with an instability error.
pub fn evolve(
    l: &Liouvillian,
    rho0: &DensityOperator,
    t_final: f64,
    dt: f64,
) -> Result<DensityOperator> {
    if rho0.dim() != l.dim() {
        return Err(Error::InvalidInput("state and generator dimensions differ".into()));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput("evolution times must be finite and positive".into()));
    }
    let cap = stable_step(l);
    if dt > cap * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "dt = {dt:.3e} exceeds the stability bound {cap:.3e}"
        )));
    }

    let dim = l.dim();
    let d2 = l.dim2();
    let steps = (t_final / dt).round() as u64;
    let action = l.action();

    let mut v = vectorize(rho0.matrix());
    let mut k1 = vec![C64::new(0.0, 0.0); d2];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();

    let trace_of = |v: &[C64]| -> C64 { (0..dim).map(|i| v[i * dim + i]).sum() };
    let check_every = 4096u64;

    for step in 0..steps {
        action.apply_into(&v, &mut k1);
        for i in 0..d2 {
            tmp[i] = v[i] + k1[i] * (0.5 * dt);
        }
        action.apply_into(&tmp, &mut k2);
        for i in 0..d2 {
            tmp[i] = v[i] + k2[i] * (0.5 * dt);
        }
        action.apply_into(&tmp, &mut k3);
        for i in 0..d2 {
            tmp[i] = v[i] + k3[i] * dt;
        }
        action.apply_into(&tmp, &mut k4);
        let w = dt / 6.0;
        for i in 0..d2 {
            v[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }

        if step % check_every == check_every - 1 {
            let tr = trace_of(&v);
            if !tr.re.is_finite() || (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
                return Err(Error::Numerical(format!(
                    "trace drifted to {tr} after {} steps (unstable integration)",
                    step + 1
                )));
            }
        }
    }

    let tr = trace_of(&v);
    if !tr.re.is_finite() || (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(Error::Numerical(format!("trace drifted to {tr} (unstable integration)")));
    }

    // Drift passed the bound; remove the residue so the validity gate sees
    // an exactly unit trace.
    let rho = devectorize(&v, dim)?.hermitize().scale(C64::new(1.0 / tr.re, 0.0));
    DensityOperator::try_new(rho, l.site_dims().to_vec(), &Tolerances::default())
}
