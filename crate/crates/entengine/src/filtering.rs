//! Heralded filtering: local projection of each qutrit onto its qubit
//! subspace, renormalization, and scoring of the heralded state against
//! the target.

use num_complex::Complex64 as C64;

use crate::builder::{qubit_digit, LevelAssignment, MachineSpec, TargetState, Temperature};
use crate::dynamics::{reset_liouvillian, steady_state};
use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, DensityOperator, Tolerances};

/// Success probabilities below this are treated as "the herald never
/// fires" rather than renormalized through a division by noise.
pub const PSUC_FLOOR: f64 = 1e-12;

/// Result of applying the heralding filter to a steady state.
#[derive(Debug, Clone)]
pub struct FilterOutcome {
    /// Heralded N-qubit state, re-indexed into the target's computational
    /// basis.
    pub heralded: DensityOperator,
    /// Success probability Tr(rho Pi), clamped to [0, 1].
    pub p_suc: f64,
    /// Projected trace before clamping/renormalization.
    pub raw_projected_trace: f64,
}

impl FilterOutcome {
    /// JSON export; includes the fidelity when the caller scored one.
    pub fn to_json(&self, fidelity: Option<f64>) -> serde_json::Value {
        serde_json::json!({
            "p_suc": self.p_suc,
            "fidelity": fidelity,
            "heralded_matrix": self.heralded.to_json(),
        })
    }
}

/// Projector keeping, on each qutrit, the two levels complementary to the
/// excluded one: Pi = ⊗_k (I3 - |R_k><R_k|). Diagonal, idempotent,
/// rank 2^N.
pub fn filter_projector(r: &LevelAssignment) -> ComplexMatrix {
    let n = r.n_sites();
    let dim = 3usize.pow(n as u32);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for idx in 0..dim {
        if kept_qubit_index(idx, r).is_some() {
            m[(idx, idx)] = C64::new(1.0, 0.0);
        }
    }
    m
}

/// Maps a 3^N basis index to its 2^N counterpart if every digit survives
/// the filter.
fn kept_qubit_index(idx: usize, r: &LevelAssignment) -> Option<usize> {
    let n = r.n_sites();
    let mut rem = idx;
    let mut digits = [0usize; 16];
    for k in (0..n).rev() {
        digits[k] = rem % 3;
        rem /= 3;
    }
    let mut out = 0usize;
    for k in 0..n {
        out = (out << 1) | qubit_digit(r.entries()[k], digits[k])?;
    }
    Some(out)
}

/// Applies the heralding filter: projects, renormalizes by the success
/// probability, and re-indexes the surviving block into the 2^N qubit
/// basis (the embedding map inverted).
pub fn apply_filter(rho: &DensityOperator, r: &LevelAssignment) -> Result<FilterOutcome> {
    let n = r.n_sites();
    if rho.n_sites() != n || rho.site_dims().iter().any(|&d| d != 3) {
        return Err(Error::InvalidInput(
            "filter expects a qutrit-space state with matching site count".into(),
        ));
    }
    let dim = rho.dim();

    // Kept 3^N indices in qubit order.
    let qdim = 1usize << n;
    let mut kept = vec![0usize; qdim];
    for idx in 0..dim {
        if let Some(q) = kept_qubit_index(idx, r) {
            kept[q] = idx;
        }
    }

    let raw: f64 = kept.iter().map(|&i| rho.matrix()[(i, i)].re).sum();
    if raw <= PSUC_FLOOR {
        return Err(Error::HeraldNeverFires(raw));
    }
    let p_suc = raw.clamp(0.0, 1.0);

    let mut out = ComplexMatrix::zeros(qdim, qdim);
    let scale = C64::new(1.0 / raw, 0.0);
    for (qi, &i) in kept.iter().enumerate() {
        for (qj, &j) in kept.iter().enumerate() {
            out[(qi, qj)] = rho.matrix()[(i, j)] * scale;
        }
    }
    let heralded = DensityOperator::try_new(
        out.hermitize(),
        vec![2; n],
        &Tolerances { trace: 1e-9, ..Tolerances::default() },
    )?;
    Ok(FilterOutcome { heralded, p_suc, raw_projected_trace: raw })
}

/// Overlap <psi| rho |psi> with a pure target.
pub fn fidelity(rho: &DensityOperator, target: &TargetState) -> Result<f64> {
    if rho.dim() != target.dim() {
        return Err(Error::InvalidInput(format!(
            "state dimension {} does not match target dimension {}",
            rho.dim(),
            target.dim()
        )));
    }
    let mut acc = C64::new(0.0, 0.0);
    for &(i, ci) in target.terms() {
        for &(j, cj) in target.terms() {
            acc += ci.conj() * rho.matrix()[(i, j)] * cj;
        }
    }
    if acc.im.abs() > 1e-10 {
        return Err(Error::Numerical(format!(
            "fidelity has an imaginary part {:.3e}",
            acc.im
        )));
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// A fidelity above one half witnesses genuine multipartite entanglement
/// for GHZ-type targets (two nonzero off-diagonal elements).
pub fn gme_witness(fidelity: f64) -> bool {
    fidelity > 0.5
}

/// Analytic maximum filtering success probability of the N-qubit GHZ
/// machine: 4 / (3 [1 + 2 (N-1) h_{N-1}]) with h_n the n-th harmonic
/// number. Reached in the regime of frequent hot resets.
pub fn max_psuc_ghz(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidInput("GHZ machine needs n >= 2".into()));
    }
    let h: f64 = (1..n).map(|k| 1.0 / k as f64).sum();
    Ok(4.0 / (3.0 * (1.0 + 2.0 * (n as f64 - 1.0) * h)))
}

/// Per-ratio deviation of the heralded state from the target in the
/// extremal-temperature limit.
#[derive(Debug, Clone)]
pub struct IdealLimitReport {
    /// Hot-to-cold rate ratios, as supplied.
    pub ratios: Vec<f64>,
    /// Max |heralded(n, n') - c_n conj(c_n')| over support-indexed entries.
    pub support_deviation: Vec<f64>,
    /// Max absolute heralded entry outside the support block (the
    /// population leaked through hot resets).
    pub leakage: Vec<f64>,
    /// Success probabilities, for reference.
    pub p_suc: Vec<f64>,
}

/// Solves the machine across `ratios` (gamma_h = ratio * gamma_c) and
/// compares heralded states against the target, entry by entry on the
/// support block.
///
/// Requires a single-hot machine at extremal temperatures (cold zero, hot
/// infinite); in that limit the heralded state approaches the target as
/// the ratio decreases.
pub fn ideal_limit_check(spec: &MachineSpec, ratios: &[f64]) -> Result<IdealLimitReport> {
    let hot = spec.level_assignment().hot_sites();
    if hot.len() != 1 {
        return Err(Error::InvalidInput("ideal-limit check needs exactly one hot site".into()));
    }
    for (k, b) in spec.baths().baths().iter().enumerate() {
        let want = if hot[0] == k { Temperature::Infinite } else { Temperature::Zero };
        if b.temperature != want {
            return Err(Error::InvalidInput(
                "ideal-limit check needs a zero-temperature cold bath and an infinite hot one"
                    .into(),
            ));
        }
    }

    let gamma_c = spec
        .baths()
        .baths()
        .iter()
        .enumerate()
        .find(|&(k, _)| k != hot[0])
        .map(|(_, b)| b.rate)
        .unwrap_or(1.0);

    let target = spec.target();
    let mut report = IdealLimitReport {
        ratios: ratios.to_vec(),
        support_deviation: Vec::new(),
        leakage: Vec::new(),
        p_suc: Vec::new(),
    };
    for &ratio in ratios {
        let machine = spec.with_couplings(ratio * gamma_c, gamma_c, spec.g())?;
        let l = reset_liouvillian(&machine)?;
        let rho = steady_state(&l)?;
        let outcome = apply_filter(&rho, machine.level_assignment())?;

        let support = target.support();
        let mut dev = 0.0f64;
        for &i in &support {
            for &j in &support {
                let want = target.amplitude(i) * target.amplitude(j).conj();
                dev = dev.max((outcome.heralded.matrix()[(i, j)] - want).norm());
            }
        }
        let mut leak = 0.0f64;
        let qdim = outcome.heralded.dim();
        for i in 0..qdim {
            for j in 0..qdim {
                if !(support.contains(&i) && support.contains(&j)) {
                    leak = leak.max(outcome.heralded.matrix()[(i, j)].norm());
                }
            }
        }
        report.support_deviation.push(dev);
        report.leakage.push(leak);
        report.p_suc.push(outcome.p_suc);
    }
    Ok(report)
}
