//! Machine construction: target states, level assignments, energy ladders
//! satisfying energy conservation, bath specifications, and the free and
//! interaction Hamiltonians, plus preset machines for common target
//! families.

mod feasibility;
mod simplex;

pub use feasibility::{feasibility_single_hot, FeasibilityWitness};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, DensityOperator, Tolerances};

/// Largest site count for which dense 3^N operators are built.
pub const DENSE_SITE_CAP: usize = 6;

/// N-qubit pure target state as a support set of basis indices with complex
/// amplitudes.
///
/// Basis indices are big-endian over qubits: qubit 0 is the leftmost ket
/// slot and the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    n_qubits: usize,
    terms: Vec<(usize, C64)>,
}

impl TargetState {
    pub fn new(n_qubits: usize, mut terms: Vec<(usize, C64)>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidInput("target needs at least one qubit".into()));
        }
        if terms.is_empty() {
            return Err(Error::InvalidInput("target support is empty".into()));
        }
        let dim = 1usize << n_qubits;
        terms.sort_unstable_by_key(|&(n, _)| n);
        for w in terms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidInput(format!(
                    "duplicate support bitstring index {}",
                    w[0].0
                )));
            }
        }
        let mut norm = 0.0;
        for &(n, c) in &terms {
            if n >= dim {
                return Err(Error::InvalidInput(format!(
                    "support index {n} out of range for {n_qubits} qubits"
                )));
            }
            if !(c.re.is_finite() && c.im.is_finite()) || c.norm() < 1e-14 {
                return Err(Error::InvalidInput(
                    "support amplitudes must be finite and nonzero".into(),
                ));
            }
            norm += c.norm_sqr();
        }
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "amplitudes are not normalized: sum |c|^2 = {norm}"
            )));
        }
        Ok(Self { n_qubits, terms })
    }

    /// Builds from `("0110", amplitude)` pairs.
    pub fn from_bitstrings(n_qubits: usize, terms: &[(&str, C64)]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|&(bits, c)| Ok((Self::parse_bits(bits, n_qubits)?, c)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_qubits, parsed)
    }

    fn parse_bits(bits: &str, n_qubits: usize) -> Result<usize> {
        if bits.len() != n_qubits {
            return Err(Error::InvalidInput(format!(
                "bitstring '{bits}' does not have {n_qubits} bits"
            )));
        }
        let mut idx = 0usize;
        for ch in bits.chars() {
            idx <<= 1;
            match ch {
                '0' => {}
                '1' => idx |= 1,
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "bitstring '{bits}' contains a character other than 0/1"
                    )))
                }
            }
        }
        Ok(idx)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    /// Support as sorted basis indices.
    pub fn support(&self) -> Vec<usize> {
        self.terms.iter().map(|&(n, _)| n).collect()
    }

    pub fn terms(&self) -> &[(usize, C64)] {
        &self.terms
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.terms
            .iter()
            .find(|&&(n, _)| n == index)
            .map(|&(_, c)| c)
            .unwrap_or_else(|| C64::new(0.0, 0.0))
    }

    /// Bit of basis index `n` at qubit `k` (qubit 0 = most significant).
    pub fn bit(&self, n: usize, k: usize) -> usize {
        bit_of(n, k, self.n_qubits)
    }

    /// Dense 2^N state vector.
    pub fn state_vector(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        for &(n, c) in &self.terms {
            v[n] = c;
        }
        v
    }

    /// GHZ form with the first qubit flipped: (|10...0> + |01...1>)/sqrt(2).
    ///
    /// Unlike the all-zeros/all-ones form, this one admits an
    /// energy-conserving machine.
    pub fn flipped_ghz(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("GHZ needs at least 2 qubits".into()));
        }
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let hi = 1usize << (n - 1); // 10...0
        let lo = hi - 1; // 01...1
        Self::new(n, vec![(hi, s), (lo, s)])
    }

    /// Standard GHZ form (|0...0> + |1...1>)/sqrt(2).
    pub fn standard_ghz(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("GHZ needs at least 2 qubits".into()));
        }
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(n, vec![(0, s), ((1usize << n) - 1, s)])
    }

    /// Dicke state with `l` excitations over `n` qubits; `l = 1` is the W
    /// state.
    pub fn dicke(n: usize, l: usize) -> Result<Self> {
        if n < 2 || l == 0 || l >= n {
            return Err(Error::InvalidInput(format!(
                "Dicke state requires n >= 2 and 1 <= l <= n-1, got n={n}, l={l}"
            )));
        }
        let count = binomial(n, l);
        let amp = C64::new(1.0 / (count as f64).sqrt(), 0.0);
        let terms: Vec<(usize, C64)> = (0..(1usize << n))
            .filter(|idx| idx.count_ones() as usize == l)
            .map(|idx| (idx, amp))
            .collect();
        Self::new(n, terms)
    }

    /// Linear four-qubit cluster state
    /// (|0110> + |0101> + |1010> - |1001>)/2.
    pub fn cluster4() -> Self {
        let a = C64::new(0.5, 0.0);
        Self::from_bitstrings(
            4,
            &[("0110", a), ("0101", a), ("1010", a), ("1001", -a)],
        )
        .expect("static cluster state is valid")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|&(n, c)| {
                let bits: String = (0..self.n_qubits)
                    .map(|k| if bit_of(n, k, self.n_qubits) == 1 { '1' } else { '0' })
                    .collect();
                serde_json::json!({ "bits": bits, "re": c.re, "im": c.im })
            })
            .collect();
        serde_json::json!({ "n_qubits": self.n_qubits, "terms": terms })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let n = v["n_qubits"]
            .as_u64()
            .ok_or_else(|| Error::InvalidInput("missing n_qubits".into()))?
            as usize;
        let raw = v["terms"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("missing terms array".into()))?;
        let mut terms = Vec::with_capacity(raw.len());
        for t in raw {
            let bits = t["bits"]
                .as_str()
                .ok_or_else(|| Error::InvalidInput("term missing bits".into()))?;
            let re = t["re"].as_f64().unwrap_or(0.0);
            let im = t["im"].as_f64().unwrap_or(0.0);
            terms.push((Self::parse_bits(bits, n)?, C64::new(re, im)));
        }
        Self::new(n, terms)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)
            .map_err(|e| Error::InvalidInput(format!("target JSON parse error: {e}")))?;
        Self::from_json(&v)
    }
}

#[inline]
pub(crate) fn bit_of(n: usize, k: usize, n_qubits: usize) -> usize {
    (n >> (n_qubits - 1 - k)) & 1
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Per-site excluded level: the qutrit level that is *not* part of the
/// filtered qubit.
///
/// Entries are restricted to 0 (qubit on levels 1, 2) or 2 (qubit on
/// levels 0, 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelAssignment {
    r: Vec<u8>,
}

impl LevelAssignment {
    pub fn new(r: Vec<u8>) -> Result<Self> {
        if r.is_empty() || r.iter().any(|&x| x != 0 && x != 2) {
            return Err(Error::InvalidInput(
                "level assignment entries must be 0 or 2".into(),
            ));
        }
        Ok(Self { r })
    }

    /// Hot site gets R = 2, all others R = 0.
    pub fn single_hot(n_sites: usize, hot: usize) -> Result<Self> {
        if hot >= n_sites {
            return Err(Error::InvalidInput(format!(
                "hot site {hot} out of range for {n_sites} sites"
            )));
        }
        let mut r = vec![0u8; n_sites];
        r[hot] = 2;
        Self::new(r)
    }

    pub fn n_sites(&self) -> usize {
        self.r.len()
    }

    pub fn entries(&self) -> &[u8] {
        &self.r
    }

    pub fn hot_sites(&self) -> Vec<usize> {
        self.r
            .iter()
            .enumerate()
            .filter(|&(_, &x)| x == 2)
            .map(|(k, _)| k)
            .collect()
    }

    /// Basis index of |R_0 ... R_{N-1}> in the 3^N space.
    pub fn excluded_index(&self) -> usize {
        self.r.iter().fold(0usize, |acc, &x| acc * 3 + x as usize)
    }
}

/// Energy ladders: per-site level energies (0, delta1, delta2) with
/// 0 < delta1 < delta2, in units of hbar = k_B = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySpec {
    delta1: Vec<f64>,
    delta2: Vec<f64>,
}

impl EnergySpec {
    pub fn new(delta1: Vec<f64>, delta2: Vec<f64>) -> Result<Self> {
        if delta1.is_empty() || delta1.len() != delta2.len() {
            return Err(Error::InvalidInput("energy lists empty or mismatched".into()));
        }
        for (&d1, &d2) in delta1.iter().zip(&delta2) {
            if !(d1.is_finite() && d2.is_finite()) || d1 <= 0.0 || d2 <= d1 {
                return Err(Error::InvalidInput(format!(
                    "energies must satisfy 0 < delta1 < delta2, got ({d1}, {d2})"
                )));
            }
        }
        Ok(Self { delta1, delta2 })
    }

    /// Identical ladder on every site.
    pub fn uniform(n_sites: usize, delta1: f64, delta2: f64) -> Result<Self> {
        Self::new(vec![delta1; n_sites], vec![delta2; n_sites])
    }

    pub fn n_sites(&self) -> usize {
        self.delta1.len()
    }

    pub fn delta1(&self) -> &[f64] {
        &self.delta1
    }

    pub fn delta2(&self) -> &[f64] {
        &self.delta2
    }

    /// Energy of `level` (0, 1, 2) at `site`.
    pub fn level_energy(&self, site: usize, level: usize) -> f64 {
        match level {
            0 => 0.0,
            1 => self.delta1[site],
            2 => self.delta2[site],
            _ => panic!("qutrit level out of range"),
        }
    }

    /// Smallest energy gap over all sites (adjacent-level gaps).
    pub fn delta_min(&self) -> f64 {
        self.delta1
            .iter()
            .zip(&self.delta2)
            .map(|(&d1, &d2)| d1.min(d2 - d1))
            .fold(f64::INFINITY, f64::min)
    }

    /// Energy of the 3^N basis state with big-endian digit string `idx`.
    pub fn basis_energy(&self, idx: usize) -> f64 {
        let n = self.n_sites();
        let mut rem = idx;
        let mut e = 0.0;
        for k in (0..n).rev() {
            let digit = rem % 3;
            rem /= 3;
            e += self.level_energy(k, digit);
        }
        e
    }
}

/// Bath temperature: exact zero, finite positive, or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Temperature {
    Zero,
    Finite(f64),
    Infinite,
}

impl Temperature {
    pub fn validate(&self) -> Result<()> {
        if let Temperature::Finite(t) = self {
            if !t.is_finite() || *t <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "finite temperature must be positive, got {t}"
                )));
            }
        }
        Ok(())
    }
}

/// One thermal bath: temperature and reset/transition rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bath {
    pub temperature: Temperature,
    pub rate: f64,
}

/// Per-site bath assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    baths: Vec<Bath>,
}

impl BathSpec {
    pub fn new(baths: Vec<Bath>) -> Result<Self> {
        if baths.is_empty() {
            return Err(Error::InvalidInput("bath list is empty".into()));
        }
        for b in &baths {
            b.temperature.validate()?;
            if !b.rate.is_finite() || b.rate <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "bath rate must be positive and finite, got {}",
                    b.rate
                )));
            }
        }
        Ok(Self { baths })
    }

    /// Hot bath on `hot_site`, cold baths elsewhere.
    pub fn hot_cold(
        n_sites: usize,
        hot_site: usize,
        t_hot: Temperature,
        gamma_h: f64,
        t_cold: Temperature,
        gamma_c: f64,
    ) -> Result<Self> {
        if hot_site >= n_sites {
            return Err(Error::InvalidInput("hot site out of range".into()));
        }
        let baths = (0..n_sites)
            .map(|k| {
                if k == hot_site {
                    Bath { temperature: t_hot, rate: gamma_h }
                } else {
                    Bath { temperature: t_cold, rate: gamma_c }
                }
            })
            .collect();
        Self::new(baths)
    }

    pub fn n_sites(&self) -> usize {
        self.baths.len()
    }

    pub fn baths(&self) -> &[Bath] {
        &self.baths
    }

    pub fn min_rate(&self) -> f64 {
        self.baths.iter().map(|b| b.rate).fold(f64::INFINITY, f64::min)
    }

    pub fn max_rate(&self) -> f64 {
        self.baths.iter().map(|b| b.rate).fold(0.0, f64::max)
    }
}

/// Full machine description: target, level assignment, energies, baths,
/// and the interaction strength.
///
/// Construction verifies that the interaction is energy conserving
/// (max commutator entry at most 1e-10).
#[derive(Debug, Clone, PartialEq)]
pub struct MachineSpec {
    target: TargetState,
    r: LevelAssignment,
    energies: EnergySpec,
    baths: BathSpec,
    g: f64,
}

impl MachineSpec {
    pub fn new(
        target: TargetState,
        r: LevelAssignment,
        energies: EnergySpec,
        baths: BathSpec,
        g: f64,
    ) -> Result<Self> {
        let n = target.n_qubits();
        if r.n_sites() != n || energies.n_sites() != n || baths.n_sites() != n {
            return Err(Error::InvalidInput(
                "target, level assignment, energies, and baths disagree on the site count"
                    .into(),
            ));
        }
        if !g.is_finite() || g < 0.0 {
            return Err(Error::InvalidInput(format!(
                "interaction strength must be nonnegative, got {g}"
            )));
        }
        let spec = Self { target, r, energies, baths, g };
        let defect = spec.commutator_defect();
        if defect > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "interaction is not energy conserving: max commutator entry {defect:.3e}"
            )));
        }
        Ok(spec)
    }

    pub fn target(&self) -> &TargetState {
        &self.target
    }

    pub fn level_assignment(&self) -> &LevelAssignment {
        &self.r
    }

    pub fn energies(&self) -> &EnergySpec {
        &self.energies
    }

    pub fn baths(&self) -> &BathSpec {
        &self.baths
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn n_sites(&self) -> usize {
        self.target.n_qubits()
    }

    pub fn dim(&self) -> usize {
        3usize.pow(self.n_sites() as u32)
    }

    pub fn delta_min(&self) -> f64 {
        self.energies.delta_min()
    }

    /// Whether g and all bath rates sit within 1e-2 of the smallest gap
    /// (the regime where the local master equation is trustworthy).
    pub fn weak_coupling(&self) -> bool {
        let cap = 1e-2 * self.delta_min() * (1.0 + 1e-12);
        self.g <= cap && self.baths.baths().iter().all(|b| b.rate <= cap)
    }

    /// Max |[H_int, H_free]| entry, evaluated on the sparse interaction
    /// entries (H_free is diagonal, so the commutator entry at (i, j) is
    /// H_int(i, j) * (E_j - E_i)).
    pub fn commutator_defect(&self) -> f64 {
        let r_idx = self.r.excluded_index();
        let e_r = self.energies.basis_energy(r_idx);
        let mut worst = 0.0f64;
        for &(n, c) in self.target.terms() {
            let e_n = self.energies.basis_energy(embed_index(n, &self.r, self.n_sites()));
            worst = worst.max((self.g * c.norm() * (e_n - e_r)).abs());
        }
        worst
    }

    pub fn h_free(&self) -> Result<ComplexMatrix> {
        build_h_free(&self.energies)
    }

    pub fn h_int(&self) -> Result<ComplexMatrix> {
        build_h_int(&self.target, &self.r, self.g)
    }

    /// Sparse entries of H_free + H_int (diagonal energies plus the
    /// rank-two interaction).
    pub fn hamiltonian_entries(&self) -> Vec<(usize, usize, C64)> {
        let dim = self.dim();
        let mut entries = Vec::with_capacity(dim + 2 * self.target.terms().len());
        for i in 0..dim {
            let e = self.energies.basis_energy(i);
            if e != 0.0 {
                entries.push((i, i, C64::new(e, 0.0)));
            }
        }
        entries.extend(h_int_entries(&self.target, &self.r, self.g));
        entries
    }

    /// Same machine with new coupling strengths (hot sites take `gamma_h`).
    pub fn with_couplings(&self, gamma_h: f64, gamma_c: f64, g: f64) -> Result<Self> {
        let hot = self.r.hot_sites();
        let baths = (0..self.n_sites())
            .map(|k| Bath {
                temperature: self.baths.baths()[k].temperature,
                rate: if hot.contains(&k) { gamma_h } else { gamma_c },
            })
            .collect();
        Self::new(
            self.target.clone(),
            self.r.clone(),
            self.energies.clone(),
            BathSpec::new(baths)?,
            g,
        )
    }

    /// Same machine with new bath temperatures (hot sites take `t_hot`).
    pub fn with_temperatures(&self, t_hot: Temperature, t_cold: Temperature) -> Result<Self> {
        let hot = self.r.hot_sites();
        let baths = (0..self.n_sites())
            .map(|k| Bath {
                temperature: if hot.contains(&k) { t_hot } else { t_cold },
                rate: self.baths.baths()[k].rate,
            })
            .collect();
        Self::new(
            self.target.clone(),
            self.r.clone(),
            self.energies.clone(),
            BathSpec::new(baths)?,
            self.g,
        )
    }
}

/// Qutrit level for qubit value `b` at a site with excluded level `r_k`:
/// the qubit spans the two levels complementary to `r_k`, ordered low/high.
#[inline]
pub fn embed_digit(r_k: u8, b: usize) -> usize {
    debug_assert!(b < 2);
    if r_k == 2 {
        b
    } else {
        b + 1
    }
}

/// Inverse of [`embed_digit`]; `None` if the digit is the excluded level.
#[inline]
pub fn qubit_digit(r_k: u8, level: usize) -> Option<usize> {
    if level == r_k as usize {
        return None;
    }
    Some(if r_k == 2 { level } else { level - 1 })
}

/// 3^N basis index of the embedded qubit basis state `bits`.
pub fn embed_index(bits: usize, r: &LevelAssignment, n_qubits: usize) -> usize {
    let mut idx = 0usize;
    for k in 0..n_qubits {
        idx = idx * 3 + embed_digit(r.entries()[k], bit_of(bits, k, n_qubits));
    }
    idx
}

/// Embeds the target into the qutrit space as a normalized 3^N vector.
pub fn embed_state(target: &TargetState, r: &LevelAssignment) -> Result<Vec<C64>> {
    let n = target.n_qubits();
    if r.n_sites() != n {
        return Err(Error::InvalidInput("level assignment site count mismatch".into()));
    }
    let dim = 3usize.pow(n as u32);
    let mut v = vec![C64::new(0.0, 0.0); dim];
    for &(bits, c) in target.terms() {
        v[embed_index(bits, r, n)] = c;
    }
    Ok(v)
}

/// Diagonal free Hamiltonian on the 3^N space.
pub fn build_h_free(energies: &EnergySpec) -> Result<ComplexMatrix> {
    let n = energies.n_sites();
    if n > DENSE_SITE_CAP {
        return Err(Error::Capacity { got: n, max: DENSE_SITE_CAP });
    }
    let dim = 3usize.pow(n as u32);
    let diag: Vec<f64> = (0..dim).map(|i| energies.basis_energy(i)).collect();
    Ok(ComplexMatrix::from_real_diag(&diag))
}

/// Sparse entries of the interaction g(|psi_bar><R| + |R><psi_bar|).
pub fn h_int_entries(
    target: &TargetState,
    r: &LevelAssignment,
    g: f64,
) -> Vec<(usize, usize, C64)> {
    if g == 0.0 {
        return Vec::new();
    }
    let n = target.n_qubits();
    let r_idx = r.excluded_index();
    let mut entries = Vec::with_capacity(2 * target.terms().len());
    for &(bits, c) in target.terms() {
        let e = embed_index(bits, r, n);
        entries.push((e, r_idx, c * g));
        entries.push((r_idx, e, c.conj() * g));
    }
    entries
}

/// Dense rank-two interaction Hamiltonian.
pub fn build_h_int(target: &TargetState, r: &LevelAssignment, g: f64) -> Result<ComplexMatrix> {
    let n = target.n_qubits();
    if n > DENSE_SITE_CAP {
        return Err(Error::Capacity { got: n, max: DENSE_SITE_CAP });
    }
    if r.n_sites() != n {
        return Err(Error::InvalidInput("level assignment site count mismatch".into()));
    }
    let dim = 3usize.pow(n as u32);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (i, j, v) in h_int_entries(target, r, g) {
        m[(i, j)] += v;
    }
    Ok(m)
}

/// Max |[H_int, H_free]| entry; energy conservation requires this at most
/// 1e-10.
pub fn check_energy_conservation(h_free: &ComplexMatrix, h_int: &ComplexMatrix) -> f64 {
    h_int.commutator(h_free).max_abs_entry()
}

/// Boltzmann populations of a qutrit with gaps (delta1, delta2) at
/// temperature `t`.
pub fn thermal_populations(delta1: f64, delta2: f64, t: Temperature) -> Result<[f64; 3]> {
    t.validate()?;
    Ok(match t {
        Temperature::Zero => [1.0, 0.0, 0.0],
        Temperature::Infinite => [1.0 / 3.0; 3],
        Temperature::Finite(temp) => {
            let w1 = (-delta1 / temp).exp();
            let w2 = (-delta2 / temp).exp();
            let z = 1.0 + w1 + w2;
            [1.0 / z, w1 / z, w2 / z]
        }
    })
}

/// Thermal qutrit state exp(-H/T)/Z as a density operator.
pub fn thermal_state(delta1: f64, delta2: f64, t: Temperature) -> Result<DensityOperator> {
    if !(delta1.is_finite() && delta2.is_finite()) || delta1 <= 0.0 || delta2 <= delta1 {
        return Err(Error::InvalidInput("thermal state needs 0 < delta1 < delta2".into()));
    }
    let pops = thermal_populations(delta1, delta2, t)?;
    DensityOperator::try_new(
        ComplexMatrix::from_real_diag(&pops),
        vec![3],
        &Tolerances::default(),
    )
}

/// Rewrites a q-hot energy solution into a single-hot one.
///
/// The returned energies keep the first hot site hot and demote the rest,
/// shifting ladders so that the single-hot energy-conservation condition
/// holds whenever the q-hot one did.
pub fn reduce_to_single_hot(
    target: &TargetState,
    energies: &EnergySpec,
    r: &LevelAssignment,
) -> Result<(EnergySpec, LevelAssignment)> {
    let n = target.n_qubits();
    if energies.n_sites() != n || r.n_sites() != n {
        return Err(Error::InvalidInput("site count mismatch".into()));
    }
    let hot = r.hot_sites();
    if hot.is_empty() {
        return Err(Error::InvalidInput("no hot site in the level assignment".into()));
    }

    // Precondition: the q-hot energy-conservation condition holds on the
    // whole support.
    let scale = energies.delta2().iter().fold(1.0f64, |a, &b| a.max(b));
    for &(bits, _) in target.terms() {
        let mut lhs = 0.0;
        for k in 0..n {
            let nk = bit_of(bits, k, n) as f64;
            let (d1, d2) = (energies.delta1()[k], energies.delta2()[k]);
            if hot.contains(&k) {
                lhs += nk * d1 - d2;
            } else {
                lhs += (1.0 - nk) * d1 + nk * d2;
            }
        }
        if lhs.abs() > 1e-9 * scale {
            return Err(Error::InvalidInput(format!(
                "input energies violate the q-hot conservation condition by {lhs:.3e}"
            )));
        }
    }

    if hot.len() == 1 {
        return Ok((energies.clone(), r.clone()));
    }

    let keep = hot[0];
    let mut eps1 = energies.delta1().to_vec();
    let mut eps2 = energies.delta2().to_vec();
    let mut t_sum = 0.0;
    for &k in &hot[1..] {
        let t_k = energies.delta2()[k] + 1.0;
        eps1[k] = t_k - energies.delta2()[k];
        eps2[k] = t_k - energies.delta2()[k] + energies.delta1()[k];
        t_sum += t_k;
    }
    eps2[keep] = energies.delta2()[keep] + t_sum;

    let out = EnergySpec::new(eps1, eps2)?;
    let out_r = LevelAssignment::single_hot(n, keep)?;

    // The construction makes the single-hot condition algebraically equal
    // to the q-hot one; verify to guard against arithmetic slips.
    for &(bits, _) in target.terms() {
        let e_n = out.basis_energy(embed_index(bits, &out_r, n));
        let e_r = out.basis_energy(out_r.excluded_index());
        if (e_n - e_r).abs() > 1e-9 * scale.max(t_sum) {
            return Err(Error::Numerical(
                "single-hot reduction failed the conservation check".into(),
            ));
        }
    }
    Ok((out, out_r))
}

/// Searches for a binary vector r (1 = hot) making the target compatible
/// with identical energy structures across all hot and all cold sites.
///
/// For every support pair, the hot/cold components of the bit difference
/// must either both vanish or have a fixed negative ratio. Exhaustive over
/// r; intended for small N.
pub fn identical_energy_feasibility(target: &TargetState) -> Option<Vec<u8>> {
    let n = target.n_qubits();
    if n < 2 {
        return None;
    }
    let support = target.support();
    let n0 = support[0];
    // Scan order: fewest hot sites first, hot sites as far left as
    // possible within a class. Keeps the returned witness canonical.
    let mut masks: Vec<usize> = (1usize..((1 << n) - 1)).collect();
    masks.sort_by_key(|&m| (m.count_ones(), std::cmp::Reverse(m)));
    'mask: for mask in masks {
        // Differences relative to the first support element determine all
        // pairwise differences.
        let mut reference: Option<(i64, i64)> = None;
        for &s in &support[1..] {
            let mut a = 0i64; // hot component of (n - n0)
            let mut b = 0i64; // cold component
            for k in 0..n {
                let d = bit_of(s, k, n) as i64 - bit_of(n0, k, n) as i64;
                if (mask >> (n - 1 - k)) & 1 == 1 {
                    a += d;
                } else {
                    b += d;
                }
            }
            if a == 0 && b == 0 {
                continue;
            }
            if a == 0 || b == 0 || a * b > 0 {
                continue 'mask; // ratio undefined or nonnegative
            }
            match reference {
                None => reference = Some((a, b)),
                Some((ar, br)) => {
                    if a * br != ar * b {
                        continue 'mask;
                    }
                }
            }
        }
        let r: Vec<u8> = (0..n).map(|k| ((mask >> (n - 1 - k)) & 1) as u8).collect();
        return Some(r);
    }
    None
}

fn default_baths(n: usize, delta_min: f64) -> Result<(BathSpec, f64)> {
    // Couplings sit at the weak-coupling boundary with a small hot/cold
    // ratio, the regime where the heralded state approaches the target.
    let gamma_c = 1e-2 * delta_min;
    let gamma_h = 1e-3 * gamma_c;
    let g = gamma_c;
    let baths = BathSpec::hot_cold(
        n,
        0,
        Temperature::Infinite,
        gamma_h,
        Temperature::Zero,
        gamma_c,
    )?;
    Ok((baths, g))
}

/// Machine generating the N-qubit (flipped-form) GHZ state: hot ladder
/// (1, 2.5), cold ladders scaled so hot transitions are resonant with
/// collective cold ones.
pub fn ghz_machine(n: usize) -> Result<MachineSpec> {
    if n < 2 {
        return Err(Error::InvalidInput("GHZ machine needs n >= 2".into()));
    }
    let target = TargetState::flipped_ghz(n)?;
    let r = LevelAssignment::single_hot(n, 0)?;
    let (dh1, dh2) = (1.0, 2.5);
    let m = (n - 1) as f64;
    let mut d1 = vec![(dh2 - dh1) / m; n];
    let mut d2 = vec![dh2 / m; n];
    d1[0] = dh1;
    d2[0] = dh2;
    let energies = EnergySpec::new(d1, d2)?;
    let (baths, g) = default_baths(n, energies.delta_min())?;
    MachineSpec::new(target, r, energies, baths, g)
}

/// Machine generating the N-qubit Dicke state with `l` excitations
/// (`l = 1` gives the W state). Cold ladders are (1, 2.5); the hot ladder
/// is solved from energy conservation, falling back to the generic
/// feasibility search if the closed forms fail the commutator check.
pub fn dicke_machine(n: usize, l: usize) -> Result<MachineSpec> {
    let target = TargetState::dicke(n, l)?;
    let r = LevelAssignment::single_hot(n, 0)?;
    let (dc1, dc2) = (1.0, 2.5);
    let gap = dc2 - dc1;
    let m = (n - 1) as f64;

    let candidates = [
        // As printed in the source construction.
        (m + (l as f64 - 1.0) * gap, m + l as f64 * gap),
        // Solved directly from the two conservation conditions.
        (gap, m * dc1 + l as f64 * gap),
    ];
    for (dh1, dh2) in candidates {
        if dh1 <= 0.0 || dh2 <= dh1 {
            continue;
        }
        let mut d1 = vec![dc1; n];
        let mut d2 = vec![dc2; n];
        d1[0] = dh1;
        d2[0] = dh2;
        if let Ok(energies) = EnergySpec::new(d1, d2) {
            let (baths, g) = default_baths(n, energies.delta_min())?;
            if let Ok(spec) = MachineSpec::new(target.clone(), r.clone(), energies, baths, g) {
                return Ok(spec);
            }
        }
    }

    let witness = feasibility_single_hot(&target).ok_or_else(|| {
        Error::Infeasible(format!("no energy-conserving machine found for Dicke({n}, {l})"))
    })?;
    let (baths, g) = default_baths(n, witness.energies.delta_min())?;
    MachineSpec::new(target, witness.assignment, witness.energies, baths, g)
}

/// Machine generating the linear four-qubit cluster state. Cold ladders are
/// (1, 2.5); the hot ladder is solved from energy conservation.
pub fn cluster_machine() -> Result<MachineSpec> {
    let target = TargetState::cluster4();
    let r = LevelAssignment::single_hot(4, 0)?;
    let (dc1, dc2) = (1.0, 2.5);
    let gap = dc2 - dc1;

    let candidates = [
        // As printed in the source construction.
        (3.0 + gap, 3.0 + 2.0 * gap),
        // Solved directly from the conservation conditions: the support
        // states carry two cold excitations next to a hot 0, or one cold
        // excitation plus one ground next to a hot 1.
        (gap, dc1 + 2.0 * dc2),
    ];
    for (dh1, dh2) in candidates {
        let d1 = vec![dh1, dc1, dc1, dc1];
        let d2 = vec![dh2, dc2, dc2, dc2];
        if let Ok(energies) = EnergySpec::new(d1, d2) {
            let (baths, g) = default_baths(4, energies.delta_min())?;
            if let Ok(spec) = MachineSpec::new(target.clone(), r.clone(), energies, baths, g) {
                return Ok(spec);
            }
        }
    }

    let witness = feasibility_single_hot(&target)
        .ok_or_else(|| Error::Infeasible("no energy-conserving cluster machine found".into()))?;
    let (baths, g) = default_baths(4, witness.energies.delta_min())?;
    MachineSpec::new(target, witness.assignment, witness.energies, baths, g)
}
