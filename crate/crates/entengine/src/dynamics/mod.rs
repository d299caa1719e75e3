//! Machine dynamics: reset-model and Lindblad-form generators, the
//! steady-state solve, and a time-evolution integrator used as an
//! independent cross-check.

mod evolve;
mod steady;

pub use evolve::{evolve, stable_step};
pub use steady::steady_state;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::builder::{thermal_populations, MachineSpec, Temperature};
use crate::error::{Error, Result};
use crate::qcore::{Liouvillian, SparseComplexMatrix};

/// Dense-superoperator pathway is limited to 3^5 sites (dim^2 = 59049).
pub const SITE_CAP: usize = 5;

/// Which master-equation model generates the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Reset,
    Lindblad,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Model::Reset => write!(f, "reset"),
            Model::Lindblad => write!(f, "lindblad"),
        }
    }
}

/// One bath-coupled transition of a qutrit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub lower: u8,
    pub upper: u8,
    /// Bare transition rate (the Bose factor is applied per direction).
    pub rate: f64,
}

/// Per-site transition sets for the Lindblad-form model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpConfig {
    transitions: Vec<Vec<Jump>>,
}

impl JumpConfig {
    pub fn new(transitions: Vec<Vec<Jump>>) -> Result<Self> {
        for site in &transitions {
            for j in site {
                if j.lower >= j.upper || j.upper > 2 {
                    return Err(Error::InvalidInput(format!(
                        "invalid transition pair ({}, {})",
                        j.lower, j.upper
                    )));
                }
                if !j.rate.is_finite() || j.rate <= 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "transition rate must be positive, got {}",
                        j.rate
                    )));
                }
            }
        }
        Ok(Self { transitions })
    }

    /// Default coupling: each qutrit couples its (0,1) and (0,2) transitions
    /// to its bath at the bath rate; the (1,2) transition is suppressed.
    pub fn default_for(spec: &MachineSpec) -> Self {
        Self::uniform_pairs(spec, &[(0, 1), (0, 2)]).expect("static pairs are valid")
    }

    /// The same transition pairs on every site, at each site's bath rate.
    pub fn uniform_pairs(spec: &MachineSpec, pairs: &[(u8, u8)]) -> Result<Self> {
        let transitions = spec
            .baths()
            .baths()
            .iter()
            .map(|b| {
                pairs
                    .iter()
                    .map(|&(lower, upper)| Jump { lower, upper, rate: b.rate })
                    .collect()
            })
            .collect();
        Self::new(transitions)
    }

    pub fn site_transitions(&self, site: usize) -> &[Jump] {
        &self.transitions[site]
    }

    pub fn n_sites(&self) -> usize {
        self.transitions.len()
    }
}

/// Bose-Einstein occupation for a transition of energy `e` at temperature
/// `t`; `None` encodes the infinite-temperature limit where upward and
/// downward effective rates coincide.
fn bose_occupation(e: f64, t: Temperature) -> Option<f64> {
    match t {
        Temperature::Zero => Some(0.0),
        Temperature::Infinite => None,
        Temperature::Finite(temp) => Some(1.0 / ((e / temp).exp() - 1.0)),
    }
}

struct SuperOpAssembler {
    dim: usize,
    triplets: Vec<(usize, usize, C64)>,
}

impl SuperOpAssembler {
    fn new(dim: usize, capacity: usize) -> Self {
        Self { dim, triplets: Vec::with_capacity(capacity) }
    }

    #[inline]
    fn vec_index(&self, row: usize, col: usize) -> usize {
        col * self.dim + row
    }

    /// Adds w * vec(A rho) for a sparse A.
    fn add_left(&mut self, a: &[(usize, usize, C64)], w: C64) {
        for &(r, c, v) in a {
            for j in 0..self.dim {
                self.triplets.push((self.vec_index(r, j), self.vec_index(c, j), w * v));
            }
        }
    }

    /// Adds w * vec(rho B) for a sparse B.
    fn add_right(&mut self, b: &[(usize, usize, C64)], w: C64) {
        for &(r, c, v) in b {
            for i in 0..self.dim {
                self.triplets.push((self.vec_index(i, c), self.vec_index(i, r), w * v));
            }
        }
    }

    /// Adds w * vec(A rho A†) for a sparse A.
    fn add_sandwich(&mut self, a: &[(usize, usize, C64)], w: C64) {
        for &(x, p, v1) in a {
            for &(y, q, v2) in a {
                self.triplets.push((
                    self.vec_index(x, y),
                    self.vec_index(p, q),
                    w * v1 * v2.conj(),
                ));
            }
        }
    }

    /// Adds w times the identity superoperator.
    fn add_identity(&mut self, w: C64) {
        for k in 0..self.dim * self.dim {
            self.triplets.push((k, k, w));
        }
    }

    /// Adds the commutator part -i [H, rho] for a sparse Hamiltonian.
    fn add_hamiltonian(&mut self, h: &[(usize, usize, C64)]) {
        let mi = C64::new(0.0, -1.0);
        self.add_left(h, mi);
        self.add_right(h, -mi);
    }

    fn finish(self, site_dims: Vec<usize>) -> Result<Liouvillian> {
        let d2 = self.dim * self.dim;
        let action = SparseComplexMatrix::from_triplets(d2, d2, self.triplets)?;
        Liouvillian::new(site_dims, action)
    }
}

fn check_capacity(spec: &MachineSpec) -> Result<(usize, usize, Vec<usize>)> {
    let n = spec.n_sites();
    if n > SITE_CAP {
        return Err(Error::Capacity { got: n, max: SITE_CAP });
    }
    let dim = spec.dim();
    Ok((n, dim, vec![3usize; n]))
}

/// Stride of site `k` in the big-endian base-3 index.
#[inline]
fn stride(n_sites: usize, k: usize) -> usize {
    3usize.pow((n_sites - 1 - k) as u32)
}

#[inline]
fn digit(idx: usize, s: usize) -> usize {
    (idx / s) % 3
}

/// Reset-model generator:
/// L[rho] = -i[H, rho] + sum_k gamma_k (tau_k ⊗_k Tr_k rho - rho).
pub fn reset_liouvillian(spec: &MachineSpec) -> Result<Liouvillian> {
    let (n, dim, site_dims) = check_capacity(spec)?;
    let mut asm = SuperOpAssembler::new(dim, (n + 3) * dim * dim);

    asm.add_hamiltonian(&spec.hamiltonian_entries());

    let mut gamma_total = 0.0;
    for k in 0..n {
        let bath = spec.baths().baths()[k];
        let tau = thermal_populations(
            spec.energies().delta1()[k],
            spec.energies().delta2()[k],
            bath.temperature,
        )?;
        gamma_total += bath.rate;
        let s = stride(n, k);
        // tau_k ⊗_k Tr_k(rho): output entry (a + (m-l)s, b + (m-l)s) picks
        // up tau_m * rho(a, b) whenever the k digits of a and b agree (= l).
        for a in 0..dim {
            let la = digit(a, s);
            for b in 0..dim {
                if digit(b, s) != la {
                    continue;
                }
                let col = asm.vec_index(a, b);
                for (m, &tm) in tau.iter().enumerate() {
                    if tm == 0.0 {
                        continue;
                    }
                    let shift = (m as isize - la as isize) * s as isize;
                    let i = (a as isize + shift) as usize;
                    let j = (b as isize + shift) as usize;
                    let row = asm.vec_index(i, j);
                    asm.triplets.push((row, col, C64::new(bath.rate * tm, 0.0)));
                }
            }
        }
    }
    asm.add_identity(C64::new(-gamma_total, 0.0));

    asm.finish(site_dims)
}

/// Lindblad-form generator with Bose-weighted upward/downward jumps:
/// L[rho] = -i[H, rho]
///        + sum Gamma n_B D[A+] rho + sum Gamma (1 + n_B) D[A-] rho,
/// with D[A] rho = A rho A† - {A†A, rho}/2.
///
/// At infinite temperature both directions use the bare rate (the limit of
/// equal upward and downward effective rates).
pub fn lindblad_liouvillian(spec: &MachineSpec, jumps: &JumpConfig) -> Result<Liouvillian> {
    let (n, dim, site_dims) = check_capacity(spec)?;
    if jumps.n_sites() != n {
        return Err(Error::InvalidInput("jump config site count mismatch".into()));
    }
    let mut asm = SuperOpAssembler::new(dim, (2 * n + 3) * dim * dim);

    asm.add_hamiltonian(&spec.hamiltonian_entries());

    for k in 0..n {
        let temp = spec.baths().baths()[k].temperature;
        let s = stride(n, k);
        for jump in jumps.site_transitions(k) {
            let e = spec.energies().level_energy(k, jump.upper as usize)
                - spec.energies().level_energy(k, jump.lower as usize);
            let (rate_up, rate_down) = match bose_occupation(e, temp) {
                Some(nb) => (jump.rate * nb, jump.rate * (1.0 + nb)),
                None => (jump.rate, jump.rate),
            };

            // Lowering operator |lo><hi| embedded at site k.
            let lower_entries: Vec<(usize, usize, C64)> = (0..dim)
                .filter(|&idx| digit(idx, s) == jump.upper as usize)
                .map(|idx| {
                    let to =
                        (idx as isize + (jump.lower as isize - jump.upper as isize) * s as isize)
                            as usize;
                    (to, idx, C64::new(1.0, 0.0))
                })
                .collect();
            let raise_entries: Vec<(usize, usize, C64)> =
                lower_entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect();

            for (op, rate) in [(&lower_entries, rate_down), (&raise_entries, rate_up)] {
                if rate == 0.0 {
                    continue;
                }
                let w = C64::new(rate, 0.0);
                asm.add_sandwich(op, w);
                // A†A is diagonal: projector onto the source level.
                let proj: Vec<(usize, usize, C64)> =
                    op.iter().map(|&(_, c, _)| (c, c, C64::new(1.0, 0.0))).collect();
                asm.add_left(&proj, w * -0.5);
                asm.add_right(&proj, w * -0.5);
            }
        }
    }

    asm.finish(site_dims)
}
