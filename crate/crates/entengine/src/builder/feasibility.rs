//! Linear feasibility of the energy-conservation conditions with a single
//! hot site.
//!
//! For a candidate hot site k', the condition that every embedded support
//! state is degenerate with |R> is linear in the level energies. Strict
//! positivity and ordering are enforced through a fixed margin (the
//! conditions are scale-free, so the margin size is arbitrary), and the
//! system is solved by a phase-1 simplex. A found witness is averaged over
//! the support's cold-site symmetries, which keeps it feasible (the
//! constraint set is convex and permutation-covariant) and makes symmetric
//! targets yield symmetric ladders.

use super::simplex::phase1_feasible;
use super::{bit_of, EnergySpec, LevelAssignment, TargetState};

/// Margin enforcing the strict inequalities 0 < delta1 < delta2.
const MARGIN: f64 = 0.1;

/// Number of sites up to which cold-site support automorphisms are
/// enumerated ((N-1)! permutations).
const SYMMETRIZE_SITE_CAP: usize = 8;

/// A feasible single-hot machine skeleton: hot site, energies, assignment.
#[derive(Debug, Clone)]
pub struct FeasibilityWitness {
    pub hot_site: usize,
    pub energies: EnergySpec,
    pub assignment: LevelAssignment,
}

/// Searches hot-site candidates in ascending order and returns the first
/// one admitting energy-conserving ladders, or `None` if the target cannot
/// be generated with a single hot site (equivalently, at all).
///
/// The verdict depends only on the support set, not the amplitudes.
pub fn feasibility_single_hot(target: &TargetState) -> Option<FeasibilityWitness> {
    let n = target.n_qubits();
    for hot in 0..n {
        if let Some(energies) = try_hot_site(target, hot) {
            let assignment =
                LevelAssignment::single_hot(n, hot).expect("hot index is in range");
            return Some(FeasibilityWitness { hot_site: hot, energies, assignment });
        }
    }
    None
}

fn try_hot_site(target: &TargetState, hot: usize) -> Option<EnergySpec> {
    let n = target.n_qubits();
    let support = target.support();

    // Variables x = (u_0..u_{n-1}, v_0..v_{n-1}) >= 0 with
    // delta1_k = u_k + MARGIN, delta2_k = delta1_k + v_k + MARGIN.
    let mut a = Vec::with_capacity(support.len());
    let mut b = Vec::with_capacity(support.len());
    for &s in &support {
        let mut row = vec![0.0f64; 2 * n];
        let mut cst = 0.0f64;
        for k in 0..n {
            let nk = bit_of(s, k, n) as f64;
            if k == hot {
                row[k] = nk - 1.0;
                row[n + k] = -1.0;
                cst += (nk - 2.0) * MARGIN;
            } else {
                row[k] = 1.0;
                row[n + k] = nk;
                cst += (1.0 + nk) * MARGIN;
            }
        }
        a.push(row);
        b.push(-cst);
    }

    let x = phase1_feasible(&a, &b)?;
    let mut d1: Vec<f64> = (0..n).map(|k| x[k] + MARGIN).collect();
    let mut d2: Vec<f64> = (0..n).map(|k| d1[k] + x[n + k] + MARGIN).collect();

    symmetrize(target, hot, &mut d1, &mut d2);

    // Pin the global scale: smallest gap equals one.
    let spec = EnergySpec::new(d1.clone(), d2.clone()).ok()?;
    let scale = spec.delta_min();
    for k in 0..n {
        d1[k] /= scale;
        d2[k] /= scale;
    }
    let spec = EnergySpec::new(d1, d2).ok()?;

    // The simplex solution satisfies the equalities to roundoff; reject
    // anything worse in case of a degenerate tableau.
    let r = LevelAssignment::single_hot(n, hot).ok()?;
    let e_r = spec.basis_energy(r.excluded_index());
    let worst = support
        .iter()
        .map(|&s| (spec.basis_energy(super::embed_index(s, &r, n)) - e_r).abs())
        .fold(0.0f64, f64::max);
    if worst > 1e-9 * e_r.max(1.0) {
        return None;
    }
    Some(spec)
}

/// Averages the witness over permutations of cold sites that map the
/// support set onto itself.
fn symmetrize(target: &TargetState, hot: usize, d1: &mut [f64], d2: &mut [f64]) {
    let n = target.n_qubits();
    if n > SYMMETRIZE_SITE_CAP {
        return;
    }
    let support: Vec<usize> = target.support();
    let mut sorted_support = support.clone();
    sorted_support.sort_unstable();

    let cold: Vec<usize> = (0..n).filter(|&k| k != hot).collect();
    let mut accum1 = vec![0.0f64; n];
    let mut accum2 = vec![0.0f64; n];
    let mut count = 0usize;

    let mut perm = cold.clone();
    permute_all(&mut perm, 0, &mut |p| {
        // Full site map: hot fixed, cold site cold[i] -> p[i].
        let mut site_map = vec![0usize; n];
        site_map[hot] = hot;
        for (i, &src) in cold.iter().enumerate() {
            site_map[src] = p[i];
        }
        // The permuted support: bit at site k moves to site_map[k].
        let mut mapped: Vec<usize> = support
            .iter()
            .map(|&s| {
                let mut out = 0usize;
                for k in 0..n {
                    if bit_of(s, k, n) == 1 {
                        out |= 1 << (n - 1 - site_map[k]);
                    }
                }
                out
            })
            .collect();
        mapped.sort_unstable();
        if mapped == sorted_support {
            for k in 0..n {
                accum1[site_map[k]] += d1[k];
                accum2[site_map[k]] += d2[k];
            }
            count += 1;
        }
    });

    if count > 1 {
        for k in 0..n {
            d1[k] = accum1[k] / count as f64;
            d2[k] = accum2[k] / count as f64;
        }
    }
}

/// Calls `f` with every permutation of `items` (recursive swaps).
fn permute_all(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    let n = items.len();
    if k == n.saturating_sub(1) || n == 0 {
        f(items);
        return;
    }
    for i in k..n {
        items.swap(k, i);
        permute_all(items, k + 1, f);
        items.swap(k, i);
    }
}
