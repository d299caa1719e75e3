//! Coupling and temperature sweeps: fidelity versus success-probability
//! tradeoff fronts and temperature grids, under the weak-coupling
//! constraint g, gamma_k <= 1e-2 * delta_min.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::bell::{
    cluster_bell_value, cluster_frame_rotation, default_mermin_settings, fmt_sig, mermin_value,
};
use crate::builder::{cluster_machine, dicke_machine, ghz_machine, MachineSpec, Temperature};
use crate::dynamics::{
    lindblad_liouvillian, reset_liouvillian, steady_state, JumpConfig, Model, SITE_CAP,
};
use crate::error::{Error, Result};
use crate::filtering::{apply_filter, fidelity};

/// Preset machine family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum MachineFamily {
    Ghz { n: usize },
    Dicke { n: usize, l: usize },
    Cluster,
}

impl MachineFamily {
    pub fn machine(&self) -> Result<MachineSpec> {
        match *self {
            MachineFamily::Ghz { n } => ghz_machine(n),
            MachineFamily::Dicke { n, l } => dicke_machine(n, l),
            MachineFamily::Cluster => cluster_machine(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        match *self {
            MachineFamily::Ghz { n } => n,
            MachineFamily::Dicke { n, .. } => n,
            MachineFamily::Cluster => 4,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            MachineFamily::Ghz { .. } => "ghz",
            MachineFamily::Dicke { .. } => "dicke",
            MachineFamily::Cluster => "cluster",
        }
    }

    pub fn excitations(&self) -> Option<usize> {
        match *self {
            MachineFamily::Dicke { l, .. } => Some(l),
            _ => None,
        }
    }
}

impl std::fmt::Display for MachineFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            MachineFamily::Ghz { n } => write!(f, "ghz({n})"),
            MachineFamily::Dicke { n, l } => write!(f, "dicke({n},{l})"),
            MachineFamily::Cluster => write!(f, "cluster"),
        }
    }
}

/// One evaluated coupling point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub gamma_h: f64,
    pub gamma_c: f64,
    pub g: f64,
    pub p_suc: f64,
    pub fidelity: f64,
    pub bell_value: Option<f64>,
}

/// Points not dominated in (p_suc, score), sorted by ascending p_suc with
/// non-increasing score.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    points: Vec<SweepPoint>,
}

impl ParetoFront {
    pub fn points(&self) -> &[SweepPoint] {
        &self.points
    }

    pub fn max_p_suc(&self) -> f64 {
        self.points.last().map(|p| p.p_suc).unwrap_or(0.0)
    }

    pub fn max_fidelity(&self) -> f64 {
        self.points.first().map(|p| p.fidelity).unwrap_or(0.0)
    }
}

/// Sweep controls; the defaults match the published constraint and grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Grid points per axis before refinement.
    pub resolution: usize,
    /// Run the local refinement pass on retained points.
    pub refine: bool,
    /// Log-range of gamma_h / gamma_c.
    pub ratio_gamma: (f64, f64),
    /// Log-range of g / gamma_c.
    pub ratio_g: (f64, f64),
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            resolution: 25,
            refine: true,
            ratio_gamma: (1e-6, 1e3),
            ratio_g: (1e-3, 1e3),
        }
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Scalarization weights swept during refinement.
const REFINE_LAMBDAS: [f64; 4] = [0.0, 0.25, 1.0, 4.0];
const REFINE_ITERATIONS: usize = 20;
const REFINE_GROW: f64 = 1.3;
const REFINE_SHRINK: f64 = 0.7;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Score {
    Fidelity,
    Bell,
}

fn score_of(p: &SweepPoint, score: Score) -> f64 {
    match score {
        Score::Fidelity => p.fidelity,
        Score::Bell => p.bell_value.unwrap_or(f64::NEG_INFINITY),
    }
}

/// Removes dominated points; ties collapse to the first in canonical
/// order, so the result is independent of the input ordering.
fn prune(mut points: Vec<SweepPoint>, score: Score) -> Vec<SweepPoint> {
    points.sort_by(|a, b| {
        b.p_suc
            .partial_cmp(&a.p_suc)
            .unwrap()
            .then(score_of(b, score).partial_cmp(&score_of(a, score)).unwrap())
            .then(a.gamma_h.partial_cmp(&b.gamma_h).unwrap())
            .then(a.g.partial_cmp(&b.g).unwrap())
    });
    let mut kept: Vec<SweepPoint> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for p in points {
        let s = score_of(&p, score);
        if s > best {
            best = s;
            kept.push(p);
        }
    }
    kept.reverse();
    kept
}

/// Public pruning entry point on the fidelity score (used by tests and
/// the front assembly).
pub fn pareto_prune(points: Vec<SweepPoint>) -> Vec<SweepPoint> {
    prune(points, Score::Fidelity)
}

struct Evaluator {
    base: MachineSpec,
    family: MachineFamily,
    with_bell: bool,
}

impl Evaluator {
    fn new(family: MachineFamily, with_bell: bool) -> Result<Self> {
        let n = family.n_qubits();
        if n > SITE_CAP {
            return Err(Error::Capacity { got: n, max: SITE_CAP });
        }
        let base = family.machine()?;
        Ok(Self { base, family, with_bell })
    }

    /// Realizes the requested rate ratios within the weak-coupling
    /// constraint.
    ///
    /// The tradeoff depends only on the ratios among (gamma_h, gamma_c, g)
    /// (time-unit freedom), so the whole triple is scaled to put its
    /// largest member exactly at the boundary 1e-2 * delta_min; the cold
    /// rate sits at the boundary itself whenever both ratios are at most
    /// one.
    fn couplings(&self, ratio_gh: f64, ratio_g: f64) -> (f64, f64, f64) {
        let cap = 1e-2 * self.base.delta_min();
        let scale = cap / ratio_gh.max(ratio_g).max(1.0);
        (ratio_gh * scale, scale, ratio_g * scale)
    }

    /// Solves one ratio point; `None` when the herald never fires.
    fn eval(&self, ratio_gh: f64, ratio_g: f64) -> Result<Option<SweepPoint>> {
        let (gamma_h, gamma_c, g) = self.couplings(ratio_gh, ratio_g);
        let spec = self.base.with_couplings(gamma_h, gamma_c, g)?;
        let l = reset_liouvillian(&spec)?;
        let rho = steady_state(&l)?;
        let outcome = match apply_filter(&rho, spec.level_assignment()) {
            Ok(o) => o,
            Err(Error::HeraldNeverFires(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let f = fidelity(&outcome.heralded, spec.target())?;
        let bell_value = if self.with_bell {
            Some(match self.family {
                MachineFamily::Cluster => {
                    cluster_bell_value(&cluster_frame_rotation(&outcome.heralded)?)?
                }
                _ => {
                    let settings = default_mermin_settings(self.family.n_qubits())?;
                    mermin_value(&outcome.heralded, &settings)?
                }
            })
        } else {
            None
        };
        Ok(Some(SweepPoint {
            gamma_h,
            gamma_c,
            g,
            p_suc: outcome.p_suc,
            fidelity: f,
            bell_value,
        }))
    }
}

fn sweep_front(
    family: MachineFamily,
    config: &SweepConfig,
    score: Score,
) -> Result<Vec<SweepPoint>> {
    let with_bell = score == Score::Bell;
    let ev = Evaluator::new(family, with_bell)?;

    let mut grid: Vec<(f64, f64)> = Vec::new();
    for ratio_g in log_grid(config.ratio_g.0, config.ratio_g.1, config.resolution) {
        for ratio_gh in log_grid(config.ratio_gamma.0, config.ratio_gamma.1, config.resolution) {
            grid.push((ratio_gh, ratio_g));
        }
    }

    let evaluated: Vec<Option<SweepPoint>> = grid
        .par_iter()
        .map(|&(rgh, rg)| ev.eval(rgh, rg))
        .collect::<Result<Vec<_>>>()?;
    let mut pool: Vec<SweepPoint> = evaluated.into_iter().flatten().collect();

    if config.refine {
        let retained = prune(pool.clone(), score);
        let bounds = [config.ratio_gamma, config.ratio_g];
        let refined: Vec<Vec<SweepPoint>> = retained
            .par_iter()
            .flat_map(|p| REFINE_LAMBDAS.par_iter().map(move |&lambda| (p, lambda)))
            .map(|(p, lambda)| refine_point(&ev, *p, lambda, bounds, score))
            .collect::<Result<Vec<_>>>()?;
        for mut chunk in refined {
            pool.append(&mut chunk);
        }
    }

    Ok(prune(pool, score))
}

/// Derivative-free coordinate descent on the log rate ratios, maximizing
/// score + lambda * p_suc. All evaluated points are returned so the front
/// can absorb them.
fn refine_point(
    ev: &Evaluator,
    start: SweepPoint,
    lambda: f64,
    bounds: [(f64, f64); 2],
    score: Score,
) -> Result<Vec<SweepPoint>> {
    let objective = |p: &SweepPoint| score_of(p, score) + lambda * p.p_suc;
    let mut visited = Vec::new();
    let mut cache: HashMap<(u64, u64), Option<SweepPoint>> = HashMap::new();
    let mut cur = [
        (start.gamma_h / start.gamma_c).ln(),
        (start.g / start.gamma_c).ln(),
    ];
    let mut cur_obj = objective(&start);
    let mut steps = [REFINE_GROW.ln(), REFINE_GROW.ln()];

    for _ in 0..REFINE_ITERATIONS {
        for coord in 0..2 {
            let mut improved = false;
            for dir in [1.0, -1.0] {
                let mut cand = cur;
                cand[coord] = (cand[coord] + dir * steps[coord])
                    .min(bounds[coord].1.ln())
                    .max(bounds[coord].0.ln());
                if cand[coord] == cur[coord] {
                    continue;
                }
                let key = (cand[0].to_bits(), cand[1].to_bits());
                let point = match cache.entry(key) {
                    std::collections::hash_map::Entry::Occupied(e) => *e.get(),
                    std::collections::hash_map::Entry::Vacant(slot) => {
                        let p = ev.eval(cand[0].exp(), cand[1].exp())?;
                        if let Some(p) = p {
                            visited.push(p);
                        }
                        *slot.insert(p)
                    }
                };
                if let Some(p) = point {
                    if objective(&p) > cur_obj {
                        cur = cand;
                        cur_obj = objective(&p);
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                steps[coord] *= REFINE_SHRINK;
            }
        }
    }
    Ok(visited)
}

/// Fidelity-versus-success-probability front at extremal temperatures,
/// over a log grid of rate ratios with one local refinement pass.
pub fn pareto_front(family: MachineFamily, resolution: usize) -> Result<ParetoFront> {
    pareto_front_with(family, &SweepConfig { resolution, ..SweepConfig::default() })
}

pub fn pareto_front_with(family: MachineFamily, config: &SweepConfig) -> Result<ParetoFront> {
    Ok(ParetoFront { points: sweep_front(family, config, Score::Fidelity)? })
}

/// Same sweep with the Bell score evaluated on every heralded state; the
/// returned points form the (p_suc, Bell) front.
pub fn bell_sweep(family: MachineFamily, resolution: usize) -> Result<Vec<SweepPoint>> {
    bell_sweep_with(family, &SweepConfig { resolution, ..SweepConfig::default() })
}

pub fn bell_sweep_with(family: MachineFamily, config: &SweepConfig) -> Result<Vec<SweepPoint>> {
    sweep_front(family, config, Score::Bell)
}

/// Fidelity (and success probability) across a temperature grid at fixed
/// couplings.
#[derive(Debug, Clone)]
pub struct TemperatureSweep {
    pub model: Model,
    pub t_hot: Vec<Temperature>,
    pub t_cold: Vec<Temperature>,
    /// fidelity[i][j] corresponds to (t_hot[i], t_cold[j]).
    pub fidelity: Vec<Vec<f64>>,
    pub p_suc: Vec<Vec<f64>>,
}

impl TemperatureSweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_hot,t_cold,p_suc,fidelity\n");
        for (i, th) in self.t_hot.iter().enumerate() {
            for (j, tc) in self.t_cold.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_temperature(*th),
                    fmt_temperature(*tc),
                    fmt_sig(self.p_suc[i][j]),
                    fmt_sig(self.fidelity[i][j]),
                ));
            }
        }
        out
    }
}

pub fn fmt_temperature(t: Temperature) -> String {
    match t {
        Temperature::Zero => "0".into(),
        Temperature::Infinite => "inf".into(),
        Temperature::Finite(x) => fmt_sig(x),
    }
}

/// Solves the machine across a (t_hot, t_cold) grid under the chosen
/// model and scores the heralded state.
pub fn temperature_sweep(
    spec: &MachineSpec,
    model: Model,
    t_hot: &[Temperature],
    t_cold: &[Temperature],
) -> Result<TemperatureSweep> {
    if spec.n_sites() > SITE_CAP {
        return Err(Error::Capacity { got: spec.n_sites(), max: SITE_CAP });
    }
    let grid: Vec<(usize, usize)> = (0..t_hot.len())
        .flat_map(|i| (0..t_cold.len()).map(move |j| (i, j)))
        .collect();
    let cells: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&(i, j)| -> Result<(f64, f64)> {
            let machine = spec.with_temperatures(t_hot[i], t_cold[j])?;
            let l = match model {
                Model::Reset => reset_liouvillian(&machine)?,
                Model::Lindblad => {
                    lindblad_liouvillian(&machine, &JumpConfig::default_for(&machine))?
                }
            };
            let rho = steady_state(&l)?;
            let outcome = apply_filter(&rho, machine.level_assignment())?;
            let f = fidelity(&outcome.heralded, machine.target())?;
            Ok((outcome.p_suc, f))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut fid = vec![vec![0.0; t_cold.len()]; t_hot.len()];
    let mut psuc = vec![vec![0.0; t_cold.len()]; t_hot.len()];
    for (&(i, j), &(p, f)) in grid.iter().zip(&cells) {
        fid[i][j] = f;
        psuc[i][j] = p;
    }
    Ok(TemperatureSweep {
        model,
        t_hot: t_hot.to_vec(),
        t_cold: t_cold.to_vec(),
        fidelity: fid,
        p_suc: psuc,
    })
}

/// CSV serialization of a front:
/// machine,N,l,gamma_h,gamma_c,g,p_suc,fidelity[,bell_value].
pub fn front_csv(family: MachineFamily, points: &[SweepPoint], with_bell: bool) -> String {
    let mut out = String::from("machine,N,l,gamma_h,gamma_c,g,p_suc,fidelity");
    if with_bell {
        out.push_str(",bell_value");
    }
    out.push('\n');
    let l_field = family.excitations().map(|l| l.to_string()).unwrap_or_default();
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}",
            family.label(),
            family.n_qubits(),
            l_field,
            fmt_sig(p.gamma_h),
            fmt_sig(p.gamma_c),
            fmt_sig(p.g),
            fmt_sig(p.p_suc),
            fmt_sig(p.fidelity),
        ));
        if with_bell {
            out.push(',');
            out.push_str(&fmt_sig(p.bell_value.unwrap_or(f64::NAN)));
        }
        out.push('\n');
    }
    out
}
