//! Bell-expression evaluation on heralded states: a multi-party
//! Mermin-type expression with fixed per-party observables, and the
//! four-qubit cluster-state operator.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qcore::{kron, trace_product, ComplexMatrix, DensityOperator, Tolerances};

/// Local-hidden-variable bound of the Mermin-type expression.
pub const MERMIN_LHV_BOUND: f64 = 1.0;
/// Local-hidden-variable bound of the cluster operator.
pub const CLUSTER_LHV_BOUND: f64 = 2.0;

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::try_from_vec(
        2,
        2,
        vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    )
    .expect("static matrix")
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::try_from_vec(
        2,
        2,
        vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
    )
    .expect("static matrix")
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}

/// Two single-qubit binary observables per party, as explicit 2x2
/// Hermitian matrices squaring to the identity.
#[derive(Debug, Clone)]
pub struct MeasurementSettings {
    per_party: Vec<[ComplexMatrix; 2]>,
}

impl MeasurementSettings {
    pub fn new(per_party: Vec<[ComplexMatrix; 2]>) -> Result<Self> {
        if per_party.is_empty() {
            return Err(Error::InvalidInput("settings need at least one party".into()));
        }
        let id = ComplexMatrix::identity(2);
        for (k, pair) in per_party.iter().enumerate() {
            for (s, obs) in pair.iter().enumerate() {
                if obs.rows() != 2 || obs.cols() != 2 {
                    return Err(Error::InvalidInput(format!(
                        "observable {s} of party {k} is not 2x2"
                    )));
                }
                if obs.hermiticity_defect() > 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "observable {s} of party {k} is not Hermitian"
                    )));
                }
                if obs.matmul(obs).max_abs_diff(&id) > 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "observable {s} of party {k} does not square to the identity"
                    )));
                }
            }
        }
        Ok(Self { per_party })
    }

    pub fn n_parties(&self) -> usize {
        self.per_party.len()
    }

    pub fn observable(&self, party: usize, setting: usize) -> &ComplexMatrix {
        &self.per_party[party][setting]
    }
}

/// The observables that maximally violate the Mermin-type expression on
/// GHZ states, for 2 to 4 parties.
pub fn default_mermin_settings(n: usize) -> Result<MeasurementSettings> {
    let sx = sigma_x();
    let sy = sigma_y();
    let sz = sigma_z();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mix = |a: &ComplexMatrix, b: &ComplexMatrix, sign: f64| {
        a.add(&b.scale(C64::new(sign, 0.0))).scale(C64::new(s, 0.0))
    };
    let parties = match n {
        2 => vec![
            [sz.clone(), sx.clone()],
            [mix(&sz, &sx, 1.0), mix(&sz, &sx, -1.0)],
        ],
        3 => vec![
            [sx.clone(), sy.clone()],
            [sx.clone(), sy.clone()],
            [sx.clone(), sy.clone()],
        ],
        4 => {
            let rotated = [mix(&sx, &sy, 1.0), mix(&sx, &sy, -1.0)];
            vec![
                [sx.clone(), sy.clone()],
                rotated.clone(),
                rotated.clone(),
                rotated,
            ]
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "default settings cover 2 to 4 parties, got {n}"
            )))
        }
    };
    MeasurementSettings::new(parties)
}

/// Mermin-type expression
/// (1/2^N) sum_x |< prod_k (A_0^(k) + (-1)^{x_k} A_1^(k)) >|;
/// local hidden-variable models stay at or below one.
pub fn mermin_value(rho: &DensityOperator, settings: &MeasurementSettings) -> Result<f64> {
    let n = settings.n_parties();
    let dim = 1usize << n;
    if rho.dim() != dim {
        return Err(Error::InvalidInput(format!(
            "state dimension {} does not match {n} parties",
            rho.dim()
        )));
    }
    let mut total = 0.0;
    for x in 0..(1usize << n) {
        let mut op: Option<ComplexMatrix> = None;
        for k in 0..n {
            let sign = if (x >> (n - 1 - k)) & 1 == 1 { -1.0 } else { 1.0 };
            let factor = settings
                .observable(k, 0)
                .add(&settings.observable(k, 1).scale(C64::new(sign, 0.0)));
            op = Some(match op {
                None => factor,
                Some(m) => kron(&m, &factor),
            });
        }
        let expect = trace_product(rho.matrix(), &op.expect("n >= 1"));
        total += expect.re.abs();
    }
    Ok(total / (1usize << n) as f64)
}

/// Correlator <A_{x_1} ⊗ ... ⊗ A_{x_N}> for one setting choice per party.
pub fn correlator(
    rho: &DensityOperator,
    settings: &MeasurementSettings,
    choice: &[usize],
) -> Result<f64> {
    let n = settings.n_parties();
    if choice.len() != n || rho.dim() != (1usize << n) {
        return Err(Error::InvalidInput("correlator shape mismatch".into()));
    }
    let mut op: Option<ComplexMatrix> = None;
    for (k, &x) in choice.iter().enumerate() {
        let factor = settings.observable(k, x).clone();
        op = Some(match op {
            None => factor,
            Some(m) => kron(&m, &factor),
        });
    }
    Ok(trace_product(rho.matrix(), &op.expect("n >= 1")).re)
}

fn four_qubit_correlator(rho: &DensityOperator, ops: [&ComplexMatrix; 4]) -> f64 {
    let op = kron(&kron(ops[0], ops[1]), &kron(ops[2], ops[3]));
    trace_product(rho.matrix(), &op).re
}

/// Cluster-state Bell operator
/// B = <XYYX> + <XYXY> + <1ZXX> - <1ZYY> on a rotated-frame 4-qubit
/// state; LHV models obey B <= 2 and the rotated cluster state reaches 4.
pub fn cluster_bell_value(rho: &DensityOperator) -> Result<f64> {
    if rho.dim() != 16 {
        return Err(Error::InvalidInput(format!(
            "cluster Bell operator needs a 4-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let (sx, sy, sz) = (sigma_x(), sigma_y(), sigma_z());
    let id = ComplexMatrix::identity(2);
    let b = four_qubit_correlator(rho, [&sx, &sy, &sy, &sx])
        + four_qubit_correlator(rho, [&sx, &sy, &sx, &sy])
        + four_qubit_correlator(rho, [&id, &sz, &sx, &sx])
        - four_qubit_correlator(rho, [&id, &sz, &sy, &sy]);
    Ok(b)
}

/// The fixed local unitary mapping the machine's cluster target to the
/// frame of [`cluster_bell_value`]: bit flips on the two middle qubits.
///
/// Found once by searching single-qubit Clifford products for a unit
/// overlap (the regression test repeats the search).
pub fn cluster_frame_unitary() -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let sx = sigma_x();
    kron(&kron(&id, &sx), &kron(&sx, &id))
}

/// Conjugates a 4-qubit state into the rotated cluster frame.
pub fn cluster_frame_rotation(rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.dim() != 16 {
        return Err(Error::InvalidInput(format!(
            "frame rotation needs a 4-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let u = cluster_frame_unitary();
    let rotated = u.matmul(rho.matrix()).matmul(&u.adjoint()).hermitize();
    DensityOperator::try_new(rotated, vec![2; 4], &Tolerances::default())
}

/// One row of a Bell report.
#[derive(Debug, Clone)]
pub struct BellRecord {
    pub machine: String,
    pub p_suc: f64,
    pub fidelity: f64,
    pub bell_name: String,
    pub value: f64,
    pub lhv_bound: f64,
}

/// CSV serialization: machine,p_suc,F,bell_name,value,lhv_bound.
pub fn bell_report_csv(records: &[BellRecord]) -> String {
    let mut out = String::from("machine,p_suc,F,bell_name,value,lhv_bound\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.machine,
            fmt_sig(r.p_suc),
            fmt_sig(r.fidelity),
            r.bell_name,
            fmt_sig(r.value),
            fmt_sig(r.lhv_bound),
        ));
    }
    out
}

/// 12 significant digits, locale-free.
pub(crate) fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}
