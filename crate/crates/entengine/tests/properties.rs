//! Property tests over the linear-algebra substrate and Pareto pruning.

mod common;

use entengine::optimizer::{pareto_prune, SweepPoint};
use entengine::qcore::{devectorize, kron, vectorize, ComplexMatrix, C64};
use proptest::prelude::*;

fn small_complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(small_complex(), rows * cols)
        .prop_map(move |data| ComplexMatrix::try_from_vec(rows, cols, data).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_associativity(
        a in matrix(2, 2),
        b in matrix(3, 3),
        d in matrix(2, 2),
    ) {
        let left = kron(&kron(&a, &b), &d);
        let right = kron(&a, &kron(&b, &d));
        prop_assert!(left.max_abs_diff(&right) <= 1e-14);
    }

    #[test]
    fn kron_index_formula(a in matrix(2, 3), b in matrix(3, 2)) {
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..3 {
                for p in 0..3 {
                    for q in 0..2 {
                        prop_assert_eq!(k[(i * 3 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn vectorize_roundtrip_is_exact(m in matrix(5, 5)) {
        let back = devectorize(&vectorize(&m), 5).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn vec_identity_against_direct_multiplication(
        a in matrix(3, 3),
        b in matrix(3, 3),
        rho in matrix(3, 3),
    ) {
        // vec(A rho B) = (B^T ⊗ A) vec(rho).
        let direct = vectorize(&a.matmul(&rho).matmul(&b));
        let sup = kron(&b.transpose(), &a);
        let via = sup.matvec(&vectorize(&rho));
        for (x, y) in direct.iter().zip(&via) {
            prop_assert!((x - y).norm() <= 1e-12);
        }
    }

    #[test]
    fn pareto_prune_properties(
        raw in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..40),
        seed in 0u64..1000,
    ) {
        let points: Vec<SweepPoint> = raw
            .iter()
            .enumerate()
            .map(|(i, &(p, f))| SweepPoint {
                gamma_h: 1e-6 * (i + 1) as f64,
                gamma_c: 1e-2,
                g: 1e-3,
                p_suc: p,
                fidelity: f,
                bell_value: None,
            })
            .collect();

        let front = pareto_prune(points.clone());
        // Idempotent.
        prop_assert_eq!(pareto_prune(front.clone()), front.clone());
        // Order independent.
        let mut shuffled = points.clone();
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        for i in (1..shuffled.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            shuffled.swap(i, (state as usize) % (i + 1));
        }
        prop_assert_eq!(pareto_prune(shuffled), front.clone());
        // No member is dominated by any input point.
        for kept in &front {
            for p in &points {
                let dominates = p.p_suc >= kept.p_suc
                    && p.fidelity >= kept.fidelity
                    && (p.p_suc > kept.p_suc || p.fidelity > kept.fidelity);
                prop_assert!(!dominates, "front member dominated");
            }
        }
    }
}
