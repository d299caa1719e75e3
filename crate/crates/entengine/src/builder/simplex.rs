//! Phase-1 simplex for small dense equality-form feasibility problems.
//!
//! Finds x >= 0 with A x = b, or reports infeasibility. Bland's rule is used
//! throughout, so the method terminates without cycling. Problem sizes here
//! are a handful of rows (one per target support state) and a few dozen
//! columns, so a dense tableau is enough.

const PIVOT_TOL: f64 = 1e-9;
const MAX_ITERS: usize = 10_000;

/// Returns a nonnegative solution of `A x = b` if one exists.
pub fn phase1_feasible(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let m = a.len();
    if m == 0 {
        return Some(Vec::new());
    }
    let n = a[0].len();
    assert!(a.iter().all(|row| row.len() == n));
    assert_eq!(b.len(), m);

    // Tableau: [A | I | b] with rows flipped so b >= 0; artificial basis.
    let total = n + m;
    let mut t = vec![vec![0.0f64; total + 1]; m];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][total] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..total).collect();

    // Reduced costs for the phase-1 objective (sum of artificials), with the
    // artificial basis priced out.
    let mut red = vec![0.0f64; total];
    for (j, r) in red.iter_mut().enumerate().take(n) {
        *r = -(0..m).map(|i| t[i][j]).sum::<f64>();
    }
    let mut obj: f64 = (0..m).map(|i| t[i][total]).sum();

    for _ in 0..MAX_ITERS {
        // Bland: smallest-index column with a negative reduced cost.
        let Some(enter) = (0..total).find(|&j| red[j] < -PIVOT_TOL) else {
            break;
        };
        // Ratio test; Bland tie-break on the smallest basis variable.
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > PIVOT_TOL {
                let ratio = t[i][total] / t[i][enter];
                let better = ratio < best - 1e-12
                    || (ratio < best + 1e-12
                        && leave.map_or(true, |l| basis[i] < basis[l]));
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let leave = leave?; // unbounded phase-1 cannot happen; treat as infeasible
        // Pivot.
        let piv = t[leave][enter];
        for v in t[leave].iter_mut() {
            *v /= piv;
        }
        for i in 0..m {
            if i != leave && t[i][enter].abs() > 0.0 {
                let f = t[i][enter];
                for j in 0..=total {
                    t[i][j] -= f * t[leave][j];
                }
            }
        }
        let f = red[enter];
        for j in 0..total {
            red[j] -= f * t[leave][j];
        }
        obj += f * t[leave][total];
        basis[leave] = enter;
    }

    if obj.abs() > 1e-8 {
        return None;
    }
    let mut x = vec![0.0f64; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i][total].max(0.0);
        } else if t[i][total] > 1e-8 {
            // An artificial stuck at a positive level: infeasible.
            return None;
        }
    }
    Some(x)
}
