//! Dense phase-I simplex with Bland's rule.
//!
//! Solves `exists q >= 0 : G q = p` by minimizing the total artificial
//! slack. Bland's rule (smallest eligible index enters, smallest basic
//! index leaves on ties) makes the pivot path, and therefore the verdict
//! and the extracted dual vector, deterministic and cycle-free.

/// Outcome of a phase-I run.
pub struct PhaseOne {
    /// Optimal total slack (0 for feasible systems, up to rounding).
    pub objective: f64,
    /// Basic variable index per row; values `>= n_cols` are artificials.
    pub basis: Vec<usize>,
    /// Current right-hand side (values of the basic variables).
    pub rhs: Vec<f64>,
    /// Reduced costs of the artificial columns, for dual extraction.
    pub artificial_reduced_costs: Vec<f64>,
    /// Row sign flips applied to make the right-hand side nonnegative.
    pub flips: Vec<f64>,
    /// Pivot count, for diagnostics.
    #[allow(dead_code)]
    pub iterations: usize,
    /// False when the iteration cap was reached before optimality.
    pub converged: bool,
}

const PIVOT_EPS: f64 = 1e-12;

/// Run phase-I on the system `columns * q = p`. `column(j, out)` writes
/// the `j`-th of `n_cols` columns (length matching `p`).
pub fn phase_one<F>(n_cols: usize, p: &[f64], mut column: F) -> PhaseOne
where
    F: FnMut(usize, &mut [f64]),
{
    let m = p.len();
    let width = n_cols + m; // structural columns then artificials
    let flips: Vec<f64> = p
        .iter()
        .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
        .collect();

    // tableau rows: flipped structural columns, then the identity
    let mut tab = vec![0.0; m * width];
    let mut buf = vec![0.0; m];
    for j in 0..n_cols {
        column(j, &mut buf);
        for i in 0..m {
            tab[i * width + j] = flips[i] * buf[i];
        }
    }
    for i in 0..m {
        tab[i * width + n_cols + i] = 1.0;
    }
    let mut rhs: Vec<f64> = p.iter().zip(&flips).map(|(&v, &s)| s * v).collect();
    let mut basis: Vec<usize> = (n_cols..n_cols + m).collect();

    // reduced costs c_j - y A_j for the all-artificial basis
    let mut reduced = vec![0.0; width];
    for j in 0..n_cols {
        let mut colsum = 0.0;
        for i in 0..m {
            colsum += tab[i * width + j];
        }
        reduced[j] = -colsum;
    }

    let max_iters = 2000 + 50 * width.max(m);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        // Bland: smallest improving column enters
        let entering = (0..width).find(|&j| reduced[j] < -PIVOT_EPS);
        let Some(e) = entering else {
            converged = true;
            break;
        };
        // ratio test; ties leave the smallest basic index (Bland again)
        let mut pivot_row: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let a = tab[i * width + e];
            if a > PIVOT_EPS {
                let ratio = rhs[i] / a;
                let better = match pivot_row {
                    None => true,
                    Some(r) => ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[r]),
                };
                if better {
                    best_ratio = ratio;
                    pivot_row = Some(i);
                }
            }
        }
        // phase-I is bounded below by zero, so an unbounded ray cannot
        // occur; treat it as non-convergence if rounding produces one
        let Some(r) = pivot_row else {
            break;
        };

        // pivot on (r, e)
        let d = tab[r * width + e];
        for j in 0..width {
            tab[r * width + j] /= d;
        }
        rhs[r] /= d;
        tab[r * width + e] = 1.0;
        for i in 0..m {
            if i == r {
                continue;
            }
            let f = tab[i * width + e];
            if f != 0.0 {
                for j in 0..width {
                    tab[i * width + j] -= f * tab[r * width + j];
                }
                tab[i * width + e] = 0.0;
                rhs[i] -= f * rhs[r];
                if rhs[i] < 0.0 && rhs[i] > -1e-13 {
                    rhs[i] = 0.0;
                }
            }
        }
        let fobj = reduced[e];
        for j in 0..width {
            reduced[j] -= fobj * tab[r * width + j];
        }
        reduced[e] = 0.0;
        basis[r] = e;
        iterations += 1;
    }

    // recompute the objective from the basic artificials to shed the
    // incremental rounding accumulated across pivots
    let recomputed: f64 = basis
        .iter()
        .zip(&rhs)
        .filter(|(&b, _)| b >= n_cols)
        .map(|(_, &v)| v)
        .sum();
    PhaseOne {
        objective: recomputed.max(0.0),
        basis,
        rhs,
        artificial_reduced_costs: reduced[n_cols..].to_vec(),
        flips,
        iterations,
        converged,
    }
}

impl PhaseOne {
    /// Structural solution vector (artificial weights dropped).
    pub fn primal(&self, n_cols: usize) -> Vec<f64> {
        let mut q = vec![0.0; n_cols];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n_cols {
                q[b] = self.rhs[i];
            }
        }
        q
    }

    /// Dual vector `y` in the original (unflipped) row space; satisfies
    /// `y . p = objective` and `y . G_j <= 0` for all columns at optimality.
    pub fn dual(&self) -> Vec<f64> {
        self.artificial_reduced_costs
            .iter()
            .zip(&self.flips)
            .map(|(&rc, &s)| s * (1.0 - rc))
            .collect()
    }
}
