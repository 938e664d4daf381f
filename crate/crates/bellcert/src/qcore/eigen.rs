//! Hermitian eigensystems by complex Jacobi rotations.
//!
//! The solver is deterministic: identical input bits produce identical
//! output bits. Determinism is needed because the complete measurement
//! set is built from eigenvectors and must be reproducible run to run.
//! Three conventions pin the output down:
//!
//! 1. eigenvalues sorted descending;
//! 2. each eigenvector's largest-magnitude entry is made real positive;
//! 3. inside a degenerate cluster (eigenvalue gap below `1e-10 * ||H||`)
//!    the vectors are re-orthonormalized by ordered Gram-Schmidt and then
//!    sorted by lexicographic comparison of their entries.

use super::matrix::{ComplexMatrix, C64};

/// Eigenvalues (descending) with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    /// `V diag(values) V†`, used by tests to check reconstruction.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.vectors.get(i, k) * self.values[k] * self.vectors.get(j, k).conj();
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Diagonalize a Hermitian matrix. The caller guarantees Hermiticity;
/// the strict lower triangle is taken as the conjugate of the upper.
pub(super) fn jacobi_hermitian(h: &ComplexMatrix) -> Eigensystem {
    let n = h.rows();
    assert!(h.is_square());
    let mut a = h.symmetrize();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let stop = scale * 1e-15;
    let max_rotations = 200 * n * n + 100;

    for _ in 0..max_rotations {
        // largest off-diagonal element, first occurrence wins
        let mut p = 0;
        let mut q = 0;
        let mut best = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let m = a.get(i, j).norm();
                if m > best {
                    best = m;
                    p = i;
                    q = j;
                }
            }
        }
        if best <= stop {
            break;
        }

        let apq = a.get(p, q);
        let r = apq.norm();
        let phase = apq / r; // e^{i phi}
        let alpha = a.get(p, p).re;
        let beta = a.get(q, q).re;

        // rotation angle for the 2x2 block [[alpha, r],[r, beta]]
        let tau = (alpha - beta) / (2.0 * r);
        let t = if tau == 0.0 {
            1.0
        } else {
            tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = t * c;

        // unitary U: U[p][p]=c, U[p][q]=-s*phase, U[q][p]=s*conj(phase), U[q][q]=c
        // apply A <- U† A U, touching only rows/columns p and q
        for k in 0..n {
            let akp = a.get(k, p);
            let akq = a.get(k, q);
            a.set(k, p, akp * c + akq * s * phase.conj());
            a.set(k, q, -akp * s * phase + akq * c);
        }
        for k in 0..n {
            let apk = a.get(p, k);
            let aqk = a.get(q, k);
            a.set(p, k, apk * c + aqk * s * phase);
            a.set(q, k, -apk * s * phase.conj() + aqk * c);
        }
        // clean the rounding residue the rotation was meant to kill
        a.set(p, q, C64::new(0.0, 0.0));
        a.set(q, p, C64::new(0.0, 0.0));
        a.set(p, p, C64::new(a.get(p, p).re, 0.0));
        a.set(q, q, C64::new(a.get(q, q).re, 0.0));

        for k in 0..n {
            let vkp = v.get(k, p);
            let vkq = v.get(k, q);
            v.set(k, p, vkp * c + vkq * s * phase.conj());
            v.set(k, q, -vkp * s * phase + vkq * c);
        }
    }

    let raw_values: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    canonical_order(raw_values, v, scale)
}

/// Sort descending, orthonormalize degenerate clusters, fix phases, and
/// order within each cluster lexicographically.
fn canonical_order(values: Vec<f64>, vectors: ComplexMatrix, scale: f64) -> Eigensystem {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));

    let mut vals: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut cols: Vec<Vec<C64>> = order
        .iter()
        .map(|&i| (0..n).map(|r| vectors.get(r, i)).collect())
        .collect();

    let gap = 1e-10 * scale.max(1e-30);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (vals[end - 1] - vals[end]).abs() < gap {
            end += 1;
        }
        if end - start > 1 {
            gram_schmidt(&mut cols[start..end]);
            for col in &mut cols[start..end] {
                fix_phase(col);
            }
            let mut cluster: Vec<(f64, Vec<C64>)> = vals[start..end]
                .iter()
                .copied()
                .zip(cols[start..end].iter().cloned())
                .collect();
            cluster.sort_by(|a, b| lex_cmp(&a.1, &b.1));
            for (k, (val, col)) in cluster.into_iter().enumerate() {
                vals[start + k] = val;
                cols[start + k] = col;
            }
        } else {
            fix_phase(&mut cols[start]);
        }
        start = end;
    }

    let mut vmat = ComplexMatrix::zeros(n, n);
    for (k, col) in cols.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            vmat.set(r, k, *z);
        }
    }
    Eigensystem {
        values: vals,
        vectors: vmat,
    }
}

fn gram_schmidt(cols: &mut [Vec<C64>]) {
    for i in 0..cols.len() {
        for j in 0..i {
            let proj: C64 = cols[j]
                .iter()
                .zip(cols[i].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let prev = cols[j].clone();
            for (b, a) in cols[i].iter_mut().zip(prev.iter()) {
                *b -= proj * a;
            }
        }
        let norm: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for z in cols[i].iter_mut() {
                *z /= norm;
            }
        }
    }
}

/// Multiply by a unit phase so the largest-magnitude entry is real positive.
fn fix_phase(col: &mut [C64]) {
    let mut best = 0.0;
    let mut idx = 0;
    for (i, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best {
            best = m;
            idx = i;
        }
    }
    if best == 0.0 {
        return;
    }
    let phase = col[idx] / best;
    for z in col.iter_mut() {
        *z *= phase.conj();
    }
    col[idx] = C64::new(col[idx].re.abs(), 0.0);
}

fn lex_cmp(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let c = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    std::cmp::Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::super::herm::HermitianOperator;
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn op(entries: Vec<C64>) -> HermitianOperator {
        let n = (entries.len() as f64).sqrt() as usize;
        HermitianOperator::new(ComplexMatrix::new(n, n, entries).unwrap()).unwrap()
    }

    #[test]
    fn sigma_z_diagonal_input() {
        let h = op(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ]);
        let e = h.eigensystem();
        assert_eq!(e.values, vec![1.0, -1.0]);
        assert!((e.vectors.get(0, 0) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((e.vectors.get(1, 1) - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sigma_x_closed_form() {
        let h = op(vec![
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ]);
        let e = h.eigensystem();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // +1 eigenvector (e0+e1)/sqrt(2), -1 eigenvector (e0-e1)/sqrt(2)
        assert!((e.vectors.get(0, 0) - C64::new(s, 0.0)).norm() < 1e-14);
        assert!((e.vectors.get(1, 0) - C64::new(s, 0.0)).norm() < 1e-14);
        assert!((e.vectors.get(0, 1) - C64::new(s, 0.0)).norm() < 1e-14);
        assert!((e.vectors.get(1, 1) - C64::new(-s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn identity_multiplicity() {
        let h = HermitianOperator::new(ComplexMatrix::identity(4)).unwrap();
        let e = h.eigensystem();
        assert!(e.values.iter().all(|&v| (v - 1.0).abs() < 1e-14));
        // orthonormal columns even in a fully degenerate spectrum
        let gram = e.vectors.adjoint().matmul(&e.vectors);
        assert!(gram.max_deviation(&ComplexMatrix::identity(4)) < 1e-13);
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianOperator {
        let entries: Vec<C64> = (0..n * n)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let m = ComplexMatrix::new(n, n, entries).unwrap().symmetrize();
        HermitianOperator::new(m).unwrap()
    }

    #[test]
    fn reconstruction_over_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..1000 {
            let n = 2 + (trial % 8); // dims 2..=9
            let h = random_hermitian(&mut rng, n);
            let e = h.eigensystem();
            let norm = h.matrix().max_abs().max(1e-30);
            let dev = e.reconstruct().max_deviation(h.matrix());
            assert!(
                dev <= 1e-10 * norm,
                "reconstruction failed at dim {}: dev {} vs norm {}",
                n,
                dev,
                norm
            );
            for k in 1..e.values.len() {
                assert!(e.values[k - 1] >= e.values[k]);
            }
        }
    }

    #[test]
    fn deterministic_for_identical_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let h = random_hermitian(&mut rng, 6);
        let e1 = h.eigensystem();
        let e2 = h.eigensystem();
        assert_eq!(e1.values, e2.values);
        assert_eq!(e1.vectors, e2.vectors);
    }
}
