//! Seeded derivative-free minimization (Nelder-Mead).

/// Standard Nelder-Mead on `f` starting from the simplex spanned by
/// `start` and `start + step * e_k`. Returns the best vertex and value.
///
/// Coefficients: reflection 1, expansion 2, contraction 0.5, shrink 0.5.
/// Stops when the simplex value spread drops below `f_tol` or after
/// `max_iters` iterations. Fully deterministic given its inputs.
pub fn nelder_mead<F>(
    f: &mut F,
    start: &[f64],
    step: f64,
    max_iters: usize,
    f_tol: f64,
) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), f(start)));
    for k in 0..dim {
        let mut x = start.to_vec();
        x[k] += step;
        let fx = f(&x);
        simplex.push((x, fx));
    }

    for _ in 0..max_iters {
        // best first; ties keep insertion order so the path is reproducible
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[dim].1 - simplex[0].1;
        if spread.abs() < f_tol {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|(x, _)| x[i]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();

        let reflect: Vec<f64> = (0..dim)
            .map(|i| centroid[i] + (centroid[i] - worst.0[i]))
            .collect();
        let f_reflect = f(&reflect);

        if f_reflect < simplex[0].1 {
            let expand: Vec<f64> = (0..dim)
                .map(|i| centroid[i] + 2.0 * (centroid[i] - worst.0[i]))
                .collect();
            let f_expand = f(&expand);
            simplex[dim] = if f_expand < f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
            continue;
        }
        if f_reflect < simplex[dim - 1].1 {
            simplex[dim] = (reflect, f_reflect);
            continue;
        }

        let contract: Vec<f64> = (0..dim)
            .map(|i| centroid[i] + 0.5 * (worst.0[i] - centroid[i]))
            .collect();
        let f_contract = f(&contract);
        if f_contract < worst.1 {
            simplex[dim] = (contract, f_contract);
            continue;
        }

        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            for (x, &b) in vertex.0.iter_mut().zip(&best) {
                *x = b + 0.5 * (*x - b);
            }
            vertex.1 = f(&vertex.0);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}
