//! Derivative-free Nelder–Mead simplex minimization.

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadConfig {
    pub max_iter: usize,
    /// Stop when the spread of objective values falls below
    /// `f_tol * (|f_best| + f_tol)` and the simplex diameter below `x_tol`.
    pub f_tol: f64,
    pub x_tol: f64,
    /// Number of times the simplex is rebuilt around the current best point
    /// after convergence, to escape premature collapse.
    pub restarts: usize,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            max_iter: 4000,
            f_tol: 1e-10,
            x_tol: 1e-8,
            restarts: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimize `objective` from `start`, using `steps[i]` as the initial simplex
/// edge along coordinate `i`. Non-finite objective values are treated as `+inf`.
pub fn nelder_mead<F>(objective: F, start: &[f64], steps: &[f64], config: &NelderMeadConfig) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    assert_eq!(start.len(), steps.len(), "one step per coordinate");
    let eval = |x: &[f64]| {
        let f = objective(x);
        if f.is_nan() {
            f64::INFINITY
        } else {
            f
        }
    };
    if start.is_empty() {
        return Minimum {
            x: Vec::new(),
            f: eval(start),
            iterations: 0,
            converged: true,
        };
    }

    let mut best = start.to_vec();
    let mut total_iter = 0;
    let mut converged = false;
    let mut scale = 1.0;
    for _ in 0..=config.restarts {
        let run = simplex_run(&eval, &best, steps, scale, config);
        total_iter += run.iterations;
        converged = run.converged;
        best = run.x;
        scale *= 0.1;
        if !converged {
            break;
        }
    }
    let f = eval(&best);
    Minimum {
        x: best,
        f,
        iterations: total_iter,
        converged,
    }
}

fn simplex_run<F>(eval: &F, start: &[f64], steps: &[f64], scale: f64, config: &NelderMeadConfig) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        let step = if steps[i] != 0.0 { steps[i] } else { 0.05 };
        v[i] += step * scale;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
    let mut order: Vec<usize> = (0..=dim).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (b, w, sw) = (order[0], order[dim], order[dim - 1]);

        let spread = values[w] - values[b];
        let diameter = simplex
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[b])
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if values[b].is_finite()
            && spread <= config.f_tol * (values[b].abs() + config.f_tol)
            && diameter <= config.x_tol
        {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for &i in &order[..dim] {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= dim as f64);

        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[w])
                .map(|(c, x)| c + t * (c - x))
                .collect()
        };

        let xr = along(REFLECT);
        let fr = eval(&xr);
        if fr < values[b] {
            let xe = along(REFLECT * EXPAND);
            let fe = eval(&xe);
            if fe < fr {
                simplex[w] = xe;
                values[w] = fe;
            } else {
                simplex[w] = xr;
                values[w] = fr;
            }
            continue;
        }
        if fr < values[sw] {
            simplex[w] = xr;
            values[w] = fr;
            continue;
        }
        // outside contraction when the reflection beat the worst point, inside otherwise
        let (xc, fc) = if fr < values[w] {
            let xc = along(REFLECT * CONTRACT);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-CONTRACT);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < values[w].min(fr) {
            simplex[w] = xc;
            values[w] = fc;
            continue;
        }
        let best = simplex[b].clone();
        for i in 0..=dim {
            if i == b {
                continue;
            }
            for (x, bx) in simplex[i].iter_mut().zip(&best) {
                *x = bx + SHRINK * (*x - bx);
            }
            values[i] = eval(&simplex[i]);
        }
    }
    let b = (0..=dim)
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .expect("non-empty simplex");
    Minimum {
        x: simplex[b].clone(),
        f: values[b],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2);
        let m = nelder_mead(f, &[0.0, 0.0], &[0.5, 0.5], &NelderMeadConfig::default());
        assert!(m.converged);
        assert!((m.x[0] - 3.0).abs() < 1e-5);
        assert!((m.x[1] + 1.0).abs() < 1e-5);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let m = nelder_mead(f, &[-1.2, 1.0], &[0.1, 0.1], &NelderMeadConfig::default());
        assert!((m.x[0] - 1.0).abs() < 1e-4, "{:?}", m);
        assert!((m.x[1] - 1.0).abs() < 1e-4, "{:?}", m);
    }

    #[test]
    fn one_dimensional_with_barrier() {
        // infinite outside (-1, 1), minimum at 0.9
        let f = |x: &[f64]| {
            if x[0].abs() >= 1.0 {
                f64::INFINITY
            } else {
                (x[0] - 0.9).powi(2)
            }
        };
        let m = nelder_mead(f, &[0.0], &[0.1], &NelderMeadConfig::default());
        assert!((m.x[0] - 0.9).abs() < 1e-5);
    }

    #[test]
    fn nan_is_treated_as_infinite() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::NAN } else { (x[0] - 1.0).powi(2) };
        let m = nelder_mead(f, &[0.5], &[0.1], &NelderMeadConfig::default());
        assert!((m.x[0] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn zero_dimensional() {
        let m = nelder_mead(|_| 4.0, &[], &[], &NelderMeadConfig::default());
        assert_eq!(m.f, 4.0);
        assert!(m.converged);
    }
}
