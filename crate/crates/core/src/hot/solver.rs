//! Gauss–Newton with Marquardt damping and Armijo backtracking. Every accepted step lowers
//! the objective, so the last iterate is also the best one seen.

use super::banded::Pentadiagonal;
use super::objective::Objective;

const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 40;
const MIN_DAMPING: f64 = 1e-8;
const MAX_DAMPING: f64 = 1e8;
/// Damping up to which the model's predicted decrease is trusted as a
/// stopping test.
const DECREMENT_DAMPING: f64 = 1e-4;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Options {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub energy_rel_tol: f64,
    /// Iterations over which the relative energy decrease is measured.
    pub patience: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
    pub history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `norm` maps a gradient to the quantity compared with `grad_tol`.
pub(crate) fn minimize<N>(obj: &mut Objective<'_>, x0: Vec<f64>, norm: N, opts: Options) -> Outcome
where
    N: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut m = Pentadiagonal::zeros(n);
    let mut f = obj.value_and_grad(&x, &mut g);
    let mut history = vec![f];
    let mut trial = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    let mut mu = 0.0;

    while f.is_finite() && iterations < opts.max_iters {
        if norm(&g) <= opts.grad_tol {
            converged = true;
            break;
        }
        obj.gauss_newton(&x, &mut m);
        // Marquardt damping: the model can be too ill-conditioned for the
        // factorization, so failed directions are retried with a heavier
        // diagonal
        let mut accepted = None;
        while accepted.is_none() && mu <= MAX_DAMPING {
            let mut damped = m.clone();
            for v in &mut damped.diag {
                *v *= 1.0 + mu;
            }
            let dir: Vec<f64> = damped.solve(&g).iter().map(|v| -v).collect();
            let slope = dot(&g, &dir);
            if slope < 0.0 && slope.is_finite() {
                // predicted decrease of the full step; the gradient itself can
                // stay at rounding level in directions as stiff as 1/(ε h³)
                if mu <= DECREMENT_DAMPING && -0.5 * slope <= opts.energy_rel_tol * f.abs().max(f64::MIN_POSITIVE) {
                    converged = true;
                    break;
                }
                let mut step = 1.0;
                for _ in 0..MAX_HALVINGS {
                    for i in 0..n {
                        trial[i] = x[i] + step * dir[i];
                    }
                    let ft = obj.value(&trial);
                    if ft.is_finite() && ft <= f + ARMIJO_C * step * slope {
                        accepted = Some(step);
                        break;
                    }
                    step *= 0.5;
                }
            }
            match accepted {
                Some(step) if step == 1.0 => mu = if mu > MIN_DAMPING { mu / 10.0 } else { 0.0 },
                Some(_) => {}
                None => mu = if mu == 0.0 { MIN_DAMPING } else { mu * 10.0 },
            }
        }
        if converged || accepted.is_none() {
            break;
        }
        std::mem::swap(&mut x, &mut trial);
        f = obj.value_and_grad(&x, &mut g);
        history.push(f);
        iterations += 1;

        if history.len() > opts.patience {
            let old = history[history.len() - 1 - opts.patience];
            if old - f <= opts.energy_rel_tol * f.abs().max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
    }
    let grad_norm = norm(&g);
    if grad_norm <= opts.grad_tol {
        converged = true;
    }
    Outcome {
        x,
        f,
        iterations,
        grad_norm,
        converged,
        history,
    }
}
