//! Minimization of `F_p(u) + λ ∫ (u − g)²` on a grid.
//!
//! The absolute values in the total variation and in the curvature term are
//! replaced by `s(t) = √(t² + ε²) − ε`, which keeps `s(0) = 0` so constants
//! still cost nothing. The smoothed objective is minimized by
//! lagged-diffusivity Newton steps (banded, one `O(n)` solve each, damped
//! when the model is too stiff to factor) with an Armijo line search,
//! starting from `g` and tightening `ε` in stages. The objective is not convex for the
//! built-in weight, so the result is a stationary point; the experiments in
//! [`anti_staircase_experiment`] assert properties of what is returned, not
//! global optimality.

mod banded;
mod experiment;
mod objective;
mod solver;

pub use experiment::{
    anti_staircase_experiment, c1_distance, lambda_sweep, noise_family, AntiStaircaseReport, LambdaSweepRow,
    NoiseKind, SweepRow, DEFAULT_SWEEP_CELLS,
};
pub use objective::{objective_gradient, smoothed_objective};

use serde::Serialize;
use thiserror::Error;

use crate::signals::{jump_detector, DiscreteSignal, JumpRecord, SignalError, DEFAULT_JUMP_KAPPA};
use crate::weights::WeightFunction;

/// Iterations over which the relative energy decrease is measured.
pub const ENERGY_PATIENCE: usize = 5;

#[derive(Debug, Error)]
pub enum HotError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("signals live on different grids")]
    GridMismatch,
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[derive(Debug, Clone)]
pub struct HotConfig {
    pub lambda: f64,
    pub weight: WeightFunction,
    pub eps_abs: f64,
    pub max_iters: usize,
    /// Bound on `‖∇E‖₂ / √h`, the grid-independent size of the gradient.
    pub grad_tol: f64,
    /// Bound on the relative energy decrease over [`ENERGY_PATIENCE`]
    /// iterations.
    pub energy_rel_tol: f64,
}

impl HotConfig {
    pub const DEFAULT_MAX_ITERS: usize = 2_000;
    pub const DEFAULT_GRAD_TOL: f64 = 1e-6;
    pub const DEFAULT_ENERGY_REL_TOL: f64 = 1e-10;

    pub fn new(lambda: f64, weight: WeightFunction, eps_abs: f64) -> Self {
        HotConfig {
            lambda,
            weight,
            eps_abs,
            max_iters: Self::DEFAULT_MAX_ITERS,
            grad_tol: Self::DEFAULT_GRAD_TOL,
            energy_rel_tol: Self::DEFAULT_ENERGY_REL_TOL,
        }
    }

    /// `ε = 10⁻⁴ · (max g − min g) / (b − a)`, with the range taken as 1 for
    /// constant data.
    pub fn default_eps(g: &DiscreteSignal) -> f64 {
        let range = g.max() - g.min();
        let range = if range > 0.0 { range } else { 1.0 };
        1e-4 * range / (g.grid().b() - g.grid().a())
    }

    pub fn for_signal(lambda: f64, weight: WeightFunction, g: &DiscreteSignal) -> Self {
        Self::new(lambda, weight, Self::default_eps(g))
    }

    pub fn validate(&self) -> Result<(), HotError> {
        let bad = |m: String| Err(HotError::InvalidConfig(m));
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.eps_abs.is_finite() && self.eps_abs > 0.0) {
            return bad(format!("eps_abs must be positive, got {}", self.eps_abs));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive".into());
        }
        if !(self.grad_tol > 0.0) || !(self.energy_rel_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HotResult {
    /// Written separately as a signal CSV.
    #[serde(skip)]
    pub minimizer: DiscreteSignal,
    pub energy: f64,
    pub iterations: usize,
    pub grad_norm_final: f64,
    pub max_abs_slope: f64,
    pub jump_records: Vec<JumpRecord>,
    pub converged: bool,
    /// Objective value after every accepted step, starting with `u0`.
    #[serde(skip)]
    pub energy_history: Vec<f64>,
}

/// Smoothing widths `ε₀ > ε₁ > … > ε` preceding the final stage: powers of
/// ten times `ε`, starting below the slope scale of the data.
fn continuation_schedule(g: &DiscreteSignal, eps: f64) -> Vec<f64> {
    let top = HotConfig::default_eps(g) * 1e4;
    let mut out = Vec::new();
    let mut e = eps * 10.0;
    while e <= top {
        out.push(e);
        e *= 10.0;
    }
    out.reverse();
    out
}

pub fn max_abs_slope(u: &DiscreteSignal) -> f64 {
    crate::signals::derivative_samples(u).iter().fold(0.0, |m, d| m.max(d.abs()))
}

/// Minimizes the smoothed objective from `u0` (default `g`). Non-convergence
/// is reported through [`HotResult::converged`].
pub fn minimize_hot(g: &DiscreteSignal, cfg: &HotConfig, u0: Option<&DiscreteSignal>) -> Result<HotResult, HotError> {
    cfg.validate()?;
    let start = match u0 {
        Some(u) if u.grid() != g.grid() => return Err(HotError::GridMismatch),
        Some(u) => u.values().to_vec(),
        None => g.values().to_vec(),
    };
    let sqrt_h = g.grid().spacing().sqrt();
    let norm = |grad: &[f64]| grad.iter().map(|v| v * v).sum::<f64>().sqrt() / sqrt_h;
    let opts = solver::Options {
        max_iters: cfg.max_iters,
        grad_tol: cfg.grad_tol,
        energy_rel_tol: cfg.energy_rel_tol,
        patience: ENERGY_PATIENCE,
    };

    // continuation: coarse smoothing first, each stage warm-starting the next
    let mut x = start.clone();
    let mut spent = 0;
    let mut stage_cfg = cfg.clone();
    for eps in continuation_schedule(g, cfg.eps_abs) {
        stage_cfg.eps_abs = eps;
        let mut obj = objective::Objective::new(g, &stage_cfg);
        let out = solver::minimize(&mut obj, x, norm, solver::Options { max_iters: opts.max_iters.saturating_sub(spent).max(1), ..opts });
        spent += out.iterations;
        x = out.x;
    }
    let mut obj = objective::Objective::new(g, cfg);
    if obj.value(&start) < obj.value(&x) {
        x = start;
    }
    let mut out = solver::minimize(&mut obj, x, norm, solver::Options { max_iters: opts.max_iters.saturating_sub(spent).max(1), ..opts });
    out.iterations += spent;
    let minimizer = DiscreteSignal::new(*g.grid(), out.x)?;
    Ok(HotResult {
        energy: out.f,
        iterations: out.iterations,
        grad_norm_final: out.grad_norm,
        max_abs_slope: max_abs_slope(&minimizer),
        jump_records: jump_detector(&minimizer, DEFAULT_JUMP_KAPPA),
        converged: out.converged,
        energy_history: out.history,
        minimizer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::Grid;

    fn w(alpha: f64, p: f64) -> WeightFunction {
        WeightFunction::builtin(alpha, p).unwrap()
    }

    #[test]
    fn config_validation() {
        let mut c = HotConfig::new(9.0, w(2.0, 1.0), 1e-4);
        assert!(c.validate().is_ok());
        c.eps_abs = 0.0;
        assert!(c.validate().is_err());
        c.eps_abs = 1e-4;
        c.lambda = -1.0;
        assert!(c.validate().is_err());
        c.lambda = 9.0;
        c.grad_tol = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn constant_data_is_fixed() {
        let g = DiscreteSignal::constant(Grid::unit(100).unwrap(), 0.25);
        let r = minimize_hot(&g, &HotConfig::for_signal(9.0, w(2.0, 1.0), &g), None).unwrap();
        assert!(r.iterations <= 1 && r.converged);
        assert_eq!(r.minimizer.values(), g.values());
        assert_eq!(r.energy, 0.0);
    }

    #[test]
    fn clean_ramp_p1() {
        let g = DiscreteSignal::from_fn(Grid::unit(400).unwrap(), |x| x);
        let cfg = HotConfig::for_signal(9.0, w(2.0, 1.0), &g);
        let r = minimize_hot(&g, &cfg, None).unwrap();
        assert!(r.max_abs_slope <= 2.0, "{}", r.max_abs_slope);
        assert!(r.jump_records.is_empty());
        assert!(r.energy_history.windows(2).all(|q| q[1] <= q[0]));
        assert!(r.energy <= smoothed_objective(&g, &g, &cfg).unwrap());
        for v in r.minimizer.values() {
            assert!(*v >= g.min() - 1e-6 && *v <= g.max() + 1e-6);
        }
        // at λ = 9 tilting the ramp to slope about 1/3 is cheaper than
        // following it
        let u = r.minimizer.values();
        assert!((r.max_abs_slope - 1.0 / 3.0).abs() < 0.02, "{}", r.max_abs_slope);
        assert!((u[0] - 1.0 / 3.0).abs() < 0.02 && (u[400] - 2.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn small_gradient_on_mild_problems() {
        let g = DiscreteSignal::from_fn(Grid::unit(20).unwrap(), |x| x + 0.1 * (6.0 * x).sin());
        for (alpha, p) in [(2.0, 1.0), (3.0, 2.0)] {
            let mut cfg = HotConfig::new(9.0, w(alpha, p), 0.5);
            cfg.energy_rel_tol = 1e-300;
            let r = minimize_hot(&g, &cfg, None).unwrap();
            assert!(r.converged);
            assert!(r.grad_norm_final <= cfg.grad_tol, "p={p}: {}", r.grad_norm_final);
            let grad = objective_gradient(&r.minimizer, &g, &cfg).unwrap();
            let h = g.grid().spacing();
            assert!(grad.iter().map(|v| v * v).sum::<f64>().sqrt() / h.sqrt() <= cfg.grad_tol);
        }
    }

    #[test]
    fn halving_eps_moves_energy_little() {
        let g = DiscreteSignal::from_fn(Grid::unit(200).unwrap(), |x| x + 0.1 * (6.0 * x).sin());
        for (alpha, p) in [(2.0, 1.0), (3.0, 2.0)] {
            for eps in [1e-4, 1e-2] {
                let mut cfg = HotConfig::new(9.0, w(alpha, p), eps);
                let e1 = minimize_hot(&g, &cfg, None).unwrap();
                cfg.eps_abs = eps / 2.0;
                let e2 = minimize_hot(&g, &cfg, None).unwrap();
                assert!(e1.converged && e2.converged);
                assert!((e1.energy - e2.energy).abs() <= 10.0 * eps, "p={p} eps={eps}");
            }
        }
    }

    #[test]
    fn warm_start_never_raises_energy() {
        let grid = Grid::unit(300).unwrap();
        let g = DiscreteSignal::from_fn(grid, |x| if x < 0.5 { 0.0 } else { 1.0 });
        let u0 = DiscreteSignal::from_fn(grid, |x| (x - 0.2).max(0.0));
        let cfg = HotConfig::for_signal(4.0, w(2.0, 1.0), &g);
        let r = minimize_hot(&g, &cfg, Some(&u0)).unwrap();
        assert!(r.energy <= smoothed_objective(&u0, &g, &cfg).unwrap());
        assert!(r.energy_history.windows(2).all(|q| q[1] <= q[0]));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let g = DiscreteSignal::constant(Grid::unit(10).unwrap(), 0.0);
        let u0 = DiscreteSignal::constant(Grid::unit(12).unwrap(), 0.0);
        let cfg = HotConfig::new(1.0, w(2.0, 1.0), 1e-4);
        assert!(matches!(minimize_hot(&g, &cfg, Some(&u0)), Err(HotError::GridMismatch)));
    }
}
