use rayon::prelude::*;
use serde::Serialize;

use super::{max_abs_slope, minimize_hot, HotConfig, HotError};
use crate::rof::{rof_discrete_minimizer, rof_monotone_minimizer, MonotoneDatum};
use crate::signals::{derivative_samples, jump_detector, plateau_breaks, DiscreteSignal, Grid, DEFAULT_JUMP_KAPPA};

/// Cells of the unit grid used by the sweeps: a multiple of 10, 50, 100, 200,
/// fine enough that a step of height 1/200 clears the jump threshold.
pub const DEFAULT_SWEEP_CELLS: usize = 4_000;
/// Allowed growth of the maximal slope over the clean-ramp run.
pub const SLOPE_SLACK: f64 = 1.2;
/// A ROF increment counts as a plateau break above this fraction of a step.
const BREAK_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// `h_n = g_n − x`, the residual turning the ramp into the staircase.
    StaircaseResidual,
    /// `±amplitude` on alternate cells of width `1/n`, zero on the cell ends.
    SquareWave,
}

/// Weak*-null perturbations sampled on `grid` (taken on `[0, 1]`).
///
/// `staircase_residual` has sup norm `1/n` regardless of `amplitude`.
pub fn noise_family(kind: NoiseKind, n: usize, amplitude: f64, grid: &Grid) -> Result<DiscreteSignal, HotError> {
    if n == 0 {
        return Err(HotError::InvalidConfig("noise needs n >= 1".into()));
    }
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(HotError::InvalidConfig(format!("amplitude must be positive, got {amplitude}")));
    }
    let stair = MonotoneDatum::Staircase { steps: n };
    let nf = n as f64;
    Ok(match kind {
        NoiseKind::StaircaseResidual => DiscreteSignal::from_fn(*grid, |x| stair.eval(x) - x),
        NoiseKind::SquareWave => DiscreteSignal::from_fn(*grid, |x| {
            let t = x * nf;
            let r = t.round();
            if (t - r).abs() <= 1e-9 && r > 0.0 && r < nf {
                0.0
            } else {
                let cell = (t.floor() as i64).clamp(0, n as i64 - 1);
                if cell % 2 == 0 {
                    amplitude
                } else {
                    -amplitude
                }
            }
        }),
    })
}

/// `sup |u − r| + sup |u′ − r′|` over nodes and cells.
pub fn c1_distance(u: &DiscreteSignal, r: &DiscreteSignal) -> f64 {
    let du = derivative_samples(u);
    let dr = derivative_samples(r);
    let slope = du.iter().zip(&dr).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    u.sup_distance(r) + slope
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub max_abs_slope: f64,
    pub jump_count: usize,
    pub sup_dist_clean: f64,
    pub converged: bool,
    pub iterations: usize,
    pub energy: f64,
    /// Window `[a_n, b_n]` of the exact ROF minimizer for `g_n`.
    pub a_n: f64,
    pub b_n: f64,
    pub rof_plateau_breaks: usize,
    pub rof_jump_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AntiStaircaseReport {
    pub lambda: f64,
    pub p: f64,
    pub cells: usize,
    pub clean_max_slope: f64,
    pub clean_converged: bool,
    pub rows: Vec<SweepRow>,
    pub all_converged: bool,
    pub no_jumps: bool,
    pub slope_bounded: bool,
    /// Every ROF reconstruction shows at least `n/2` plateau breaks.
    pub rof_breaks_at_least_half: bool,
    pub rof_detects_jumps: bool,
}

/// For each `n`, denoises `g_n = x + h_n` with the higher-order model and
/// with ROF on the same `cells`-cell grid, and compares with the clean ramp.
pub fn anti_staircase_experiment(
    lambda: f64,
    n_list: &[usize],
    cfg: &HotConfig,
    cells: usize,
) -> Result<AntiStaircaseReport, HotError> {
    let mut cfg = cfg.clone();
    cfg.lambda = lambda;
    cfg.validate()?;
    let grid = Grid::unit(cells)?;
    let ramp = DiscreteSignal::from_fn(grid, |x| x);
    let clean = minimize_hot(&ramp, &cfg, None)?;

    let mut rows = n_list
        .par_iter()
        .map(|&n| -> Result<SweepRow, HotError> {
            let g = ramp.add(&noise_family(NoiseKind::StaircaseResidual, n, 1.0, &grid)?)?;
            let r = minimize_hot(&g, &cfg, None)?;
            let datum = MonotoneDatum::staircase(n).map_err(|e| HotError::InvalidConfig(e.to_string()))?;
            let exact = rof_monotone_minimizer(&datum, lambda).map_err(|e| HotError::InvalidConfig(e.to_string()))?;
            let rof = rof_discrete_minimizer(&g, lambda).map_err(|e| HotError::InvalidConfig(e.to_string()))?;
            Ok(SweepRow {
                n,
                max_abs_slope: r.max_abs_slope,
                jump_count: r.jump_records.len(),
                sup_dist_clean: r.minimizer.sup_distance(&clean.minimizer),
                converged: r.converged,
                iterations: r.iterations,
                energy: r.energy,
                a_n: exact.x_low,
                b_n: exact.x_high,
                rof_plateau_breaks: plateau_breaks(&rof, exact.x_low, exact.x_high, BREAK_FRACTION / n as f64),
                rof_jump_count: jump_detector(&rof, DEFAULT_JUMP_KAPPA).len(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by_key(|r| r.n);

    let clean_max_slope = max_abs_slope(&clean.minimizer);
    Ok(AntiStaircaseReport {
        lambda,
        p: cfg.weight.p(),
        cells,
        clean_max_slope,
        clean_converged: clean.converged,
        all_converged: clean.converged && rows.iter().all(|r| r.converged),
        no_jumps: rows.iter().all(|r| r.jump_count == 0),
        slope_bounded: rows.iter().all(|r| r.max_abs_slope <= SLOPE_SLACK * clean_max_slope),
        rof_breaks_at_least_half: rows.iter().all(|r| 2 * r.rof_plateau_breaks >= r.n),
        rof_detects_jumps: rows.iter().all(|r| r.rof_jump_count > 0),
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaSweepRow {
    pub lambda: f64,
    /// `c1_distance` between the minimizer for `g_n` and the clean ramp.
    pub c1_proxy: f64,
    pub converged: bool,
}

/// Distance in the `C¹` proxy between the minimizer for `g_n` and the clean
/// ramp, for each `λ`.
pub fn lambda_sweep(lambdas: &[f64], n: usize, cfg: &HotConfig, cells: usize) -> Result<Vec<LambdaSweepRow>, HotError> {
    let grid = Grid::unit(cells)?;
    let ramp = DiscreteSignal::from_fn(grid, |x| x);
    let g = ramp.add(&noise_family(NoiseKind::StaircaseResidual, n, 1.0, &grid)?)?;
    lambdas
        .par_iter()
        .map(|&lambda| {
            let mut c = cfg.clone();
            c.lambda = lambda;
            let r = minimize_hot(&g, &c, None)?;
            Ok(LambdaSweepRow {
                lambda,
                c1_proxy: c1_distance(&r.minimizer, &ramp),
                converged: r.converged,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rof::staircase_signal;

    #[test]
    fn residual_sup_norm() {
        let grid = Grid::unit(800).unwrap();
        let h = noise_family(NoiseKind::StaircaseResidual, 10, 1.0, &grid).unwrap();
        let sup = h.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((sup - 0.1).abs() < 1e-15, "{sup}");
    }

    #[test]
    fn residual_plus_ramp_is_staircase() {
        let grid = Grid::unit(700).unwrap();
        let ramp = DiscreteSignal::from_fn(grid, |x| x);
        for n in [7, 10, 35] {
            let g = ramp.add(&noise_family(NoiseKind::StaircaseResidual, n, 1.0, &grid).unwrap()).unwrap();
            let gn = staircase_signal(n, grid).unwrap();
            assert!(g.sup_distance(&gn) < 1e-15, "n={n}");
        }
    }

    #[test]
    fn square_wave_mean_zero() {
        for (n, cells) in [(10, 800), (4, 100), (50, 800)] {
            let grid = Grid::unit(cells).unwrap();
            let s = noise_family(NoiseKind::SquareWave, n, 0.3, &grid).unwrap();
            let v = s.values();
            let h = grid.spacing();
            let trap = h * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[cells]));
            assert!(trap.abs() < 1e-12, "n={n}: {trap}");
            assert!(v.iter().all(|x| x.abs() <= 0.3));
        }
    }

    #[test]
    fn noise_arguments_checked() {
        let grid = Grid::unit(10).unwrap();
        assert!(noise_family(NoiseKind::SquareWave, 0, 1.0, &grid).is_err());
        assert!(noise_family(NoiseKind::SquareWave, 2, 0.0, &grid).is_err());
    }

    #[test]
    fn sweep_keeps_slopes_and_rof_keeps_steps() {
        let grid = Grid::unit(DEFAULT_SWEEP_CELLS).unwrap();
        let g = DiscreteSignal::from_fn(grid, |x| x);
        for (alpha, p) in [(2.0, 1.0), (3.0, 2.0)] {
            let cfg = HotConfig::for_signal(9.0, crate::weights::WeightFunction::builtin(alpha, p).unwrap(), &g);
            let r = anti_staircase_experiment(9.0, &[10, 50], &cfg, DEFAULT_SWEEP_CELLS).unwrap();
            assert!(r.all_converged && r.no_jumps && r.slope_bounded, "{r:?}");
            assert!(r.rof_detects_jumps);
            for row in &r.rows {
                // the window ]a_n, b_n] holds about n/3 steps
                assert!(row.rof_plateau_breaks + 1 >= row.n / 3, "{row:?}");
            }
        }
    }

    #[test]
    fn lambda_sweep_shrinks_with_lambda() {
        let cfg = HotConfig::new(1.0, crate::weights::WeightFunction::builtin(3.0, 2.0).unwrap(), 1e-4);
        let rows = lambda_sweep(&[9.0, 36.0, 144.0], 200, &cfg, DEFAULT_SWEEP_CELLS).unwrap();
        assert!(rows.iter().all(|r| r.converged));
        assert!(rows.windows(2).all(|q| q[1].c1_proxy < q[0].c1_proxy), "{rows:?}");
    }

    #[test]
    fn c1_distance_examples() {
        let grid = Grid::unit(10).unwrap();
        let a = DiscreteSignal::from_fn(grid, |x| x);
        let b = DiscreteSignal::from_fn(grid, |x| x + 0.5);
        assert_eq!(c1_distance(&a, &a), 0.0);
        assert!((c1_distance(&a, &b) - 0.5).abs() < 1e-12);
    }
}
