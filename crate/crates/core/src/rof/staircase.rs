use serde::Serialize;

use super::{rof_monotone_minimizer, MonotoneDatum, RofError};
use crate::signals::{DiscreteSignal, Grid};

/// Grid nodes per step used to check the reconstruction.
const SAMPLES_PER_STEP: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaircaseReport {
    pub lambda: f64,
    pub n: usize,
    pub c1: f64,
    pub c2: f64,
    pub a_n: f64,
    pub b_n: f64,
    /// `|a_n − 1/√λ|`
    pub err_a: f64,
    /// `|b_n − (1 − 1/√λ)|`
    pub err_b: f64,
    /// Largest `|u_n − g_n|` over the nodes in `]a_n, b_n]`.
    pub max_dev: f64,
    pub plateau_low: f64,
    pub plateau_high: f64,
    /// Whether `u_n` is constant on the nodes of `[0, a_n]` and of `]b_n, 1]`.
    pub outer_constant: bool,
    pub grid_cells: usize,
}

/// `g_n` sampled on `grid`.
pub fn staircase_signal(n: usize, grid: Grid) -> Result<DiscreteSignal, RofError> {
    let g = MonotoneDatum::staircase(n)?;
    Ok(g.sample(&grid))
}

/// Solves ROF for the staircase `g_n` and measures how closely the minimizer
/// follows the steps.
///
/// At `x = a_n` itself the minimizer takes the plateau value `c₁`, which sits
/// strictly below `g_n(a_n)` unless `c₁ n` is an integer, so equality is
/// checked on the half-open window.
pub fn staircase_experiment(n: usize, lambda: f64) -> Result<StaircaseReport, RofError> {
    if !(lambda > 4.0) {
        return Err(RofError::StaircaseLambda(lambda));
    }
    let g = MonotoneDatum::staircase(n)?;
    let sol = rof_monotone_minimizer(&g, lambda)?;
    let grid = Grid::unit(n * SAMPLES_PER_STEP).expect("at least ten cells");
    let u = sol.sample(&g, &grid);
    let gs = g.sample(&grid);

    let mut max_dev: f64 = 0.0;
    let mut outer_constant = true;
    for (i, x) in grid.nodes().enumerate() {
        let v = u.values()[i];
        if x <= sol.x_low {
            outer_constant &= v == sol.c1;
        } else if x <= sol.x_high {
            max_dev = max_dev.max((v - gs.values()[i]).abs());
        } else {
            outer_constant &= v == sol.c2;
        }
    }
    let r = 1.0 / lambda.sqrt();
    Ok(StaircaseReport {
        lambda,
        n,
        c1: sol.c1,
        c2: sol.c2,
        a_n: sol.x_low,
        b_n: sol.x_high,
        err_a: (sol.x_low - r).abs(),
        err_b: (sol.x_high - (1.0 - r)).abs(),
        max_dev,
        plateau_low: sol.c1,
        plateau_high: sol.c2,
        outer_constant,
        grid_cells: grid.cells(),
    })
}
