//! Exact ROF minimizer of monotone data: plateaus `c₁`, `c₂` and the window
//! where the minimizer follows the datum.

use tvstair::rof::{rof_monotone_minimizer, solve_c1_c2, MonotoneDatum};
use tvstair::Grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ramp = MonotoneDatum::unit_ramp();
    for lambda in [5.0, 9.0, 25.0, 100.0] {
        let (c1, c2) = solve_c1_c2(&ramp, lambda)?;
        println!("lambda = {lambda:>5}: c1 = {c1:.10}, c2 = {c2:.10}, 1/sqrt(lambda) = {:.10}", 1.0 / lambda.sqrt());
    }

    // any nondecreasing datum, here a smooth s-curve
    let scurve = MonotoneDatum::custom(0.0, 1.0, |x| x * x * (3.0 - 2.0 * x));
    let sol = rof_monotone_minimizer(&scurve, 16.0)?;
    println!("s-curve: u = {:.4} on [0, {:.4}], = g, = {:.4} on [{:.4}, 1]", sol.c1, sol.x_low, sol.c2, sol.x_high);

    let grid = Grid::unit(10)?;
    let u = sol.sample(&scurve, &grid);
    for (x, v) in grid.nodes().zip(u.values()) {
        println!("  u({x:.1}) = {v:.4}   g = {:.4}", scurve.eval(x));
    }

    // small lambda: no admissible plateau levels
    println!("lambda = 1: {}", rof_monotone_minimizer(&ramp, 1.0).unwrap_err());
    Ok(())
}
