//! Generalized Cantor sets, the Cantor function and the variation bound of
//! the fixture built from a derivative that blows up on the removed
//! intervals.

use tvstair::cantor::{build_cantor_intervals, cantor_function, variation_bound_check, w_integral, w_integral_limit};
use tvstair::WeightFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let classic = build_cantor_intervals(1.0 / 3.0, 10)?;
    for x in [0.0, 0.25, 1.0 / 3.0, 0.5, 0.75, 1.0] {
        println!("f({x:.4}) = {:.6}", cantor_function(&classic, x)?);
    }

    let delta = 1.0 / 16.0;
    let w = WeightFunction::builtin(2.0, 1.0)?;
    for m in [2, 4, 8] {
        let fix = build_cantor_intervals(delta, m)?;
        let rep = variation_bound_check(&fix, &w, m)?;
        println!(
            "m = {m}: {} intervals, measure left {:.3e}, int w = {:.6}, Var(v_m) = {:.6} <= {:.6}",
            fix.removed_intervals.len(),
            fix.remaining_measure(),
            w_integral(&fix, m)?,
            rep.variation,
            rep.series_bound
        );
    }
    let fix = build_cantor_intervals(delta, 8)?;
    println!("int w -> {}", w_integral_limit(&fix)?);
    Ok(())
}
