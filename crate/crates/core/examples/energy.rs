//! Discrete and relaxed higher-order energies, and the domain check that
//! separates `p = 1` from `p > 1`.

use std::f64::consts::PI;

use tvstair::energy::{
    cusp_example, energy_f1_discrete, energy_f1_relaxed, energy_f1_relaxed_hat, energy_fp_discrete, energy_fp_relaxed,
    membership_diagnostics,
};
use tvstair::{DiscreteSignal, ExtReal, Grid, PiecewiseBVFunction, WeightFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let w1 = WeightFunction::builtin(2.0, 1.0)?;
    let sin = DiscreteSignal::from_fn(Grid::new(0.0, PI, 4000)?, f64::sin);
    println!("F1(sin on [0, pi]) = {:.6}", energy_f1_discrete(&sin, &w1)?);

    let w2 = WeightFunction::builtin(3.0, 2.0)?;
    let sq = DiscreteSignal::from_fn(Grid::unit(4000)?, |x| x * x);
    println!("F2(x^2 on [0, 1]) = {:.6}", energy_fp_discrete(&sq, &w2)?);

    // a unit jump between flat pieces
    let zero = ExtReal::Finite(0.0);
    let step = PiecewiseBVFunction::step(Grid::unit(100)?, 0.5, 0.0, 1.0, zero, zero)?;
    let a = energy_f1_relaxed(&step, &w1)?;
    let b = energy_f1_relaxed_hat(&step, &w1)?;
    println!("relaxed F1: {a:?}");
    println!("split form: {b:?}");
    println!("relaxed F2 of the same step: {:?}", energy_fp_relaxed(&step, &w2)?.total);

    // a jump reached with infinite slope from both sides is admissible for p > 1
    let cusp = cusp_example(3.0, 1.5, 0.5, 2000)?;
    let w = WeightFunction::builtin(3.0, 1.5)?;
    println!("cusp: in domain = {}, F = {:?}", membership_diagnostics(&cusp, &w).in_domain, energy_fp_relaxed(&cusp, &w)?.total);
    Ok(())
}
