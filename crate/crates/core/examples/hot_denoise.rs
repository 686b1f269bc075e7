//! Higher-order denoising of a ramp hidden under a staircase residual.

use tvstair::hot::{minimize_hot, noise_family, HotConfig, NoiseKind};
use tvstair::rof::rof_discrete_minimizer;
use tvstair::signals::{jump_detector, DEFAULT_JUMP_KAPPA};
use tvstair::{DiscreteSignal, Grid, WeightFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::unit(2000)?;
    let ramp = DiscreteSignal::from_fn(grid, |x| x);
    let g = ramp.add(&noise_family(NoiseKind::StaircaseResidual, 50, 1.0, &grid)?)?;

    for p in [1.0, 2.0] {
        let cfg = HotConfig::for_signal(9.0, WeightFunction::builtin(3.0, p)?, &g);
        let r = minimize_hot(&g, &cfg, None)?;
        println!(
            "p = {p}: converged {} in {} iterations, energy {:.6}, max slope {:.4}, {} jumps",
            r.converged,
            r.iterations,
            r.energy,
            r.max_abs_slope,
            r.jump_records.len()
        );
    }

    let rof = rof_discrete_minimizer(&g, 9.0)?;
    println!("ROF on the same data: {} jumps", jump_detector(&rof, DEFAULT_JUMP_KAPPA).len());
    Ok(())
}
