//! The sweep over `n`: the higher-order minimizer stays jump-free with
//! bounded slope while ROF reproduces the steps. Then the λ sweep.

use tvstair::hot::{anti_staircase_experiment, lambda_sweep, HotConfig, DEFAULT_SWEEP_CELLS};
use tvstair::{DiscreteSignal, Grid, WeightFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ramp = DiscreteSignal::from_fn(Grid::unit(DEFAULT_SWEEP_CELLS)?, |x| x);
    let cfg = HotConfig::for_signal(9.0, WeightFunction::builtin(2.0, 1.0)?, &ramp);

    let rep = anti_staircase_experiment(9.0, &[10, 50, 100, 200], &cfg, DEFAULT_SWEEP_CELLS)?;
    println!("clean ramp max slope {:.4}", rep.clean_max_slope);
    println!("{:>5} {:>8} {:>6} {:>10} {:>11} {:>9}", "n", "slope", "jumps", "sup dist", "ROF breaks", "ROF jumps");
    for r in &rep.rows {
        println!(
            "{:>5} {:>8.4} {:>6} {:>10.2e} {:>11} {:>9}",
            r.n, r.max_abs_slope, r.jump_count, r.sup_dist_clean, r.rof_plateau_breaks, r.rof_jump_count
        );
    }
    println!("no jumps {}, slope bounded {}", rep.no_jumps, rep.slope_bounded);

    let cfg = HotConfig { weight: WeightFunction::builtin(3.0, 2.0)?, ..cfg };
    for row in lambda_sweep(&[9.0, 36.0, 144.0], 200, &cfg, DEFAULT_SWEEP_CELLS)? {
        println!("{row:?}");
    }
    Ok(())
}
