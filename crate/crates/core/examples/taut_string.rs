//! Discrete ROF by the taut-string algorithm, on noisy data and against the
//! exact continuum solution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tvstair::rof::{rof_discrete_energy, rof_discrete_minimizer, rof_monotone_minimizer, MonotoneDatum};
use tvstair::signals::{jump_detector, DEFAULT_JUMP_KAPPA};
use tvstair::{DiscreteSignal, Grid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::unit(2000)?;
    let ramp = MonotoneDatum::unit_ramp();
    let u = rof_discrete_minimizer(&ramp.sample(&grid), 9.0)?;
    let exact = rof_monotone_minimizer(&ramp, 9.0)?.sample(&ramp, &grid);
    println!("ramp: sup |discrete - exact| = {:.2e}", u.sup_distance(&exact));

    // a noisy ramp comes back as a staircase
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = DiscreteSignal::from_fn(grid, |x| x + 0.05 * rng.gen_range(-1.0..1.0));
    for lambda in [9.0, 100.0, 1000.0] {
        let u = rof_discrete_minimizer(&g, lambda)?;
        println!(
            "noisy, lambda = {lambda:>6}: energy {:.5}, {} detected jumps",
            rof_discrete_energy(&u, &g, lambda),
            jump_detector(&u, DEFAULT_JUMP_KAPPA).len()
        );
    }
    Ok(())
}
