//! ROF on the staircases `g_n`: the minimizer keeps every step inside a
//! window that converges to `[1/√λ, 1 − 1/√λ]`.

use tvstair::rof::staircase_experiment;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lambda = 9.0;
    println!("{:>6} {:>12} {:>12} {:>10} {:>10} {:>8}", "n", "a_n", "b_n", "err_a", "max_dev", "outer");
    for n in [10, 100, 1000, 10000] {
        let r = staircase_experiment(n, lambda)?;
        println!(
            "{n:>6} {:>12.8} {:>12.8} {:>10.2e} {:>10.1e} {:>8}",
            r.a_n, r.b_n, r.err_a, r.max_dev, r.outer_constant
        );
    }
    assert!(staircase_experiment(100, 4.0).is_err());
    Ok(())
}
