//! Grids, sampled signals, CSV round trips and the jump detector.

use tvstair::signals::{jump_detector, read_signal_csv, total_variation, write_signal_csv, DEFAULT_JUMP_KAPPA};
use tvstair::{DiscreteSignal, ExtReal, Grid, PiecewiseBVFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::unit(200)?;
    let smooth = DiscreteSignal::from_fn(grid, |x| x * x);
    let step = DiscreteSignal::from_fn(grid, |x| if x < 0.5 { 0.0 } else { 1.0 } + 0.1 * x);

    println!("TV(x^2) = {:.6}", total_variation(&smooth));
    println!("TV(step) = {:.6}", total_variation(&step));

    for j in jump_detector(&step, DEFAULT_JUMP_KAPPA) {
        println!("jump at {:.4}: size {:.4} ({:?})", j.x, j.jump, j.nu);
    }
    assert!(jump_detector(&smooth, DEFAULT_JUMP_KAPPA).is_empty());

    let mut buf = Vec::new();
    write_signal_csv(&mut buf, &step)?;
    let back = read_signal_csv(buf.as_slice())?;
    println!("csv round trip: sup distance {:e}", back.sup_distance(&step));

    // a finite BV representation: two flat pieces and one jump
    let f = PiecewiseBVFunction::step(grid, 0.5, 0.0, 1.0, ExtReal::Finite(0.0), ExtReal::Finite(0.0))?;
    println!("piecewise: {} pieces, {} jump(s), f(0.75) = {}", f.pieces().len(), f.jumps().len(), f.eval(0.75));
    println!("{}", serde_json::to_string(&f.jumps()[0])?);
    Ok(())
}
