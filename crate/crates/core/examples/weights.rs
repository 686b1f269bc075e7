//! The built-in curvature weight, its transform `Ψ_p` and the jump penalties.

use tvstair::{ExtReal, JumpDirection, WeightFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let w = WeightFunction::builtin(2.0, 1.0)?;
    println!("total mass M = {}", w.total_mass());

    for t in [-10.0, -1.0, 0.0, 0.5, 1.0, 10.0] {
        let y = w.psi_transform_f(t);
        let back = w.psi_inverse(y)?;
        println!("psi({t:>5}) = {:.4}   Psi(t) = {y:.6}   inverse = {back:?}", w.eval(t));
    }

    // upward jump entered and left with slope 0
    let flat = ExtReal::Finite(0.0);
    let phi = w.jump_penalty(JumpDirection::Up, flat, flat);
    let hat = w.jump_penalty_hat(JumpDirection::Up, flat, flat);
    println!("Phi(up, 0, 0) = {phi}, Phi_hat = {hat}");

    // steep one-sided slopes make the jump cheap
    let steep = w.jump_penalty(JumpDirection::Up, ExtReal::Finite(100.0), ExtReal::PosInf);
    println!("Phi(up, 100, inf) = {steep:.4}");

    // p = 2 needs alpha > 2
    assert!(WeightFunction::builtin(2.0, 2.0).is_err());
    Ok(())
}
