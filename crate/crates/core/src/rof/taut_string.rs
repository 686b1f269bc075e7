use super::RofError;
use crate::signals::DiscreteSignal;

/// Exact minimizer of `Σ |u_{i+1} − u_i| + λ h Σ (u_i − g_i)²`.
///
/// Taut-string solver with finite termination (Condat's direct algorithm,
/// regularization weight `1/(2λh)`). The result is clamped to `[min g, max g]`,
/// which only removes rounding since the exact minimizer obeys the maximum
/// principle.
pub fn rof_discrete_minimizer(g: &DiscreteSignal, lambda: f64) -> Result<DiscreteSignal, RofError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(RofError::InvalidLambda(lambda));
    }
    let mu = 1.0 / (2.0 * lambda * g.grid().spacing());
    let mut u = tv1d(g.values(), mu);
    let (lo, hi) = (g.min(), g.max());
    for v in &mut u {
        *v = v.clamp(lo, hi);
    }
    Ok(DiscreteSignal::new(*g.grid(), u).expect("same length as input"))
}

/// `Σ |u_{i+1} − u_i| + λ h Σ (u_i − g_i)²`.
pub fn rof_discrete_energy(u: &DiscreteSignal, g: &DiscreteSignal, lambda: f64) -> f64 {
    let h = g.grid().spacing();
    let tv: f64 = u.values().windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    let fid: f64 = u.values().iter().zip(g.values()).map(|(a, b)| (a - b) * (a - b)).sum();
    tv + lambda * h * fid
}

/// Solves `min ½ Σ (u_i − y_i)² + μ Σ |u_{i+1} − u_i|`.
fn tv1d(input: &[f64], mu: f64) -> Vec<f64> {
    let width = input.len();
    let mut out = vec![0.0; width];
    if width == 0 {
        return out;
    }
    if width == 1 {
        out[0] = input[0];
        return out;
    }
    let (mut k, mut k0, mut kplus, mut kminus) = (0usize, 0usize, 0usize, 0usize);
    let mut umin = mu;
    let mut umax = -mu;
    let mut vmin = input[0] - mu;
    let mut vmax = input[0] + mu;
    let two_mu = 2.0 * mu;
    loop {
        while k == width - 1 {
            if umin < 0.0 {
                loop {
                    out[k0] = vmin;
                    k0 += 1;
                    if k0 > kminus {
                        break;
                    }
                }
                if k0 == width {
                    return out;
                }
                k = k0;
                kminus = k0;
                vmin = input[k0];
                umin = mu;
                umax = vmin + umin - vmax;
            } else if umax > 0.0 {
                loop {
                    out[k0] = vmax;
                    k0 += 1;
                    if k0 > kplus {
                        break;
                    }
                }
                if k0 == width {
                    return out;
                }
                k = k0;
                kplus = k0;
                vmax = input[k0];
                umax = -mu;
                umin = vmax + umax - vmin;
            } else {
                vmin += umin / (k - k0 + 1) as f64;
                loop {
                    out[k0] = vmin;
                    k0 += 1;
                    if k0 > k {
                        break;
                    }
                }
                return out;
            }
        }
        umin += input[k + 1] - vmin;
        if umin < -mu {
            loop {
                out[k0] = vmin;
                k0 += 1;
                if k0 > kminus {
                    break;
                }
            }
            k = k0;
            kminus = k0;
            kplus = k0;
            vmin = input[k0];
            vmax = vmin + two_mu;
            umin = mu;
            umax = -mu;
        } else {
            umax += input[k + 1] - vmax;
            if umax > mu {
                loop {
                    out[k0] = vmax;
                    k0 += 1;
                    if k0 > kplus {
                        break;
                    }
                }
                k = k0;
                kminus = k0;
                kplus = k0;
                vmax = input[k0];
                vmin = vmax - two_mu;
                umin = mu;
                umax = -mu;
            } else {
                k += 1;
                if umin >= mu {
                    kminus = k;
                    vmin += (umin - mu) / (kminus - k0 + 1) as f64;
                    umin = mu;
                }
                if umax <= -mu {
                    kplus = k;
                    vmax += (umax + mu) / (kplus - k0 + 1) as f64;
                    umax = -mu;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::Grid;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Optimality certificate for `½‖u − y‖² + μ TV(u)`: the running sums
    /// `z_k = Σ_{i≤k} (y_i − u_i)` stay in `[−μ, μ]`, equal `−μ·sign(Δu_k)` where
    /// `u` moves, and vanish at the end.
    fn kkt_violation(y: &[f64], u: &[f64], mu: f64) -> f64 {
        let mut z = 0.0;
        let mut worst: f64 = 0.0;
        for k in 0..y.len() - 1 {
            z += y[k] - u[k];
            worst = worst.max(z.abs() - mu);
            let d = u[k + 1] - u[k];
            if d.abs() > 1e-12 * (1.0 + mu) {
                worst = worst.max((z + mu * d.signum()).abs());
            }
        }
        z += y[y.len() - 1] - u[y.len() - 1];
        worst.max(z.abs())
    }

    #[test]
    fn constant_is_fixed() {
        let g = DiscreteSignal::constant(Grid::unit(50).unwrap(), 0.7);
        let u = rof_discrete_minimizer(&g, 3.0).unwrap();
        assert_eq!(u.values(), g.values());
        assert_eq!(rof_discrete_energy(&u, &g, 3.0), 0.0);
    }

    #[test]
    fn ramp_matches_clamp() {
        let grid = Grid::unit(2000).unwrap();
        let g = DiscreteSignal::from_fn(grid, |x| x);
        let u = rof_discrete_minimizer(&g, 9.0).unwrap();
        let dev = u
            .values()
            .iter()
            .zip(grid.nodes())
            .map(|(v, x)| (v - x.clamp(1.0 / 3.0, 2.0 / 3.0)).abs())
            .fold(0.0, f64::max);
        assert!(dev <= 5e-3, "dev = {dev}");
    }

    #[test]
    fn two_point_closed_form() {
        // y = (0, 1): u = (μ, 1 − μ) for μ < ½, else the mean
        assert_eq!(tv1d(&[0.0, 1.0], 0.2), vec![0.2, 0.8]);
        assert_eq!(tv1d(&[0.0, 1.0], 0.7), vec![0.5, 0.5]);
    }

    #[test]
    fn random_data_satisfy_certificate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..200 {
            let n = rng.gen_range(2..300);
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mu = 10f64.powf(rng.gen_range(-3.0..1.5));
            let u = tv1d(&y, mu);
            let v = kkt_violation(&y, &u, mu);
            assert!(v < 1e-9 * (1.0 + mu) * n as f64, "trial {trial}: violation {v}");
        }
    }

    #[test]
    fn perturbations_increase_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let grid = Grid::unit(120).unwrap();
        let g = DiscreteSignal::from_fn(grid, |x| (6.0 * x).sin() + rng.gen_range(-0.3..0.3));
        let lambda = 20.0;
        let u = rof_discrete_minimizer(&g, lambda).unwrap();
        let e0 = rof_discrete_energy(&u, &g, lambda);
        for _ in 0..100 {
            let p = u.map(|v| v + 1e-3 * rng.gen_range(-1.0..1.0));
            assert!(rof_discrete_energy(&p, &g, lambda) > e0);
        }
    }

    #[test]
    fn vanishing_lambda_gives_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid = Grid::unit(64).unwrap();
        let g = DiscreteSignal::from_fn(grid, |_| rng.gen_range(0.0..1.0));
        let mean = g.values().iter().sum::<f64>() / g.values().len() as f64;
        let u = rof_discrete_minimizer(&g, 1e-8).unwrap();
        assert!(u.values().iter().all(|v| (v - mean).abs() < 1e-4));
    }

    #[test]
    fn rejects_bad_lambda() {
        let g = DiscreteSignal::constant(Grid::unit(4).unwrap(), 0.0);
        assert!(rof_discrete_minimizer(&g, 0.0).is_err());
        assert!(rof_discrete_minimizer(&g, f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn maximum_principle_and_monotonicity(
            incs in prop::collection::vec(0.0f64..1.0, 3..200),
            lambda in 0.1f64..100.0,
        ) {
            let mut acc = 0.0;
            let vals: Vec<f64> = incs.iter().map(|d| { acc += d; acc }).collect();
            let grid = Grid::unit(vals.len() - 1).unwrap();
            let g = DiscreteSignal::new(grid, vals).unwrap();
            let u = rof_discrete_minimizer(&g, lambda).unwrap();
            for v in u.values() {
                prop_assert!(*v >= g.min() && *v <= g.max());
            }
            for w in u.values().windows(2) {
                prop_assert!(w[1] >= w[0]);
            }
        }

        #[test]
        fn affine_equivariance(
            vals in prop::collection::vec(-1.0f64..1.0, 3..100),
            lambda in 0.5f64..50.0,
            alpha in 0.2f64..5.0,
            beta in -3.0f64..3.0,
        ) {
            let grid = Grid::unit(vals.len() - 1).unwrap();
            let g = DiscreteSignal::new(grid, vals).unwrap();
            let lhs = rof_discrete_minimizer(&g.map(|v| alpha * v + beta), lambda).unwrap();
            let rhs = rof_discrete_minimizer(&g, alpha * lambda).unwrap().map(|v| alpha * v + beta);
            prop_assert!(lhs.sup_distance(&rhs) < 1e-10, "{}", lhs.sup_distance(&rhs));
        }
    }
}
