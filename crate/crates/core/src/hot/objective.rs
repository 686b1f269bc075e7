use super::banded::Pentadiagonal;
use super::{HotConfig, HotError};
use crate::signals::DiscreteSignal;
use crate::weights::WeightFunction;

/// `s(t) = √(t² + ε²) − ε`, written to avoid cancellation near `t = 0`.
#[inline]
pub(crate) fn smooth_abs(t: f64, eps: f64) -> f64 {
    let r = (t * t + eps * eps).sqrt();
    t * t / (r + eps)
}

#[inline]
fn smooth_abs_prime(t: f64, eps: f64) -> f64 {
    t / (t * t + eps * eps).sqrt()
}

/// `(s^p)′(t) / t`, the lagged-diffusivity weight. For `p = 1` the quadratic
/// it defines majorizes `s` around `t`.
#[inline]
fn diffusivity(t: f64, eps: f64, p: f64) -> f64 {
    let inv_r = 1.0 / (t * t + eps * eps).sqrt();
    if p == 1.0 {
        inv_r
    } else {
        p * smooth_abs(t, eps).powf(p - 1.0) * inv_r
    }
}

/// `s(w)^p` and its derivative.
#[inline]
fn powered(w: f64, eps: f64, p: f64) -> (f64, f64) {
    let s = smooth_abs(w, eps);
    let ds = smooth_abs_prime(w, eps);
    if p == 1.0 {
        (s, ds)
    } else if s == 0.0 {
        (0.0, 0.0)
    } else {
        let sp1 = s.powf(p - 1.0);
        (sp1 * s, p * sp1 * ds)
    }
}

pub(crate) struct Objective<'a> {
    g: &'a [f64],
    h: f64,
    lambda: f64,
    eps: f64,
    weight: &'a WeightFunction,
    // scratch: cell slopes, Ψ_p of the slopes, ∂/∂d
    d: Vec<f64>,
    v: Vec<f64>,
    dd: Vec<f64>,
}

impl<'a> Objective<'a> {
    pub(crate) fn new(g: &'a DiscreteSignal, cfg: &'a HotConfig) -> Self {
        let cells = g.grid().cells();
        Objective {
            g: g.values(),
            h: g.grid().spacing(),
            lambda: cfg.lambda,
            eps: cfg.eps_abs,
            weight: &cfg.weight,
            d: vec![0.0; cells],
            v: vec![0.0; cells],
            dd: vec![0.0; cells],
        }
    }

    fn fill_slopes(&mut self, u: &[f64]) {
        let h = self.h;
        for i in 0..self.d.len() {
            self.d[i] = (u[i + 1] - u[i]) / h;
            self.v[i] = self.weight.psi_transform_f(self.d[i]);
        }
    }

    pub(crate) fn value(&mut self, u: &[f64]) -> f64 {
        self.fill_slopes(u);
        let (h, eps, p) = (self.h, self.eps, self.weight.p());
        let tv: f64 = self.d.iter().map(|&d| smooth_abs(d, eps)).sum::<f64>() * h;
        let curv: f64 = self
            .v
            .windows(2)
            .map(|q| powered((q[1] - q[0]) / h, eps, p).0)
            .sum::<f64>()
            * h;
        let fid: f64 = u.iter().zip(self.g).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() * self.lambda * h;
        tv + curv + fid
    }

    pub(crate) fn value_and_grad(&mut self, u: &[f64], grad: &mut [f64]) -> f64 {
        self.fill_slopes(u);
        let (h, eps, p) = (self.h, self.eps, self.weight.p());
        let cells = self.d.len();
        let mut f = 0.0;
        for i in 0..cells {
            f += h * smooth_abs(self.d[i], eps);
            self.dd[i] = h * smooth_abs_prime(self.d[i], eps);
        }
        // T = h Σ_{i ≥ 1} S(w_i), w_i = (v_i − v_{i−1}) / h:
        // ∂T/∂v_j = S′(w_j) − S′(w_{j+1})
        let mut dv = vec![0.0; cells];
        for i in 1..cells {
            let (s, ds) = powered((self.v[i] - self.v[i - 1]) / h, eps, p);
            f += h * s;
            dv[i - 1] += -ds;
            dv[i] += ds;
        }
        for i in 0..cells {
            self.dd[i] += self.weight.eval_root(self.d[i]) * dv[i];
        }
        for (i, gi) in grad.iter_mut().enumerate() {
            let r = u[i] - self.g[i];
            f += self.lambda * h * r * r;
            *gi = 2.0 * self.lambda * h * r;
        }
        for i in 0..cells {
            let c = self.dd[i] / h;
            grad[i + 1] += c;
            grad[i] -= c;
        }
        f
    }
}

impl Objective<'_> {
    /// Lagged-diffusivity model of the Hessian: the outer functions `s`,
    /// `s^p` replaced by the quadratics through their current slope, the
    /// inner maps `u ↦ d`, `u ↦ w` linearised. Symmetric positive definite.
    pub(crate) fn gauss_newton(&mut self, u: &[f64], m: &mut Pentadiagonal) {
        self.fill_slopes(u);
        m.reset();
        let (h, eps, p) = (self.h, self.eps, self.weight.p());
        let inv_h = 1.0 / h;
        for i in 0..self.d.len() {
            m.add_outer(i, &[-inv_h, inv_h], h * diffusivity(self.d[i], eps, 1.0));
        }
        let inv_h2 = inv_h * inv_h;
        for i in 1..self.d.len() {
            let a = self.weight.eval_root(self.d[i - 1]);
            let b = self.weight.eval_root(self.d[i]);
            let w = (self.v[i] - self.v[i - 1]) / h;
            let c = h * diffusivity(w, eps, p);
            if c > 0.0 {
                m.add_outer(i - 1, &[a * inv_h2, -(a + b) * inv_h2, b * inv_h2], c);
            }
        }
        for dj in &mut m.diag {
            *dj += 2.0 * self.lambda * h;
        }
    }
}

fn check(u: &DiscreteSignal, g: &DiscreteSignal, cfg: &HotConfig) -> Result<(), HotError> {
    cfg.validate()?;
    if u.grid() != g.grid() {
        return Err(HotError::GridMismatch);
    }
    Ok(())
}

/// `h Σ s(u′_i) + h Σ s(w_i)^p + λ h Σ (u_i − g_i)²`, where `w_i` is the
/// difference quotient of `Ψ_p` of consecutive cell slopes.
pub fn smoothed_objective(u: &DiscreteSignal, g: &DiscreteSignal, cfg: &HotConfig) -> Result<f64, HotError> {
    check(u, g, cfg)?;
    Ok(Objective::new(g, cfg).value(u.values()))
}

pub fn objective_gradient(u: &DiscreteSignal, g: &DiscreteSignal, cfg: &HotConfig) -> Result<Vec<f64>, HotError> {
    check(u, g, cfg)?;
    let mut grad = vec![0.0; u.values().len()];
    Objective::new(g, cfg).value_and_grad(u.values(), &mut grad);
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::energy_f1_discrete;
    use crate::signals::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn cfg(lambda: f64, alpha: f64, p: f64, eps: f64) -> HotConfig {
        HotConfig::new(lambda, WeightFunction::builtin(alpha, p).unwrap(), eps)
    }

    #[test]
    fn smooth_abs_basics() {
        assert_eq!(smooth_abs(0.0, 1e-3), 0.0);
        for t in [-3.0, -1e-2, 1e-5, 2.0] {
            assert!((smooth_abs(t, 1e-4) - t.abs()).abs() <= 1e-4);
        }
    }

    #[test]
    fn constant_is_zero() {
        let g = DiscreteSignal::constant(Grid::unit(50).unwrap(), 0.4);
        let c = cfg(9.0, 2.0, 1.0, 1e-4);
        assert_eq!(smoothed_objective(&g, &g, &c).unwrap(), 0.0);
        assert!(objective_gradient(&g, &g, &c).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn vanishing_eps_recovers_discrete_energy() {
        let grid = Grid::new(0.0, PI, 400).unwrap();
        let u = DiscreteSignal::from_fn(grid, f64::sin);
        let g = DiscreteSignal::from_fn(grid, |x| x.sin() + 0.1 * (7.0 * x).cos());
        let c = cfg(9.0, 2.0, 1.0, 1e-8);
        let fid: f64 = u.values().iter().zip(g.values()).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            * 9.0
            * grid.spacing();
        let e = energy_f1_discrete(&u, &c.weight).unwrap() + fid;
        assert!((smoothed_objective(&u, &g, &c).unwrap() - e).abs() < 1e-6);
    }

    #[test]
    fn increasing_in_lambda() {
        let grid = Grid::unit(100).unwrap();
        let u = DiscreteSignal::from_fn(grid, |x| x * x);
        let g = DiscreteSignal::from_fn(grid, |x| x);
        let mut last = f64::NEG_INFINITY;
        for lambda in [0.1, 1.0, 9.0, 100.0] {
            let e = smoothed_objective(&u, &g, &cfg(lambda, 2.0, 1.0, 1e-4)).unwrap();
            assert!(e > last);
            last = e;
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grid = Grid::unit(200).unwrap();
        let g = DiscreteSignal::from_fn(grid, |x| x);
        for (alpha, p) in [(2.0, 1.0), (3.0, 2.0), (4.0, 1.5)] {
            let c = cfg(9.0, alpha, p, 1e-2);
            for _ in 0..5 {
                let phase = rng.gen_range(0.0..6.0);
                let u = DiscreteSignal::from_fn(grid, |x| {
                    x + 0.2 * (9.0 * x + phase).sin() + 0.01 * rng.gen_range(-1.0..1.0)
                });
                let an = objective_gradient(&u, &g, &c).unwrap();
                let mut obj = Objective::new(&g, &c);
                let step = 1e-6;
                let mut uv = u.values().to_vec();
                let mut num = 0.0;
                let mut den = 0.0;
                for i in 0..uv.len() {
                    let x0 = uv[i];
                    uv[i] = x0 + step;
                    let fp = obj.value(&uv);
                    uv[i] = x0 - step;
                    let fm = obj.value(&uv);
                    uv[i] = x0;
                    let fd = (fp - fm) / (2.0 * step);
                    num += (fd - an[i]).powi(2);
                    den += fd * fd;
                }
                let rel = (num / den).sqrt();
                assert!(rel <= 1e-5, "alpha={alpha} p={p}: {rel}");
            }
        }
    }

    #[test]
    fn grid_mismatch() {
        let a = DiscreteSignal::constant(Grid::unit(10).unwrap(), 0.0);
        let b = DiscreteSignal::constant(Grid::unit(11).unwrap(), 0.0);
        assert!(matches!(smoothed_objective(&a, &b, &cfg(1.0, 2.0, 1.0, 1e-4)), Err(HotError::GridMismatch)));
    }
}
