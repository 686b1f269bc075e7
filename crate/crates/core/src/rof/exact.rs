use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::RofError;
use crate::numeric::{adaptive_simpson, bisect_increasing};
use crate::signals::{DiscreteSignal, Grid};

/// Bisection stopping width for `c₁`, `c₂`.
pub const C_TOL: f64 = 1e-12;
pub const MAX_BISECTION_ITERS: usize = 200;
/// Quadrature tolerance inside the root-find for [`MonotoneDatum::Custom`].
const QUAD_TOL: f64 = 1e-13;
/// `c₂ − c₁` must exceed this for the plateaus to count as distinct.
const MIN_SEPARATION: f64 = 1e-9;
/// Snapping window when locating the step of a staircase at a node.
const STEP_SNAP: f64 = 1e-9;

/// A nondecreasing datum `g: [a, b] → [0, 1]`.
#[derive(Clone)]
pub enum MonotoneDatum {
    /// `g(x) = (x − a) / (b − a)`.
    Ramp { a: f64, b: f64 },
    /// `g_n(x) = i/n` on `[(i−1)/n, i/n)`, `i = 1..n`, on `[0, 1]`, with `g_n(1) = 1`.
    Staircase { steps: usize },
    /// Any nondecreasing map; inverse and integrals are computed numerically.
    Custom {
        a: f64,
        b: f64,
        g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for MonotoneDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonotoneDatum::Ramp { a, b } => write!(f, "Ramp([{a}, {b}])"),
            MonotoneDatum::Staircase { steps } => write!(f, "Staircase({steps})"),
            MonotoneDatum::Custom { a, b, .. } => write!(f, "Custom([{a}, {b}])"),
        }
    }
}

impl MonotoneDatum {
    pub fn unit_ramp() -> Self {
        MonotoneDatum::Ramp { a: 0.0, b: 1.0 }
    }

    pub fn staircase(steps: usize) -> Result<Self, RofError> {
        if steps == 0 {
            return Err(RofError::NoSteps);
        }
        Ok(MonotoneDatum::Staircase { steps })
    }

    pub fn custom<G>(a: f64, b: f64, g: G) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        MonotoneDatum::Custom { a, b, g: Arc::new(g) }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            MonotoneDatum::Ramp { a, b } | MonotoneDatum::Custom { a, b, .. } => (*a, *b),
            MonotoneDatum::Staircase { .. } => (0.0, 1.0),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            MonotoneDatum::Ramp { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            MonotoneDatum::Staircase { steps } => {
                let n = *steps;
                let i = snapped_floor(x * n as f64) + 1;
                (i.clamp(1, n as i64) as f64) / n as f64
            }
            MonotoneDatum::Custom { g, .. } => g(x),
        }
    }

    pub fn sample(&self, grid: &Grid) -> DiscreteSignal {
        DiscreteSignal::from_fn(*grid, |x| self.eval(x))
    }

    fn inverse(&self, c: f64) -> f64 {
        let (a, b) = self.domain();
        if c <= 0.0 {
            return a;
        }
        match self {
            MonotoneDatum::Ramp { a, b } => a + c * (b - a),
            MonotoneDatum::Staircase { steps } => {
                let n = *steps as f64;
                let k = snapped_ceil(c * n);
                (k - 1).max(0) as f64 / n
            }
            MonotoneDatum::Custom { g, .. } => {
                if g(a) >= c {
                    return a;
                }
                // g(lo) < c <= g(hi) is kept throughout
                let (mut lo, mut hi) = (a, b);
                let tol = 1e-15 * (b - a).abs().max(1.0);
                for _ in 0..MAX_BISECTION_ITERS {
                    if hi - lo <= tol {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if g(mid) >= c {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        }
    }

    /// `∫_a^{g⁻¹(c)} (c − g(x)) dx`.
    pub fn lower_gap(&self, c: f64) -> f64 {
        let (a, _) = self.domain();
        let x = self.inverse(c);
        match self {
            MonotoneDatum::Ramp { a, b } => 0.5 * (b - a) * c * c,
            MonotoneDatum::Staircase { steps } => {
                // g_n takes the values 1/n, …, (k−1)/n on [0, (k−1)/n]
                let n = *steps as f64;
                let km1 = (x * n).round();
                km1 * c / n - km1 * (km1 + 1.0) / (2.0 * n * n)
            }
            MonotoneDatum::Custom { g, .. } => adaptive_simpson(|t| c - g(t), a, x, QUAD_TOL),
        }
    }

    /// `∫_{g⁻¹(c)}^b (g(x) − c) dx`.
    pub fn upper_gap(&self, c: f64) -> f64 {
        let (_, b) = self.domain();
        let x = self.inverse(c);
        match self {
            MonotoneDatum::Ramp { a, b } => 0.5 * (b - a) * (1.0 - c) * (1.0 - c),
            MonotoneDatum::Staircase { steps } => {
                let n = *steps as f64;
                let km1 = (x * n).round();
                // Σ_{i=k}^{n} (i/n − c) / n
                let count = n - km1;
                let sum_i = 0.5 * n * (n + 1.0) - 0.5 * km1 * (km1 + 1.0);
                (sum_i / n - count * c) / n
            }
            MonotoneDatum::Custom { g, .. } => adaptive_simpson(|t| g(t) - c, x, b, QUAD_TOL),
        }
    }

    /// `∫_0^c g⁻¹(y) dy`, available in closed form for the built-in data.
    pub fn integral_of_inverse(&self, c: f64) -> f64 {
        match self {
            MonotoneDatum::Ramp { a, b } => a * c + 0.5 * (b - a) * c * c,
            MonotoneDatum::Staircase { steps } => {
                // g_n⁻¹ = j/n on ]j/n, (j+1)/n]
                let n = *steps as f64;
                if c <= 0.0 {
                    return 0.0;
                }
                let km1 = (snapped_ceil(c * n) - 1).max(0) as f64;
                km1 * (km1 - 1.0) / (2.0 * n * n) + km1 / n * (c - km1 / n)
            }
            MonotoneDatum::Custom { .. } => adaptive_simpson(|y| self.inverse(y), 0.0, c, QUAD_TOL),
        }
    }
}

fn snapped_floor(t: f64) -> i64 {
    let r = t.round();
    if (t - r).abs() <= STEP_SNAP {
        r as i64
    } else {
        t.floor() as i64
    }
}

fn snapped_ceil(t: f64) -> i64 {
    let r = t.round();
    if (t - r).abs() <= STEP_SNAP {
        r as i64
    } else {
        t.ceil() as i64
    }
}

/// Left-continuous generalized inverse `g⁻¹(c) = inf{x ∈ [a, b] : g(x) ≥ c}`.
pub fn generalized_inverse(g: &MonotoneDatum, c: f64) -> Result<f64, RofError> {
    if !(0.0..=1.0).contains(&c) {
        return Err(RofError::LevelOutOfRange(c));
    }
    Ok(g.inverse(c))
}

/// Plateau levels `c₁ < c₂` of the monotone minimizer, solving
/// `2λ ∫_a^{g⁻¹(c₁)} (c₁ − g) = 1` and `2λ ∫_{g⁻¹(c₂)}^b (g − c₂) = 1` by
/// bisection on the left-hand sides.
pub fn solve_c1_c2(g: &MonotoneDatum, lambda: f64) -> Result<(f64, f64), RofError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(RofError::InvalidLambda(lambda));
    }
    let lower = |c: f64| 2.0 * lambda * g.lower_gap(c) - 1.0;
    let upper = |c: f64| 2.0 * lambda * g.upper_gap(c) - 1.0;

    if lower(1.0) < 0.0 {
        return Err(RofError::Unsatisfiable {
            lambda,
            reason: format!("lower condition stays below 1 up to c = 1 (reaches {})", lower(1.0) + 1.0),
        });
    }
    if upper(0.0) < 0.0 {
        return Err(RofError::Unsatisfiable {
            lambda,
            reason: format!("upper condition stays below 1 down to c = 0 (reaches {})", upper(0.0) + 1.0),
        });
    }
    let c1 = bisect_increasing(lower, 0.0, 1.0, C_TOL, MAX_BISECTION_ITERS).root;
    let c2 = bisect_increasing(|c| -upper(c), 0.0, 1.0, C_TOL, MAX_BISECTION_ITERS).root;
    if !(c1 > 0.0 && c2 < 1.0 && c2 - c1 > MIN_SEPARATION) {
        return Err(RofError::Unsatisfiable {
            lambda,
            reason: format!("no levels with 0 < c1 < c2 < 1 (c1 = {c1}, c2 = {c2})"),
        });
    }
    Ok((c1, c2))
}

/// The three-branch minimizer: `c₁` up to `g⁻¹(c₁)`, `g` up to `g⁻¹(c₂)`, then `c₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RofSolution {
    pub c1: f64,
    pub c2: f64,
    pub x_low: f64,
    pub x_high: f64,
    pub lambda: f64,
}

impl RofSolution {
    pub fn eval(&self, g: &MonotoneDatum, x: f64) -> f64 {
        if x <= self.x_low {
            self.c1
        } else if x <= self.x_high {
            g.eval(x)
        } else {
            self.c2
        }
    }

    pub fn sample(&self, g: &MonotoneDatum, grid: &Grid) -> DiscreteSignal {
        DiscreteSignal::from_fn(*grid, |x| self.eval(g, x))
    }
}

pub fn rof_monotone_minimizer(g: &MonotoneDatum, lambda: f64) -> Result<RofSolution, RofError> {
    let (c1, c2) = solve_c1_c2(g, lambda)?;
    Ok(RofSolution {
        c1,
        c2,
        x_low: g.inverse(c1),
        x_high: g.inverse(c2),
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_examples() {
        let ramp = MonotoneDatum::unit_ramp();
        assert!((generalized_inverse(&ramp, 0.42).unwrap() - 0.42).abs() < 1e-15);
        assert_eq!(generalized_inverse(&ramp, 0.0).unwrap(), 0.0);
        let s4 = MonotoneDatum::staircase(4).unwrap();
        assert_eq!(generalized_inverse(&s4, 0.6).unwrap(), 0.5);
        assert_eq!(generalized_inverse(&s4, 0.0).unwrap(), 0.0);
        assert!(generalized_inverse(&s4, 1.5).is_err());
        assert!(generalized_inverse(&s4, -0.1).is_err());
    }

    #[test]
    fn staircase_inverse_matches_enumeration() {
        // oracle: scan a fine grid for the first x with g(x) >= c
        let n = 7;
        let g = MonotoneDatum::staircase(n).unwrap();
        let fine = 7 * 1000;
        for &c in &[0.01, 0.1428, 0.15, 0.5, 0.71, 0.999, 1.0] {
            let first = (0..=fine)
                .map(|j| j as f64 / fine as f64)
                .find(|&x| g.eval(x) >= c)
                .unwrap();
            assert!((generalized_inverse(&g, c).unwrap() - first).abs() < 1e-12, "c={c}");
        }
    }

    #[test]
    fn staircase_values() {
        let g = MonotoneDatum::staircase(10).unwrap();
        assert_eq!(g.eval(0.0), 0.1);
        assert_eq!(g.eval(0.3), 0.4);
        assert_eq!(g.eval(0.35), 0.4);
        assert_eq!(g.eval(0.7), 0.8);
        assert_eq!(g.eval(1.0), 1.0);
    }

    #[test]
    fn closed_form_gaps_match_quadrature() {
        for g in [MonotoneDatum::unit_ramp(), MonotoneDatum::staircase(9).unwrap()] {
            let h = g.clone();
            let f = move |x: f64| h.eval(x);
            for &c in &[0.05, 0.2, 0.5, 0.77, 0.95] {
                let x = g.inverse(c);
                // split at the steps so Simpson only sees smooth panels
                let cuts: Vec<f64> = (0..=900).map(|j| j as f64 / 900.0).collect();
                let lo: f64 = cuts
                    .windows(2)
                    .filter(|w| w[1] <= x + 1e-15)
                    .map(|w| adaptive_simpson(|t| c - f(t.min(w[1] - 1e-13)), w[0], w[1], 1e-14))
                    .sum();
                let hi: f64 = cuts
                    .windows(2)
                    .filter(|w| w[0] >= x - 1e-15)
                    .map(|w| adaptive_simpson(|t| f(t.min(w[1] - 1e-13)) - c, w[0], w[1], 1e-14))
                    .sum();
                assert!((g.lower_gap(c) - lo).abs() < 1e-9, "{g:?} c={c}: {} vs {lo}", g.lower_gap(c));
                assert!((g.upper_gap(c) - hi).abs() < 1e-9, "{g:?} c={c}: {} vs {hi}", g.upper_gap(c));
            }
        }
    }

    #[test]
    fn inverse_integral_identity() {
        // ∫_a^{g⁻¹(c)} (c − g) = ∫_0^c (g⁻¹(y) − a) dy, and the mirrored
        // identity ∫_{g⁻¹(c)}^b (g − c) = ∫_c^1 (b − g⁻¹(y)) dy
        for g in [
            MonotoneDatum::unit_ramp(),
            MonotoneDatum::Ramp { a: -1.0, b: 3.0 },
            MonotoneDatum::staircase(13).unwrap(),
        ] {
            let (a, b) = g.domain();
            for &c in &[0.1, 0.33, 0.5, 0.9] {
                let lhs = g.lower_gap(c);
                let rhs = g.integral_of_inverse(c) - a * c;
                assert!((lhs - rhs).abs() < 1e-13, "{g:?} c={c}");
                let lhs2 = g.upper_gap(c);
                let rhs2 = b * (1.0 - c) - (g.integral_of_inverse(1.0) - g.integral_of_inverse(c));
                assert!((lhs2 - rhs2).abs() < 1e-13, "{g:?} c={c}");
            }
        }
    }

    #[test]
    fn ramp_lambda_9() {
        let (c1, c2) = solve_c1_c2(&MonotoneDatum::unit_ramp(), 9.0).unwrap();
        assert!((c1 - 1.0 / 3.0).abs() < 1e-10);
        assert!((c2 - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn ramp_lambda_16() {
        let (c1, c2) = solve_c1_c2(&MonotoneDatum::unit_ramp(), 16.0).unwrap();
        assert!((c1 - 0.25).abs() < 1e-10);
        assert!((c2 - 0.75).abs() < 1e-10);
    }

    #[test]
    fn ramp_lambda_4_and_below_rejected() {
        for lambda in [4.0, 3.0, 1.0, 0.5] {
            assert!(
                matches!(solve_c1_c2(&MonotoneDatum::unit_ramp(), lambda), Err(RofError::Unsatisfiable { .. })),
                "lambda={lambda}"
            );
        }
        assert!(matches!(
            solve_c1_c2(&MonotoneDatum::unit_ramp(), -1.0),
            Err(RofError::InvalidLambda(_))
        ));
    }

    #[test]
    fn minimizer_is_clamp_for_ramp() {
        let g = MonotoneDatum::unit_ramp();
        let sol = rof_monotone_minimizer(&g, 9.0).unwrap();
        for j in 0..=1000 {
            let x = j as f64 / 1000.0;
            let expected = x.clamp(1.0 / 3.0, 2.0 / 3.0);
            assert!((sol.eval(&g, x) - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn large_lambda_shrinks_plateaus() {
        let g = MonotoneDatum::unit_ramp();
        let s = rof_monotone_minimizer(&g, 1e6).unwrap();
        assert!((s.c1 - 1e-3).abs() < 1e-10 && (s.c2 - (1.0 - 1e-3)).abs() < 1e-10);
        let mut prev = rof_monotone_minimizer(&g, 9.0).unwrap();
        for lambda in [36.0, 400.0, 1e4, 1e6] {
            let s = rof_monotone_minimizer(&g, lambda).unwrap();
            assert!(s.c1 < prev.c1 && s.c2 > prev.c2);
            prev = s;
        }
    }

    #[test]
    fn custom_datum_agrees_with_ramp() {
        let custom = MonotoneDatum::custom(0.0, 1.0, |x| x);
        let (c1, c2) = solve_c1_c2(&custom, 9.0).unwrap();
        assert!((c1 - 1.0 / 3.0).abs() < 1e-10, "c1 = {c1}");
        assert!((c2 - 2.0 / 3.0).abs() < 1e-10, "c2 = {c2}");
    }

    #[test]
    fn custom_smooth_datum() {
        // g(x) = x², g⁻¹(y) = √y: 2λ ∫_0^c √y dy = (4λ/3) c^{3/2} = 1
        let g = MonotoneDatum::custom(0.0, 1.0, |x| x * x);
        let lambda = 30.0;
        let (c1, _) = solve_c1_c2(&g, lambda).unwrap();
        let expected = (3.0 / (4.0 * lambda)).powf(2.0 / 3.0);
        assert!((c1 - expected).abs() < 1e-9, "{c1} vs {expected}");
    }
}
