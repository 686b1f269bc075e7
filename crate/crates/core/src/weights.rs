//! Curvature weights `ψ` and their transforms.
//!
//! For an exponent `p ≥ 1` the transform `Ψ_p(t) = ∫_{−∞}^t ψ(s)^{1/p} ds` is a
//! strictly increasing bijection of the extended line onto `[0, M]`. For
//! `p = 1` the jump penalties `Φ` and `Φ̂` are built from its two tails.
//!
//! The built-in family is `ψ(t) = 1` for `|t| ≤ 1` and `|t|^{−α}` beyond, for
//! which every tail integral has a closed form. Other weights either come with
//! their own tail integrals or are truncated to a finite horizon and integrated
//! by adaptive Simpson.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ext::ExtReal;
use crate::numeric::{adaptive_simpson, bisect_increasing};

/// Absolute tolerance of the quadrature backing non-analytic tails.
pub const TAIL_QUADRATURE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("exponent p must be finite and >= 1, got {0}")]
    InvalidExponent(f64),
    #[error(
        "tail integral of psi^(1/p) diverges: alpha = {alpha} must exceed p = {p} \
         (|t|^(-alpha/p) is integrable at infinity only when alpha/p > 1)"
    )]
    NonIntegrable { alpha: f64, p: f64 },
    #[error("truncation horizon must be finite and positive, got {0}")]
    InvalidHorizon(f64),
    #[error("weight is not positive: psi({t}) = {value}")]
    NotPositive { t: f64, value: f64 },
    #[error("total mass must be finite and positive, got {0}")]
    InvalidMass(f64),
    #[error("{y} lies outside the range [0, {mass}] of the transform")]
    OutOfRange { y: f64, mass: f64 },
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Direction of a jump, `ν = sign(u₊ − u₋)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JumpDirection {
    Up,
    Down,
}

impl JumpDirection {
    pub fn from_jump(jump: f64) -> Option<Self> {
        if jump > 0.0 {
            Some(JumpDirection::Up)
        } else if jump < 0.0 {
            Some(JumpDirection::Down)
        } else {
            None
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            JumpDirection::Up => 1.0,
            JumpDirection::Down => -1.0,
        }
    }
}

#[derive(Clone)]
enum Kind {
    PowerTail {
        alpha: f64,
    },
    Analytic {
        psi: RealFn,
        lower: RealFn,
        upper: RealFn,
        mass: f64,
    },
    Truncated {
        psi: RealFn,
        horizon: f64,
        mass: f64,
    },
}

/// An admissible weight together with its exponent `p`.
///
/// Immutable and cheap to clone; custom closures are shared behind `Arc`.
#[derive(Clone)]
pub struct WeightFunction {
    kind: Kind,
    p: f64,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("WeightFunction");
        d.field("p", &self.p);
        match &self.kind {
            Kind::PowerTail { alpha } => d.field("alpha", alpha),
            Kind::Analytic { mass, .. } => d.field("mass", mass),
            Kind::Truncated { horizon, mass, .. } => d.field("horizon", horizon).field("mass", mass),
        };
        d.finish()
    }
}

fn check_p(p: f64) -> Result<(), WeightError> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(WeightError::InvalidExponent(p))
    }
}

impl WeightFunction {
    /// `ψ(t) = 1` on `[−1, 1]`, `|t|^{−α}` outside. Requires `α > p`.
    pub fn builtin(alpha: f64, p: f64) -> Result<Self, WeightError> {
        check_p(p)?;
        if !(alpha.is_finite() && alpha > p) {
            return Err(WeightError::NonIntegrable { alpha, p });
        }
        Ok(WeightFunction {
            kind: Kind::PowerTail { alpha },
            p,
        })
    }

    /// A user weight with user-supplied tails of `ψ^{1/p}`:
    /// `lower(t) = ∫_{−∞}^t`, `upper(t) = ∫_t^{+∞}`, and their sum `mass`.
    pub fn with_tails<P, L, U>(psi: P, p: f64, lower: L, upper: U, mass: f64) -> Result<Self, WeightError>
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
        L: Fn(f64) -> f64 + Send + Sync + 'static,
        U: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_p(p)?;
        if !(mass.is_finite() && mass > 0.0) {
            return Err(WeightError::InvalidMass(mass));
        }
        check_positive(&psi, &[-1.0, 0.0, 1.0])?;
        Ok(WeightFunction {
            kind: Kind::Analytic {
                psi: Arc::new(psi),
                lower: Arc::new(lower),
                upper: Arc::new(upper),
                mass,
            },
            p,
        })
    }

    /// A user weight whose support is cut to `[−horizon, horizon]`.
    ///
    /// The dropped mass is `∫_{|t|>horizon} ψ^{1/p}`; every tail integral and
    /// `M` itself are low by at most that amount, which the caller must bound
    /// (for `ψ ≤ c|t|^{−α}` it is `2 c^{1/p} horizon^{1−α/p} / (α/p − 1)`).
    pub fn truncated<P>(psi: P, p: f64, horizon: f64) -> Result<Self, WeightError>
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_p(p)?;
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(WeightError::InvalidHorizon(horizon));
        }
        check_positive(&psi, &[-horizon, 0.0, horizon])?;
        let inv_p = 1.0 / p;
        let mass = adaptive_simpson(|t| psi(t).powf(inv_p), -horizon, horizon, TAIL_QUADRATURE_TOL);
        Ok(WeightFunction {
            kind: Kind::Truncated {
                psi: Arc::new(psi),
                horizon,
                mass,
            },
            p,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Power-law tail exponent of the built-in family.
    pub fn alpha(&self) -> Option<f64> {
        match self.kind {
            Kind::PowerTail { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn is_builtin(&self) -> bool {
        matches!(self.kind, Kind::PowerTail { .. })
    }

    /// `M = Ψ_p(+∞)`.
    pub fn total_mass(&self) -> f64 {
        match &self.kind {
            Kind::PowerTail { alpha } => {
                let q = alpha / self.p;
                2.0 + 2.0 / (q - 1.0)
            }
            Kind::Analytic { mass, .. } | Kind::Truncated { mass, .. } => *mass,
        }
    }

    /// `ψ(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::PowerTail { alpha } => {
                let a = t.abs();
                if a <= 1.0 {
                    1.0
                } else {
                    a.powf(-alpha)
                }
            }
            Kind::Analytic { psi, .. } | Kind::Truncated { psi, .. } => psi(t),
        }
    }

    /// `ψ(t)^{1/p}`, the derivative of `Ψ_p`.
    pub fn eval_root(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::PowerTail { alpha } => {
                let a = t.abs();
                if a <= 1.0 {
                    1.0
                } else {
                    a.powf(-alpha / self.p)
                }
            }
            _ => {
                let v = self.eval(t);
                if self.p == 1.0 {
                    v
                } else {
                    v.powf(1.0 / self.p)
                }
            }
        }
    }

    /// `ψ′(t)`. The built-in family has a kink at `|t| = 1`; there the
    /// inner (`|t| < 1`) branch is returned. Other weights fall back to a
    /// central difference.
    pub fn derivative(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::PowerTail { alpha } => {
                let a = t.abs();
                if a <= 1.0 {
                    0.0
                } else {
                    -alpha * t.signum() * a.powf(-alpha - 1.0)
                }
            }
            _ => {
                let step = 1e-6 * (1.0 + t.abs());
                (self.eval(t + step) - self.eval(t - step)) / (2.0 * step)
            }
        }
    }

    /// `sup ψ^{1/p}`: the Lipschitz constant of `Ψ_p`. Exact for the built-in
    /// family; sampled on a fine grid otherwise.
    pub fn sup_root(&self) -> f64 {
        match &self.kind {
            Kind::PowerTail { .. } => 1.0,
            Kind::Analytic { .. } | Kind::Truncated { .. } => {
                let span = match &self.kind {
                    Kind::Truncated { horizon, .. } => *horizon,
                    _ => 100.0,
                };
                (0..=20_000)
                    .map(|i| self.eval_root(-span + 2.0 * span * i as f64 / 20_000.0))
                    .fold(0.0, f64::max)
            }
        }
    }

    /// `∫_{−∞}^t ψ^{1/p}`.
    pub fn tail_lower(&self, t: ExtReal) -> f64 {
        match t {
            ExtReal::NegInf => 0.0,
            ExtReal::PosInf => self.total_mass(),
            ExtReal::Finite(t) => self.tail_lower_f(t),
        }
    }

    /// `∫_t^{+∞} ψ^{1/p}`.
    pub fn tail_upper(&self, t: ExtReal) -> f64 {
        match t {
            ExtReal::NegInf => self.total_mass(),
            ExtReal::PosInf => 0.0,
            ExtReal::Finite(t) => self.tail_upper_f(t),
        }
    }

    fn tail_lower_f(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::PowerTail { alpha } => power_upper(-t, alpha / self.p),
            Kind::Analytic { lower, .. } => lower(t),
            Kind::Truncated { horizon, .. } => {
                let hi = t.min(*horizon);
                if hi <= -horizon {
                    0.0
                } else {
                    self.quad_root(-horizon, hi)
                }
            }
        }
    }

    fn tail_upper_f(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::PowerTail { alpha } => power_upper(t, alpha / self.p),
            Kind::Analytic { upper, .. } => upper(t),
            Kind::Truncated { horizon, .. } => {
                let lo = t.max(-horizon);
                if lo >= *horizon {
                    0.0
                } else {
                    self.quad_root(lo, *horizon)
                }
            }
        }
    }

    fn quad_root(&self, lo: f64, hi: f64) -> f64 {
        // split at the origin and at ±1 so kinks sit on panel boundaries
        let mut cuts = vec![lo];
        for c in [-1.0, 0.0, 1.0] {
            if c > lo && c < hi {
                cuts.push(c);
            }
        }
        cuts.push(hi);
        cuts.windows(2)
            .map(|w| adaptive_simpson(|s| self.eval_root(s), w[0], w[1], TAIL_QUADRATURE_TOL))
            .sum()
    }

    /// `Ψ_p(t)`.
    pub fn psi_transform(&self, t: ExtReal) -> f64 {
        self.tail_lower(t)
    }

    /// `Ψ_p(t)` for finite `t`.
    pub fn psi_transform_f(&self, t: f64) -> f64 {
        self.tail_lower_f(t)
    }

    /// `Ψ_p^{−1}(y)` for `y ∈ [0, M]`; `0 ↦ −∞` and `M ↦ +∞`.
    pub fn psi_inverse(&self, y: f64) -> Result<ExtReal, WeightError> {
        let mass = self.total_mass();
        if !(0.0..=mass).contains(&y) {
            return Err(WeightError::OutOfRange { y, mass });
        }
        if y == 0.0 {
            return Ok(ExtReal::NegInf);
        }
        if y == mass {
            return Ok(ExtReal::PosInf);
        }
        let t = match &self.kind {
            Kind::PowerTail { alpha } => {
                let q = alpha / self.p;
                let r = 1.0 / (q - 1.0);
                if y <= r {
                    -(y * (q - 1.0)).powf(-1.0 / (q - 1.0))
                } else if y <= r + 2.0 {
                    y - r - 1.0
                } else {
                    ((mass - y) * (q - 1.0)).powf(-1.0 / (q - 1.0))
                }
            }
            _ => self.invert_by_bisection(y),
        };
        Ok(ExtReal::Finite(t))
    }

    fn invert_by_bisection(&self, y: f64) -> f64 {
        let f = |t: f64| self.tail_lower_f(t) - y;
        let mut lo = -1.0;
        while f(lo) >= 0.0 && lo > -1e300 {
            lo *= 2.0;
        }
        let mut hi = 1.0;
        while f(hi) <= 0.0 && hi < 1e300 {
            hi *= 2.0;
        }
        let tol = 1e-13 * (1.0 + lo.abs().max(hi.abs()));
        bisect_increasing(f, lo, hi, tol, 400).root
    }

    /// The relaxed jump cost `Φ(ν, t₁, t₂)` at a jump of direction `ν` whose
    /// one-sided slopes are `t₁`, `t₂`. Defined for `p = 1`.
    pub fn jump_penalty(&self, nu: JumpDirection, t1: ExtReal, t2: ExtReal) -> f64 {
        match nu {
            JumpDirection::Up => self.tail_upper(t1) + self.tail_upper(t2),
            JumpDirection::Down => self.tail_lower(t1) + self.tail_lower(t2),
        }
    }

    /// `Φ̂(ν, t₁, t₂)`: the part of `Φ` not accounted for by the jump of
    /// `Ψ₁ ∘ u′` across the point, so that `Φ = |Ψ₁(t₁) − Ψ₁(t₂)| + Φ̂`.
    ///
    /// An upward jump sends the slope from `max(t₁, t₂)` to `+∞` and back,
    /// which is why the tail is counted twice.
    pub fn jump_penalty_hat(&self, nu: JumpDirection, t1: ExtReal, t2: ExtReal) -> f64 {
        match nu {
            JumpDirection::Up => 2.0 * self.tail_upper(t1.max(t2)),
            JumpDirection::Down => 2.0 * self.tail_lower(t1.min(t2)),
        }
    }
}

/// `∫_t^∞ ψ^{1/p}` for the built-in family, with `q = α/p > 1`.
fn power_upper(t: f64, q: f64) -> f64 {
    let r = 1.0 / (q - 1.0);
    if t >= 1.0 {
        t.powf(1.0 - q) * r
    } else if t >= -1.0 {
        (1.0 - t) + r
    } else {
        // 2 + r + ∫_t^{-1} |s|^{-q} ds
        2.0 + r + (1.0 - (-t).powf(1.0 - q)) * r
    }
}

fn check_positive<P: Fn(f64) -> f64>(psi: &P, probes: &[f64]) -> Result<(), WeightError> {
    for &t in probes {
        let value = psi(t);
        if !(value > 0.0) {
            return Err(WeightError::NotPositive { t, value });
        }
    }
    Ok(())
}
