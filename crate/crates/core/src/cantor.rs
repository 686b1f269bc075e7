//! Generalized Cantor sets `D_δ`, their Cantor functions, and a weight `w_δ`
//! that is finite exactly off `D_δ` while `Ψ₁ ∘ w_δ` keeps bounded
//! variation. Together they give a function whose derivative has a
//! nontrivial Cantor part yet finite relaxed energy.
//!
//! Everything is truncated at a finite depth `m`: the removed intervals of
//! levels `1..=m` are listed explicitly and the `2^m` closed intervals left
//! over stand in for `D_δ`.

use serde::Serialize;
use thiserror::Error;

use crate::ext::ExtReal;
use crate::weights::WeightFunction;

/// Deepest supported construction: `2^20 − 1` removed intervals.
pub const MAX_DEPTH: usize = 20;
/// Growth exponent `s` used when none is given.
pub const DEFAULT_GROWTH: f64 = 2.0;
/// Samples on each side of the midpoint when summing the variation of `v_m`.
const HALF_SAMPLES: usize = 32;

/// `1 / ∫₀¹ −ln(4x(1−x)) dx = 1 / (2 − 2 ln 2)`.
pub const BUMP_SCALE: f64 = 1.0 / (2.0 - 2.0 * std::f64::consts::LN_2);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CantorError {
    #[error("delta must lie in ]0, 1/2[, got {0}")]
    InvalidDelta(f64),
    #[error("depth must be between 1 and {MAX_DEPTH}, got {0}")]
    InvalidDepth(usize),
    #[error("growth exponent s must be positive, got {0}")]
    InvalidGrowth(f64),
    #[error("w_delta is not integrable: delta = {delta} must be below 2^-(s+1) = {limit} for s = {s}")]
    DeltaTooLarge { delta: f64, s: f64, limit: f64 },
    #[error("alpha = {alpha} must exceed (s+1)/s = {limit} for s = {s}")]
    AlphaTooSmall { alpha: f64, s: f64, limit: f64 },
    #[error("decay bound psi(t) <= c t^-alpha needs c > 0 and alpha > 1, got c = {c}, alpha = {alpha}")]
    InvalidDecay { c: f64, alpha: f64 },
    #[error("the variation bound is stated for p = 1, got p = {0}")]
    NeedP1(f64),
    #[error("custom weights need an explicit decay bound")]
    MissingDecay,
    #[error("x = {0} lies outside the admissible range")]
    OutOfDomain(f64),
}

/// The convex bump `φ(x) = c₀ (−ln(4x(1−x)))` on `]0, 1[`: blows up at both
/// ends, vanishes at `1/2`, integrates to 1.
pub fn bump(x: f64) -> f64 {
    -BUMP_SCALE * (4.0 * x * (1.0 - x)).ln()
}

/// A removed middle interval `I_kn`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemovedInterval {
    pub level: usize,
    /// 1-based, left to right within the level.
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    /// `δ^{n−1}(1 − 2δ)`, formed by products rather than as `hi − lo`.
    pub length: f64,
}

impl RemovedInterval {

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CantorFixture {
    pub delta: f64,
    pub depth: usize,
    pub s: f64,
    /// Sorted by level, then left to right.
    pub removed_intervals: Vec<RemovedInterval>,
}

/// Enumerates the removed intervals of levels `1..=depth` with the default
/// growth exponent.
pub fn build_cantor_intervals(delta: f64, depth: usize) -> Result<CantorFixture, CantorError> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(CantorError::InvalidDelta(delta));
    }
    if depth == 0 || depth > MAX_DEPTH {
        return Err(CantorError::InvalidDepth(depth));
    }
    let mut removed = Vec::with_capacity((1 << depth) - 1);
    // closed segments left after the previous level, all of length `len`
    let mut segments = vec![(0.0f64, 1.0f64)];
    let mut len = 1.0;
    for level in 1..=depth {
        let side = delta * len;
        let mut next = Vec::with_capacity(2 * segments.len());
        for (k, &(lo, hi)) in segments.iter().enumerate() {
            let (a, b) = children(lo, hi, delta);
            removed.push(RemovedInterval {
                level,
                index: k + 1,
                lo: a,
                hi: b,
                length: len * (1.0 - 2.0 * delta),
            });
            next.push((lo, a));
            next.push((b, hi));
        }
        segments = next;
        len = side;
    }
    Ok(CantorFixture {
        delta,
        depth,
        s: DEFAULT_GROWTH,
        removed_intervals: removed,
    })
}

/// Ends of the middle interval removed from `[lo, hi]`. The children keep
/// the parent's outer ends bit for bit.
fn children(lo: f64, hi: f64, delta: f64) -> (f64, f64) {
    let side = delta * (hi - lo);
    (lo + side, hi - side)
}

/// Where `x` sits in the truncated construction.
enum Locus {
    Removed { level: usize, lo: f64, len: f64 },
    Remaining,
}

impl CantorFixture {
    pub fn with_growth(mut self, s: f64) -> Result<Self, CantorError> {
        if !(s.is_finite() && s > 0.0) {
            return Err(CantorError::InvalidGrowth(s));
        }
        self.s = s;
        Ok(self)
    }

    pub fn level(&self, n: usize) -> &[RemovedInterval] {
        if n == 0 || n > self.depth {
            return &[];
        }
        let start = (1 << (n - 1)) - 1;
        &self.removed_intervals[start..start + (1 << (n - 1))]
    }

    /// `1 − Σ |I_kn|`, summed with compensation.
    pub fn remaining_measure(&self) -> f64 {
        let (mut sum, mut carry) = (1.0f64, 0.0f64);
        for iv in &self.removed_intervals {
            let t = sum - iv.length;
            carry += if sum.abs() >= iv.length { (sum - t) - iv.length } else { (-iv.length - t) + sum };
            sum = t;
        }
        sum + carry
    }

    /// `2^{−(s+1)}`, the bound on `δ` under which `w_δ` is integrable.
    pub fn delta_limit(&self) -> f64 {
        0.5f64.powf(self.s + 1.0)
    }

    fn check_integrable(&self) -> Result<(), CantorError> {
        let limit = self.delta_limit();
        if self.delta < limit {
            Ok(())
        } else {
            Err(CantorError::DeltaTooLarge {
                delta: self.delta,
                s: self.s,
                limit,
            })
        }
    }

    fn locate(&self, x: f64) -> Locus {
        let (mut lo, mut hi) = (0.0, 1.0);
        for level in 1..=self.depth {
            let (a, b) = children(lo, hi, self.delta);
            if x <= a {
                hi = a;
            } else if x < b {
                return Locus::Removed { level, lo: a, len: b - a };
            } else {
                lo = b;
            }
        }
        Locus::Remaining
    }
}

/// `f_m(x) = ∫₀^x g_m`, the depth-`m` approximant of the Cantor function.
pub fn cantor_function(fix: &CantorFixture, x: f64) -> Result<f64, CantorError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(CantorError::OutOfDomain(x));
    }
    // each level halves the mass; the last segment is filled linearly
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut acc = 0.0;
    let mut weight = 1.0;
    for _ in 0..fix.depth {
        let (a, b) = children(lo, hi, fix.delta);
        weight *= 0.5;
        if x <= a {
            hi = a;
        } else if x < b {
            return Ok(acc + weight);
        } else {
            acc += weight;
            lo = b;
        }
    }
    Ok(acc + weight * ((x - lo) / (hi - lo)).clamp(0.0, 1.0))
}

/// `w_δ` truncated at the fixture depth: `2^{sn} + φ(…)` on `I_kn`, `+∞` on
/// what is left.
pub fn w_delta(fix: &CantorFixture, x: f64) -> Result<ExtReal, CantorError> {
    fix.check_integrable()?;
    if !(x > 0.0 && x < 1.0) {
        return Err(CantorError::OutOfDomain(x));
    }
    Ok(match fix.locate(x) {
        Locus::Removed { level, lo, len } => ExtReal::Finite(growth(fix.s, level) + bump((x - lo) / len)),
        Locus::Remaining => ExtReal::PosInf,
    })
}

fn growth(s: f64, level: usize) -> f64 {
    2f64.powf(s * level as f64)
}

/// `Σ_{n ≤ m} 2^{n−1} (2^{sn} + 1) δ^{n−1} (1 − 2δ)`: the integral of the
/// truncated `w_δ` over the removed intervals.
pub fn w_integral(fix: &CantorFixture, m: usize) -> Result<f64, CantorError> {
    fix.check_integrable()?;
    let d = fix.delta;
    Ok((1..=m.min(fix.depth))
        .map(|n| 2f64.powi(n as i32 - 1) * (growth(fix.s, n) + 1.0) * d.powi(n as i32 - 1) * (1.0 - 2.0 * d))
        .sum())
}

/// Limit of [`w_integral`] as `m → ∞`:
/// `(1 − 2δ) 2^s / (1 − 2^{s+1} δ) + 1`.
pub fn w_integral_limit(fix: &CantorFixture) -> Result<f64, CantorError> {
    fix.check_integrable()?;
    let d = fix.delta;
    let two_s = 2f64.powf(fix.s);
    Ok((1.0 - 2.0 * d) * two_s / (1.0 - 2.0 * two_s * d) + 1.0)
}

/// `ψ(t) ≤ c t^{−α}` for `t ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgebraicDecay {
    pub c: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelVariation {
    pub level: usize,
    /// `2 (M − Ψ₁(2^{sn}))`.
    pub closed_form: f64,
    /// Largest gap between the summed and the closed-form variation over
    /// the intervals of this level.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationReport {
    pub delta: f64,
    pub s: f64,
    pub alpha: f64,
    pub c: f64,
    pub depth: usize,
    /// `Var(v_m; ]0,1[)` summed sample by sample.
    pub variation: f64,
    /// `(2c/(α−1)) Σ_{n ≤ m} 2^{n−1} 2^{−sn(α−1)}`.
    pub level_bound: f64,
    /// `(2c/(α−1)) Σ_{n ≥ 1} 2^{−(sn(α−1)−n+1)}`.
    pub series_bound: f64,
    pub within_bound: bool,
    pub levels: Vec<LevelVariation>,
}

/// Checks the variation of `v_m = Ψ₁ ∘ w_δ` (set to `M` off the removed
/// intervals) against the series bound, for the built-in weight (`c = 1`).
pub fn variation_bound_check(fix: &CantorFixture, w: &WeightFunction, m: usize) -> Result<VariationReport, CantorError> {
    let alpha = w.alpha().ok_or(CantorError::MissingDecay)?;
    variation_bound_check_with(fix, w, AlgebraicDecay { c: 1.0, alpha }, m)
}

pub fn variation_bound_check_with(
    fix: &CantorFixture,
    w: &WeightFunction,
    decay: AlgebraicDecay,
    m: usize,
) -> Result<VariationReport, CantorError> {
    if w.p() != 1.0 {
        return Err(CantorError::NeedP1(w.p()));
    }
    let AlgebraicDecay { c, alpha } = decay;
    if !(c > 0.0 && alpha > 1.0 && c.is_finite() && alpha.is_finite()) {
        return Err(CantorError::InvalidDecay { c, alpha });
    }
    let limit = (fix.s + 1.0) / fix.s;
    if !(alpha > limit) {
        return Err(CantorError::AlphaTooSmall { alpha, s: fix.s, limit });
    }
    fix.check_integrable()?;
    if m == 0 || m > fix.depth {
        return Err(CantorError::InvalidDepth(m));
    }

    // v_m is tracked as M − v_m = ∫_{w}^{∞} ψ to avoid cancellation near M
    let gap = |t: f64| w.tail_upper(ExtReal::Finite(t));
    let mut levels = Vec::with_capacity(m);
    let mut variation = 0.0;
    for n in 1..=m {
        let closed_form = 2.0 * gap(growth(fix.s, n));
        let mut max_deviation: f64 = 0.0;
        for iv in fix.level(n) {
            // symmetric samples through the midpoint; both edges continue
            // to the value M outside
            let mut prev = 0.0;
            let mut var = 0.0;
            for j in -(HALF_SAMPLES as i64)..=HALF_SAMPLES as i64 {
                let t = 0.5 + j as f64 / (2 * HALF_SAMPLES + 2) as f64;
                let x = iv.lo + t * (iv.hi - iv.lo);
                let cur = match w_delta(fix, x)? {
                    ExtReal::Finite(v) => gap(v),
                    _ => 0.0,
                };
                var += (cur - prev).abs();
                prev = cur;
            }
            var += prev;
            variation += var;
            max_deviation = max_deviation.max((var - closed_form).abs());
        }
        levels.push(LevelVariation {
            level: n,
            closed_form,
            max_deviation,
        });
    }

    let k = 2.0 * c / (alpha - 1.0);
    let e = fix.s * (alpha - 1.0);
    let level_bound = k * (1..=m).map(|n| 2f64.powi(n as i32 - 1) * 2f64.powf(-e * n as f64)).sum::<f64>();
    // Σ_{n≥1} 2^{−(en − n + 1)} = ½ r/(1 − r) with r = 2^{1−e} < 1
    let r = 2f64.powf(1.0 - e);
    let series_bound = k * 0.5 * r / (1.0 - r);
    Ok(VariationReport {
        delta: fix.delta,
        s: fix.s,
        alpha,
        c,
        depth: m,
        variation,
        level_bound,
        series_bound,
        within_bound: variation <= level_bound * (1.0 + 1e-12) && level_bound <= series_bound * (1.0 + 1e-12),
        levels,
    })
}
