//! Higher-order energies `F_p(u) = ∫ |u′| + ∫ ψ(u′) |u″|^p` and their
//! relaxations on finite BV representations.
//!
//! Curvature is always measured through `v = Ψ_p ∘ u′`. On a grid the cell
//! slopes `d_i` give
//!
//! ```text
//! F_p(u) ≈ Σ |u_{i+1} − u_i| + h Σ_i |(Ψ_p(d_i) − Ψ_p(d_{i−1})) / h|^p
//! ```
//!
//! which is `∫ ψ(u′) |u″|^p` with `ψ` evaluated at an intermediate slope
//! between `d_{i−1}` and `d_i`. A one-cell jump therefore pays the full
//! excursion of `v` to the tail of `Ψ_p` and back rather than a cost that
//! vanishes as the cell shrinks.

use serde::Serialize;
use thiserror::Error;

use crate::ext::ExtReal;
use crate::signals::{DiscreteSignal, Grid, JumpRecord, Piece, PiecewiseBVFunction, SignalError};
use crate::weights::{JumpDirection, WeightFunction};

/// Samples next to a jump that must diverge monotonically for `p > 1`.
pub const DIVERGENCE_WINDOW: usize = 5;
/// A slope gap at a jump-free boundary counts as a kink when it exceeds this
/// multiple of the neighbouring in-piece increments.
const SLOPE_GAP_FACTOR: f64 = 10.0;

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("expected a weight with p = 1, got p = {0}")]
    NeedP1(f64),
    #[error("expected a weight with p > 1, got p = {0}")]
    NeedPGreaterThan1(f64),
    #[error("cusp parameters inadmissible: {0}")]
    CuspParameters(String),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub tv_term: f64,
    pub diffuse_term: f64,
    pub jump_term: f64,
    pub total: ExtReal,
}

impl EnergyBreakdown {
    fn finite(tv_term: f64, diffuse_term: f64, jump_term: f64) -> Self {
        EnergyBreakdown {
            tv_term,
            diffuse_term,
            jump_term,
            total: ExtReal::Finite(tv_term + diffuse_term + jump_term),
        }
    }
}

/// `h Σ |(Ψ_p(d_i) − Ψ_p(d_{i−1})) / h|^p` over interior nodes.
pub fn curvature_term(u: &DiscreteSignal, w: &WeightFunction) -> f64 {
    let h = u.grid().spacing();
    let p = w.p();
    let v: Vec<f64> = crate::signals::derivative_samples(u)
        .iter()
        .map(|&d| w.psi_transform_f(d))
        .collect();
    v.windows(2)
        .map(|q| {
            let dv = (q[1] - q[0]).abs();
            if p == 1.0 {
                dv
            } else {
                h * (dv / h).powf(p)
            }
        })
        .sum()
}

fn discrete_energy(u: &DiscreteSignal, w: &WeightFunction) -> f64 {
    crate::signals::total_variation(u) + curvature_term(u, w)
}

/// Discrete `F₁`.
pub fn energy_f1_discrete(u: &DiscreteSignal, w: &WeightFunction) -> Result<f64, EnergyError> {
    if w.p() != 1.0 {
        return Err(EnergyError::NeedP1(w.p()));
    }
    Ok(discrete_energy(u, w))
}

/// Discrete `F_p`, `p > 1`.
pub fn energy_fp_discrete(u: &DiscreteSignal, w: &WeightFunction) -> Result<f64, EnergyError> {
    if w.p() <= 1.0 {
        return Err(EnergyError::NeedPGreaterThan1(w.p()));
    }
    Ok(discrete_energy(u, w))
}

fn tv_term(u: &PiecewiseBVFunction) -> f64 {
    let ac: f64 = u.pieces().iter().map(Piece::abs_slope_integral).sum();
    let jumps: f64 = u.jumps().iter().map(|j| j.jump.abs()).sum();
    let atoms: f64 = u.cantor_atoms().iter().map(|(_, m)| m.abs()).sum();
    ac + jumps + atoms
}

/// A node of `v = Ψ_p ∘ (u′)^a`: slope samples sit at cell centres, one-sided
/// limits sit on the jump itself.
#[derive(Clone, Copy)]
struct VNode {
    x: f64,
    v: f64,
}

/// Chains of `v`-nodes separated by the jump set.
fn v_chains(u: &PiecewiseBVFunction, w: &WeightFunction) -> Vec<Vec<VNode>> {
    let mut chains = Vec::new();
    let mut cur: Vec<VNode> = Vec::new();
    for (i, piece) in u.pieces().iter().enumerate() {
        let dx = piece.cell_width();
        for (j, &s) in piece.slopes.iter().enumerate() {
            cur.push(VNode {
                x: piece.lo + (j as f64 + 0.5) * dx,
                v: w.psi_transform_f(s),
            });
        }
        if let Some(jump) = u.jump_after_piece(i) {
            cur.push(VNode {
                x: jump.x,
                v: w.psi_transform(jump.left_slope),
            });
            chains.push(std::mem::take(&mut cur));
            cur.push(VNode {
                x: jump.x,
                v: w.psi_transform(jump.right_slope),
            });
        }
    }
    chains.push(cur);
    chains
}

fn chain_variation(chains: &[Vec<VNode>]) -> f64 {
    chains
        .iter()
        .flat_map(|c| c.windows(2))
        .map(|q| (q[1].v - q[0].v).abs())
        .sum()
}

fn chain_wp_integral(chains: &[Vec<VNode>], p: f64) -> f64 {
    chains
        .iter()
        .flat_map(|c| c.windows(2))
        .map(|q| {
            let dx = q[1].x - q[0].x;
            let dv = (q[1].v - q[0].v).abs();
            if dv == 0.0 {
                0.0
            } else {
                dx * (dv / dx).powf(p)
            }
        })
        .sum()
}

/// Relaxed `F̄₁`: total variation, variation of `v` off the jump set, and
/// `Σ Φ(ν, (u′)^a_−, (u′)^a_+)` over the jumps.
pub fn energy_f1_relaxed(u: &PiecewiseBVFunction, w: &WeightFunction) -> Result<EnergyBreakdown, EnergyError> {
    if w.p() != 1.0 {
        return Err(EnergyError::NeedP1(w.p()));
    }
    let diffuse = chain_variation(&v_chains(u, w));
    let jump: f64 = u
        .jumps()
        .iter()
        .map(|j| w.jump_penalty(j.nu, j.left_slope, j.right_slope))
        .sum();
    Ok(EnergyBreakdown::finite(tv_term(u), diffuse, jump))
}

/// `F̄₁` booked the other way round: the variation of `v` over all of
/// `]a, b[`, including its jumps across `S_u`, plus `Σ Φ̂`. Equals
/// [`energy_f1_relaxed`] in total.
pub fn energy_f1_relaxed_hat(u: &PiecewiseBVFunction, w: &WeightFunction) -> Result<EnergyBreakdown, EnergyError> {
    if w.p() != 1.0 {
        return Err(EnergyError::NeedP1(w.p()));
    }
    let across: f64 = u
        .jumps()
        .iter()
        .map(|j| (w.psi_transform(j.left_slope) - w.psi_transform(j.right_slope)).abs())
        .sum();
    let diffuse = chain_variation(&v_chains(u, w)) + across;
    let jump: f64 = u
        .jumps()
        .iter()
        .map(|j| w.jump_penalty_hat(j.nu, j.left_slope, j.right_slope))
        .sum();
    Ok(EnergyBreakdown::finite(tv_term(u), diffuse, jump))
}

/// Relaxed `F̄_p`, `p > 1`: `∫ |u′| + ∫ |v′|^p` on the domain, `+∞` off it.
pub fn energy_fp_relaxed(u: &PiecewiseBVFunction, w: &WeightFunction) -> Result<EnergyBreakdown, EnergyError> {
    if w.p() <= 1.0 {
        return Err(EnergyError::NeedPGreaterThan1(w.p()));
    }
    let diag = membership_diagnostics(u, w);
    let tv = tv_term(u);
    if !diag.in_domain {
        return Ok(EnergyBreakdown {
            tv_term: tv,
            diffuse_term: diag.v_wp_integral,
            jump_term: 0.0,
            total: ExtReal::PosInf,
        });
    }
    Ok(EnergyBreakdown::finite(tv, diag.v_wp_integral, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpCheck {
    pub x: f64,
    pub nu: JumpDirection,
    /// Both one-sided slopes are infinite with the sign of the jump.
    pub limits_compatible: bool,
    /// The last [`DIVERGENCE_WINDOW`] samples on each side move monotonically
    /// toward the jump.
    pub samples_diverge: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub p: f64,
    /// Discrete variation of `v = Ψ_p ∘ (u′)^a` off the jump set.
    pub v_variation: f64,
    /// Discrete `∫ |v′|^p` off the jump set.
    pub v_wp_integral: f64,
    /// Jump-free piece boundaries where `(u′)^a` has a kink.
    pub slope_discontinuities: Vec<f64>,
    pub jumps: Vec<JumpCheck>,
    /// Cantor atoms present; their concentration conditions cannot be
    /// checked on finite data.
    pub unverified_cantor_atoms: usize,
    pub in_domain: bool,
}

fn check_jump(u: &PiecewiseBVFunction, i: usize, j: &JumpRecord) -> JumpCheck {
    let target = match j.nu {
        JumpDirection::Up => ExtReal::PosInf,
        JumpDirection::Down => ExtReal::NegInf,
    };
    let limits_compatible = j.left_slope == target && j.right_slope == target;
    let sgn = j.nu.sign();
    let left = &u.pieces()[i].slopes;
    let right = &u.pieces()[i + 1].slopes;
    let k = DIVERGENCE_WINDOW;
    let left_tail = &left[left.len().saturating_sub(k)..];
    let right_head = &right[..right.len().min(k)];
    let samples_diverge = left_tail.len() == k
        && right_head.len() == k
        && left_tail.windows(2).all(|q| sgn * (q[1] - q[0]) > 0.0)
        && right_head.windows(2).all(|q| sgn * (q[0] - q[1]) > 0.0);
    JumpCheck {
        x: j.x,
        nu: j.nu,
        limits_compatible,
        samples_diverge,
    }
}

fn slope_kinks(u: &PiecewiseBVFunction) -> Vec<f64> {
    let pieces = u.pieces();
    let mut out = Vec::new();
    for i in 0..pieces.len().saturating_sub(1) {
        if u.jump_after_piece(i).is_some() {
            continue;
        }
        let (l, r) = (&pieces[i].slopes, &pieces[i + 1].slopes);
        let gap = (r[0] - l[l.len() - 1]).abs();
        let near = l[l.len().saturating_sub(3)..]
            .windows(2)
            .chain(r[..r.len().min(3)].windows(2))
            .map(|q| (q[1] - q[0]).abs())
            .fold(0.0, f64::max);
        if gap > SLOPE_GAP_FACTOR * near + 1e-9 {
            out.push(pieces[i].hi);
        }
    }
    out
}

/// Finite-data checks for membership in the domain of the relaxed energy.
///
/// For `p = 1` every representable function is admissible; jump checks are
/// reported but do not affect `in_domain`. For `p > 1` jumps need infinite
/// one-sided slopes of the right sign approached monotonically, and `(u′)^a`
/// must not kink across jump-free boundaries.
pub fn membership_diagnostics(u: &PiecewiseBVFunction, w: &WeightFunction) -> MembershipReport {
    let chains = v_chains(u, w);
    let p = w.p();
    let mut jumps = Vec::new();
    for i in 0..u.pieces().len() {
        if let Some(j) = u.jump_after_piece(i) {
            jumps.push(check_jump(u, i, j));
        }
    }
    let slope_discontinuities = slope_kinks(u);
    let in_domain = p == 1.0
        || (slope_discontinuities.is_empty() && jumps.iter().all(|j| j.limits_compatible && j.samples_diverge));
    MembershipReport {
        p,
        v_variation: chain_variation(&chains),
        v_wp_integral: chain_wp_integral(&chains, p),
        slope_discontinuities,
        jumps,
        unverified_cantor_atoms: u.cantor_atoms().len(),
        in_domain,
    }
}

/// `u(x) = −|x|^β` on `]−1, 0]`, `1 + x^β` on `]0, 1[`: a unit upward jump
/// at the origin approached with infinite slope from both sides. Finite
/// relaxed `F̄_p` for the built-in weight when `β < 1 − (p − 1)/(α − p)`.
pub fn cusp_example(alpha: f64, p: f64, beta: f64, cells_per_side: usize) -> Result<PiecewiseBVFunction, EnergyError> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(EnergyError::CuspParameters(format!("beta = {beta} not in ]0, 1[")));
    }
    if !(p > 1.0 && alpha > p) {
        return Err(EnergyError::CuspParameters(format!("need alpha > p > 1, got alpha = {alpha}, p = {p}")));
    }
    let bound = 1.0 - (p - 1.0) / (alpha - p);
    if beta >= bound {
        return Err(EnergyError::CuspParameters(format!("beta = {beta} must be below {bound}")));
    }
    let grid = Grid::new(-1.0, 1.0, 2 * cells_per_side)?;
    let pieces = vec![
        Piece::from_fn(-1.0, 0.0, cells_per_side, |x| -(x.abs()).powf(beta)),
        Piece::from_fn(0.0, 1.0, cells_per_side, |x| 1.0 + x.powf(beta)),
    ];
    let jump = JumpRecord::new(0.0, 1.0, ExtReal::PosInf, ExtReal::PosInf)?;
    Ok(PiecewiseBVFunction::new(grid, pieces, vec![jump], Vec::new())?)
}
