//! Finite representation of a BV function: absolutely continuous pieces,
//! jumps at the piece boundaries, and optional Cantor-part atoms.

use serde::{Deserialize, Serialize};

use super::{DiscreteSignal, Grid, JumpRecord, SignalError};
use crate::ext::ExtReal;

const CONTINUITY_TOL: f64 = 1e-9;

/// An absolutely continuous piece on `[lo, hi]`.
///
/// `slopes[j]` is the average of `(u′)^a` over the `j`-th of `slopes.len()`
/// equal sub-cells, so integrating the slopes reproduces `u` exactly at the
/// sub-cell nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub value_at_lo: f64,
    pub slopes: Vec<f64>,
}

impl Piece {
    /// Samples `f` on `cells + 1` equispaced nodes of `[lo, hi]`.
    pub fn from_fn<F: Fn(f64) -> f64>(lo: f64, hi: f64, cells: usize, f: F) -> Self {
        let dx = (hi - lo) / cells as f64;
        let node = |j: usize| if j == cells { hi } else { lo + dx * j as f64 };
        let slopes = (0..cells).map(|j| (f(node(j + 1)) - f(node(j))) / dx).collect();
        Piece {
            lo,
            hi,
            value_at_lo: f(lo),
            slopes,
        }
    }

    /// Constant piece carrying `cells` zero slopes.
    pub fn constant(lo: f64, hi: f64, value: f64, cells: usize) -> Self {
        Piece {
            lo,
            hi,
            value_at_lo: value,
            slopes: vec![0.0; cells],
        }
    }

    pub fn cell_width(&self) -> f64 {
        (self.hi - self.lo) / self.slopes.len() as f64
    }

    pub fn value_at_hi(&self) -> f64 {
        self.value_at_lo + self.cell_width() * self.slopes.iter().sum::<f64>()
    }

    /// `∫ |(u′)^a|` over the piece.
    pub fn abs_slope_integral(&self) -> f64 {
        self.cell_width() * self.slopes.iter().map(|s| s.abs()).sum::<f64>()
    }

    /// Piecewise-linear reconstruction at `x ∈ [lo, hi]`.
    pub fn eval(&self, x: f64) -> f64 {
        let dx = self.cell_width();
        let t = ((x - self.lo) / dx).max(0.0);
        let j = (t.floor() as usize).min(self.slopes.len() - 1);
        let base: f64 = self.slopes[..j].iter().sum::<f64>() * dx;
        self.value_at_lo + base + self.slopes[j] * (x - self.lo - j as f64 * dx)
    }
}

/// The computable slice of `BV(]a, b[)` consumed by the relaxed energies.
///
/// Cantor atoms are `(position, mass)` pairs standing in for a singular
/// continuous part; they enter the total variation only and are not
/// reflected in [`PiecewiseBVFunction::eval`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise")]
pub struct PiecewiseBVFunction {
    grid: Grid,
    pieces: Vec<Piece>,
    jumps: Vec<JumpRecord>,
    cantor_atoms: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct RawPiecewise {
    grid: RawGrid,
    pieces: Vec<Piece>,
    #[serde(default)]
    jumps: Vec<JumpRecord>,
    #[serde(default)]
    cantor_atoms: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct RawGrid {
    a: f64,
    b: f64,
    n: usize,
}

impl TryFrom<RawPiecewise> for PiecewiseBVFunction {
    type Error = SignalError;

    fn try_from(r: RawPiecewise) -> Result<Self, Self::Error> {
        let grid = Grid::new(r.grid.a, r.grid.b, r.grid.n)?;
        PiecewiseBVFunction::new(grid, r.pieces, r.jumps, r.cantor_atoms)
    }
}

impl PiecewiseBVFunction {
    /// Validates that the pieces partition `[grid.a, grid.b]`, that every
    /// jump sits on an interior boundary and matches the value gap there, and
    /// that boundaries without a jump record are continuous.
    pub fn new(
        grid: Grid,
        pieces: Vec<Piece>,
        mut jumps: Vec<JumpRecord>,
        cantor_atoms: Vec<(f64, f64)>,
    ) -> Result<Self, SignalError> {
        let bad = |m: String| Err(SignalError::Piecewise(m));
        if pieces.is_empty() {
            return bad("no pieces".into());
        }
        let scale = pieces
            .iter()
            .map(|p| (p.hi - p.lo).abs())
            .sum::<f64>()
            .max(1.0);
        for p in &pieces {
            if !(p.lo < p.hi) || p.slopes.is_empty() {
                return bad(format!("degenerate piece [{}, {}]", p.lo, p.hi));
            }
            if p.slopes.iter().any(|s| !s.is_finite()) || !p.value_at_lo.is_finite() {
                return bad(format!("non-finite data on piece [{}, {}]", p.lo, p.hi));
            }
        }
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * scale;
        if !close(pieces[0].lo, grid.a()) || !close(pieces[pieces.len() - 1].hi, grid.b()) {
            return bad("pieces do not cover [a, b]".into());
        }
        jumps.sort_by(|p, q| p.x.total_cmp(&q.x));
        let mut jump_iter = jumps.iter().peekable();
        for w in pieces.windows(2) {
            if !close(w[0].hi, w[1].lo) {
                return bad(format!("gap or overlap at {} / {}", w[0].hi, w[1].lo));
            }
            let gap = w[1].value_at_lo - w[0].value_at_hi();
            let tol = CONTINUITY_TOL * (1.0 + w[0].value_at_hi().abs().max(w[1].value_at_lo.abs()));
            match jump_iter.peek() {
                Some(j) if close(j.x, w[0].hi) => {
                    if (j.jump - gap).abs() > tol {
                        return bad(format!("jump at {} is {}, pieces differ by {}", j.x, j.jump, gap));
                    }
                    jump_iter.next();
                }
                _ => {
                    if gap.abs() > tol {
                        return bad(format!("discontinuity of {} at {} without jump record", gap, w[0].hi));
                    }
                }
            }
        }
        if let Some(j) = jump_iter.next() {
            return bad(format!("jump at {} is not on an interior piece boundary", j.x));
        }
        for &(x, m) in &cantor_atoms {
            if !(x > grid.a() && x < grid.b() && m.is_finite()) {
                return bad(format!("cantor atom ({x}, {m}) outside ]a, b[ or non-finite"));
            }
        }
        Ok(PiecewiseBVFunction {
            grid,
            pieces,
            jumps,
            cantor_atoms,
        })
    }

    /// Single piece sampled from the nodal values of a signal.
    pub fn from_signal(s: &DiscreteSignal) -> Self {
        let g = *s.grid();
        let piece = Piece {
            lo: g.a(),
            hi: g.b(),
            value_at_lo: s.values()[0],
            slopes: super::derivative_samples(s),
        };
        PiecewiseBVFunction {
            grid: g,
            pieces: vec![piece],
            jumps: Vec::new(),
            cantor_atoms: Vec::new(),
        }
    }

    /// Two constant pieces joined by one jump at `x0` with the given
    /// one-sided slopes recorded at the jump.
    pub fn step(
        grid: Grid,
        x0: f64,
        left_value: f64,
        right_value: f64,
        left_slope: ExtReal,
        right_slope: ExtReal,
    ) -> Result<Self, SignalError> {
        let left_cells = ((x0 - grid.a()) / grid.spacing()).round().max(1.0) as usize;
        let right_cells = ((grid.b() - x0) / grid.spacing()).round().max(1.0) as usize;
        let pieces = vec![
            Piece::constant(grid.a(), x0, left_value, left_cells),
            Piece::constant(x0, grid.b(), right_value, right_cells),
        ];
        let jump = JumpRecord::new(x0, right_value - left_value, left_slope, right_slope)?;
        PiecewiseBVFunction::new(grid, pieces, vec![jump], Vec::new())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn jumps(&self) -> &[JumpRecord] {
        &self.jumps
    }

    pub fn cantor_atoms(&self) -> &[(f64, f64)] {
        &self.cantor_atoms
    }

    /// The jump record sitting on the boundary between pieces `i` and `i + 1`.
    pub fn jump_after_piece(&self, i: usize) -> Option<&JumpRecord> {
        let x = self.pieces.get(i)?.hi;
        let scale = (self.grid.b() - self.grid.a()).max(1.0);
        self.jumps.iter().find(|j| (j.x - x).abs() <= 1e-12 * scale)
    }

    /// Right-continuous reconstruction of the absolutely continuous and jump parts.
    pub fn eval(&self, x: f64) -> f64 {
        let idx = self
            .pieces
            .iter()
            .position(|p| x < p.hi)
            .unwrap_or(self.pieces.len() - 1);
        self.pieces[idx].eval(x.clamp(self.pieces[idx].lo, self.pieces[idx].hi))
    }

    pub fn to_signal(&self) -> DiscreteSignal {
        DiscreteSignal::from_fn(self.grid, |x| self.eval(x))
    }
}
