//! Uniform grids, sampled signals and the difference operators shared by every solver.

mod csv_io;
mod piecewise;

pub use csv_io::{read_signal_csv, write_signal_csv};
pub use piecewise::{Piece, PiecewiseBVFunction};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ext::ExtReal;
use crate::weights::JumpDirection;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("invalid grid: a = {a}, b = {b}, n = {n} (need a < b, n >= 2)")]
    InvalidGrid { a: f64, b: f64, n: usize },
    #[error("signal has {got} values, grid expects {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("grids differ")]
    GridMismatch,
    #[error("jump at x = {0} must be nonzero")]
    ZeroJump(f64),
    #[error("invalid piecewise function: {0}")]
    Piecewise(String),
    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error(transparent)]
    CsvBackend(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Uniform partition of `[a, b]` into `n` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self, SignalError> {
        if !(a.is_finite() && b.is_finite() && a < b && n >= 2) {
            return Err(SignalError::InvalidGrid { a, b, n });
        }
        Ok(Grid { a, b, n })
    }

    /// `[0, 1]` with `n` cells.
    pub fn unit(n: usize) -> Result<Self, SignalError> {
        Grid::new(0.0, 1.0, n)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of cells; there are `n + 1` nodes.
    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.b
        } else {
            self.a + (self.b - self.a) * (i as f64 / self.n as f64)
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.node(i))
    }
}

/// Nodal values on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSignal {
    grid: Grid,
    values: Vec<f64>,
}

impl DiscreteSignal {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, SignalError> {
        if values.len() != grid.len() {
            return Err(SignalError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(DiscreteSignal { grid, values })
    }

    pub fn from_fn<F: FnMut(f64) -> f64>(grid: Grid, f: F) -> Self {
        let values = grid.nodes().map(f).collect();
        DiscreteSignal { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        DiscreteSignal {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map<F: FnMut(f64) -> f64>(&self, f: F) -> Self {
        DiscreteSignal {
            grid: self.grid,
            values: self.values.iter().copied().map(f).collect(),
        }
    }

    /// Node-wise `self + other`; grids must coincide.
    pub fn add(&self, other: &DiscreteSignal) -> Result<Self, SignalError> {
        if self.grid != other.grid {
            return Err(SignalError::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(DiscreteSignal { grid: self.grid, values })
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_distance(&self, other: &DiscreteSignal) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A detected or prescribed discontinuity: `jump = u₊ − u₋` at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpRecord {
    pub x: f64,
    pub jump: f64,
    pub nu: JumpDirection,
    pub left_slope: ExtReal,
    pub right_slope: ExtReal,
}

impl JumpRecord {
    pub fn new(x: f64, jump: f64, left_slope: ExtReal, right_slope: ExtReal) -> Result<Self, SignalError> {
        let nu = JumpDirection::from_jump(jump).ok_or(SignalError::ZeroJump(x))?;
        Ok(JumpRecord {
            x,
            jump,
            nu,
            left_slope,
            right_slope,
        })
    }
}

/// `Σ |u_{i+1} − u_i|`.
pub fn total_variation(s: &DiscreteSignal) -> f64 {
    s.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Forward differences `(u_{i+1} − u_i) / h`, one per cell.
pub fn derivative_samples(s: &DiscreteSignal) -> Vec<f64> {
    let h = s.grid.spacing();
    s.values.windows(2).map(|w| (w[1] - w[0]) / h).collect()
}

/// Central second differences `(u_{i+1} − 2u_i + u_{i−1}) / h²` at interior nodes.
pub fn second_derivative_samples(s: &DiscreteSignal) -> Vec<f64> {
    let h2 = s.grid.spacing().powi(2);
    s.values
        .windows(3)
        .map(|w| (w[2] - 2.0 * w[1] + w[0]) / h2)
        .collect()
}

pub const DEFAULT_JUMP_KAPPA: f64 = 10.0;

/// Flags cells whose increment exceeds `kappa · h · (median |u′| + 1)`.
///
/// One-sided slopes are the neighbouring forward differences; at the ends of
/// the grid the missing side copies the available one.
pub fn jump_detector(s: &DiscreteSignal, kappa: f64) -> Vec<JumpRecord> {
    assert!(kappa > 0.0, "kappa must be positive");
    let h = s.grid.spacing();
    let d = derivative_samples(s);
    let mut mags: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let median = median_sorted(&mags);
    let threshold = kappa * h * (median + 1.0);

    let mut out = Vec::new();
    for (i, w) in s.values.windows(2).enumerate() {
        let jump = w[1] - w[0];
        if jump.abs() > threshold {
            let left = if i > 0 { d[i - 1] } else { d.get(i + 1).copied().unwrap_or(0.0) };
            let right = d.get(i + 1).copied().unwrap_or(left);
            let x = 0.5 * (s.grid.node(i) + s.grid.node(i + 1));
            out.push(JumpRecord {
                x,
                jump,
                nu: JumpDirection::from_jump(jump).expect("nonzero above threshold"),
                left_slope: ExtReal::Finite(left),
                right_slope: ExtReal::Finite(right),
            });
        }
    }
    out
}

fn median_sorted(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        n if n % 2 == 1 => v[n / 2],
        n => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

/// Number of cells inside `[x_lo, x_hi]` (both cell ends in the window) whose
/// increment exceeds `tol`: the breaks between consecutive plateaus of a
/// piecewise-constant reconstruction.
pub fn plateau_breaks(s: &DiscreteSignal, x_lo: f64, x_hi: f64, tol: f64) -> usize {
    s.values
        .windows(2)
        .enumerate()
        .filter(|(i, w)| {
            let (l, r) = (s.grid.node(*i), s.grid.node(i + 1));
            l >= x_lo && r <= x_hi && (w[1] - w[0]).abs() > tol
        })
        .count()
}
