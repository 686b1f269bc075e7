//! ROF total-variation denoising in one dimension.
//!
//! `ROF_{λ,g}(u) = |u′|(]a,b[) + λ ∫ (u − g)²`.
//!
//! For a nondecreasing datum with values in `[0, 1]` the minimizer is explicit:
//! it is clipped to two plateaus `c₁ < c₂` and follows `g` in between
//! ([`rof_monotone_minimizer`]). Arbitrary sampled data go through the exact
//! taut-string solver of the discrete functional
//! `Σ |u_{i+1} − u_i| + λ h Σ (u_i − g_i)²` ([`rof_discrete_minimizer`]); the
//! factor `h` makes it a Riemann sum of the continuous one, so the two agree as
//! the grid is refined.

mod exact;
mod staircase;
mod taut_string;

pub use exact::{
    generalized_inverse, rof_monotone_minimizer, solve_c1_c2, MonotoneDatum, RofSolution, C_TOL,
    MAX_BISECTION_ITERS,
};
pub use staircase::{staircase_experiment, staircase_signal, StaircaseReport};
pub use taut_string::{rof_discrete_energy, rof_discrete_minimizer};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RofError {
    #[error("lambda must be finite and positive, got {0}")]
    InvalidLambda(f64),
    #[error("level {0} outside [0, 1]")]
    LevelOutOfRange(f64),
    #[error(
        "plateau conditions unsatisfiable at lambda = {lambda}: {reason}; \
         a larger fidelity parameter is required"
    )]
    Unsatisfiable { lambda: f64, reason: String },
    #[error("staircase experiment needs lambda > 4, got {0}")]
    StaircaseLambda(f64),
    #[error("staircase needs at least one step")]
    NoSteps,
}
