//! One-dimensional variational signal restoration.
//!
//! * [`weights`]: curvature weights `ψ`, the transforms `Ψ_p` and the jump
//!   penalties of the relaxed first-order-plus-curvature energy.
//! * [`signals`]: uniform grids, sampled signals, finite BV representations.
//! * [`rof`]: exact ROF minimizers for monotone data, a taut-string solver
//!   for arbitrary data, and the staircase experiment.
//! * [`energy`]: discrete and relaxed higher-order energies.
//! * [`hot`]: minimization of the higher-order energy plus fidelity and the
//!   anti-staircase sweep.
//! * [`cantor`]: generalized Cantor sets and the fixtures built on them.
//! * [`cli`]: the experiment harness behind the `tvstair` binary.

pub mod cantor;
pub mod cli;
pub mod energy;
pub mod ext;
pub mod hot;
pub mod numeric;
pub mod rof;
pub mod signals;
pub mod weights;

pub use ext::ExtReal;
pub use signals::{DiscreteSignal, Grid, JumpRecord, PiecewiseBVFunction};
pub use weights::{JumpDirection, WeightFunction};
