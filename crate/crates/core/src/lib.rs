//! Null controllability of a damped plate-type system on the square.
//!
//! The first-order system `v' = A w`, `w' = -A v - rho A w + u` with `A` the
//! Dirichlet Laplacian on `(0, a)^2` is discretized in space by five-point
//! finite differences ([`fdm`]) or P1 finite elements ([`fem`]) and in time by
//! implicit Euler. [`control`] builds an explicit steering control that drives
//! the discrete state to (near) rest at a prescribed time, and [`spectral`]
//! provides the closed-form homogeneous solution used as ground truth.

pub mod control;
pub mod error;
pub mod fdm;
pub mod fem;
pub mod kalman;
pub mod linalg;
pub mod metrics;
pub mod spectral;
pub mod stepper;
pub mod types;

pub use control::{run_null_control, NullControlRun, NullControlScheme};
pub use error::{PlateError, Result};
pub use linalg::{BlockSystem, SparseSpdMatrix, SpdSolver};
pub use metrics::{energy, rate_sequence, StateNorm};
pub use types::{make_time_grid, ControlTrajectory, PlateParams, RunReport, StatePair, TimeGrid};
