//! Time integration of the Galerkin system and trajectory operators.

mod forcing;
mod grid;
mod integrator;
mod residual;
mod trajectory;

pub use forcing::{make_forcing, ForcingSegment, ForcingSignal};
pub use grid::{trapezoid, Interval, TimeGrid, NODE_TOL};
pub use integrator::{integrate, GalerkinSystem, SOLVER_ID};
pub use residual::equation_residual;
pub use trajectory::{paste, Trajectory, TrajectoryMeta, PASTE_TOL};
