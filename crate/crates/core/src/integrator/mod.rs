//! Exponential time stepping with the exact per-mode linear propagator.

mod checkpoint;
mod run;
mod step;
mod table;

pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta, CHECKPOINT_FORMAT};
pub use run::{integrate, integrate_observed, integrate_with, plan_steps, Observer, Quantity, RunOptions, Trajectory};
pub use step::{cfl_dt, cfl_limits, linear_flow, CflLimits, Scheme, SchemeKind, Stepper};
pub use table::ModeTable;
