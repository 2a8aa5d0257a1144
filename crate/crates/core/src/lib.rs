//! Human-aware potential-field motion planning.
//!
//! The crate plans an end-effector path with an artificial potential field
//! whose step size, velocity, and repulsive terms adapt to the person sharing
//! the workspace:
//!
//! * [`human_signal`] turns pre-extracted facial action units, head pose and
//!   gaze readings into expression labels and turn angles, and fits the
//!   turn-angle to arm-displacement regression.
//! * [`prediction`] extrapolates the hand position and velocity from a turn.
//! * [`apf`] holds the force-field terms.
//! * [`planner`] is the per-tick control law for the three planner modes.
//! * [`sim`] runs scripted scenarios deterministically and scores them.
//! * [`cli`] is the command-line front end used by the `psdapf` binary.

pub mod apf;
pub mod cli;
pub mod config;
pub mod human_signal;
pub mod planner;
pub mod prediction;
pub mod sim;

/// Task-space vector, meters or meters per second depending on context.
pub type Vec3 = nalgebra::Vector3<f64>;

pub use apf::{ApfError, PotentialParams};
pub use config::PlannerConfig;
pub use human_signal::{ActionUnit, ActionUnitSample, ExpressionLabel, HumanSignalFrame};
pub use planner::{AdaptationParams, HumanFlags, PlanError, Planner, PlannerMode, RobotState};
pub use sim::{Metrics, Scenario, Trajectory, WorldState};
