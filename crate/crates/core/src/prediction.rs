//! Hand pose and velocity extrapolation from a head or gaze turn.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Vec3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PredictionError {
    #[error("parameter error: {0}")]
    Parameter(String),
}

/// Tracked hand state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObstacleState {
    pub position: Vec3,
    pub velocity: Vec3,
}

impl ObstacleState {
    pub fn at_rest(position: Vec3) -> Self {
        Self {
            position,
            velocity: Vec3::zeros(),
        }
    }
}

/// Where the person is about to move, read off a head or gaze turn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurnIntent {
    /// Unit vector toward the turned-to side; zero when there is no turn.
    pub direction: Vec3,
    /// Turn magnitude in radians. Clamped to `[0, π/2]` when used.
    pub angle: f64,
    /// Hand displacement for a full quarter turn, meters.
    pub arm_amp_max: f64,
}

impl TurnIntent {
    fn clamped_angle(&self) -> f64 {
        self.angle.clamp(0.0, FRAC_PI_2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub pose: Vec3,
    pub velocity: Vec3,
}

pub fn predict_pose(obs: &ObstacleState, intent: &TurnIntent) -> Vec3 {
    obs.position + intent.direction * (intent.arm_amp_max * intent.clamped_angle() / FRAC_PI_2)
}

pub fn predict_velocity(
    p_pre: &Vec3,
    obs: &ObstacleState,
    dt: f64,
) -> Result<Vec3, PredictionError> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(PredictionError::Parameter(format!(
            "dt must be > 0, got {dt}"
        )));
    }
    Ok((p_pre - obs.position) / dt)
}

pub fn predict(
    obs: &ObstacleState,
    intent: &TurnIntent,
    dt: f64,
) -> Result<Prediction, PredictionError> {
    let pose = predict_pose(obs, intent);
    let velocity = predict_velocity(&pose, obs, dt)?;
    Ok(Prediction { pose, velocity })
}
