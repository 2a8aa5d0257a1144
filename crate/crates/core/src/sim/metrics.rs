use serde::{Deserialize, Serialize};

use super::{Scenario, Trajectory};
use crate::Vec3;

/// Consecutive displacements turning by more than this count as a sharp
/// turn, radians.
pub const SHARP_TURN_ANGLE: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Reached,
    Collision,
    Timeout,
    LocalMinimum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub outcome: Outcome,
    pub path_length: f64,
    pub min_clearance: f64,
    pub sharp_turn_count: usize,
    /// First grid time within the goal tolerance; `None` means DNF.
    pub time_to_goal: Option<f64>,
    pub collided: bool,
    /// Path length over elapsed time.
    pub mean_speed: f64,
    pub dnf_reason: Option<String>,
}

impl Metrics {
    pub fn reached(&self) -> bool {
        self.outcome == Outcome::Reached
    }
}

/// Number of consecutive displacement pairs that turn by more than
/// [`SHARP_TURN_ANGLE`]. Zero-length displacements are skipped.
pub fn sharp_turn_count(positions: &[Vec3]) -> usize {
    let moves: Vec<Vec3> = positions
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| d.norm() > 0.0)
        .collect();
    moves
        .windows(2)
        // angle > 90° exactly when the dot product is negative
        .filter(|w| w[0].dot(&w[1]) < 0.0)
        .count()
}

pub fn compute_metrics(traj: &Trajectory, scenario: &Scenario) -> Metrics {
    let rows = &traj.rows;
    let positions: Vec<Vec3> = rows.iter().map(|r| r.position).collect();
    let path_length = positions.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    let min_clearance = rows
        .iter()
        .map(|r| (r.position - r.obstacle).norm())
        .fold(f64::INFINITY, f64::min);
    let collided = rows
        .iter()
        .any(|r| (r.position - r.obstacle).norm() < scenario.collision_radius);
    let time_to_goal = rows
        .iter()
        .find(|r| (r.position - scenario.goal).norm() < scenario.config.eps_goal)
        .map(|r| r.t);
    let elapsed = rows.last().map_or(0.0, |r| r.t);
    let mean_speed = if elapsed > 0.0 {
        path_length / elapsed
    } else {
        0.0
    };

    let (outcome, dnf_reason) = if collided {
        (Outcome::Collision, Some("collision".to_owned()))
    } else if time_to_goal.is_some() {
        (Outcome::Reached, None)
    } else {
        (
            Outcome::Timeout,
            Some("duration exhausted before reaching the goal".to_owned()),
        )
    };
    Metrics {
        outcome,
        path_length,
        min_clearance,
        sharp_turn_count: sharp_turn_count(&positions),
        time_to_goal: if collided { None } else { time_to_goal },
        collided,
        mean_speed,
        dnf_reason,
    }
}
