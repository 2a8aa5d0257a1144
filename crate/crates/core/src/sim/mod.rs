//! Deterministic scenario simulation.
//!
//! Time advances on a fixed grid `t_k = k * dt`. At every grid point the
//! hand position comes from the scripted track, the human signal from the
//! latest frame at or before `t_k`, and the planner moves the robot to its
//! state at `t_{k+1}`. A run ends when the robot sits on the goal, the
//! clearance drops below the collision radius, the duration is used up, or
//! the planner stalls in a local minimum.

mod metrics;
pub mod output;
mod scenario;

use serde::{Deserialize, Serialize};

pub use metrics::{compute_metrics, sharp_turn_count, Metrics, Outcome, SHARP_TURN_ANGLE};
pub use scenario::{
    load_scenario, load_scenario_str, obstacle_at, ObstacleTrack, Scenario, ScenarioError, Waypoint,
};

use crate::human_signal::{
    classify_expression, effective_turn_angle, raw_to_angle, ExpressionLabel,
};
pub use crate::planner::WorldState;
use crate::planner::{compute_flags, HumanFlags, PlanError, Planner, PlannerMode, RobotState};
use crate::Vec3;

/// One recorded grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub position: Vec3,
    pub obstacle: Vec3,
    /// Length of the step that reached `position`; the initial step budget
    /// on the first row.
    pub step: f64,
    pub speed: f64,
    pub expression: ExpressionLabel,
    /// Turn magnitude seen at this grid point, radians.
    pub turn_angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub mode: PlannerMode,
    pub rows: Vec<TrajectoryRow>,
}

/// Expression label and signed turn angle at time `t`.
pub fn human_state_at(scenario: &Scenario, t: f64) -> (ExpressionLabel, f64) {
    let Some(frame) = scenario.signal_at(t) else {
        return (ExpressionLabel::Expressionless, 0.0);
    };
    let config = &scenario.config;
    let label = classify_expression(&frame.aus, &config.expression);
    // The stream is validated on load, so the conversion cannot fail.
    let gaze = raw_to_angle(frame.gaze.h, &config.gaze_calibration).unwrap_or(0.0);
    let turn = effective_turn_angle(frame.head.yaw, gaze, config.adaptation.head_gate);
    (label, turn)
}

/// Flags the planner receives at time `t`.
pub fn flags_at(scenario: &Scenario, t: f64) -> (ExpressionLabel, HumanFlags) {
    let (label, turn) = human_state_at(scenario, t);
    let config = &scenario.config;
    (
        label,
        compute_flags(label, turn, &config.lateral_axis, &config.adaptation),
    )
}

/// Runs one planner mode over the scenario.
pub fn run(scenario: &Scenario, mode: PlannerMode) -> Result<(Trajectory, Metrics), PlanError> {
    let mut planner = Planner::new(mode, scenario.config.clone())?;
    let mut robot = RobotState::at_rest(scenario.robot_start, scenario.config.adaptation.d_0);
    let mut rows = Vec::new();
    let mut stall: Option<PlanError> = None;

    for k in 0usize.. {
        let t = k as f64 * scenario.dt;
        let obstacle = obstacle_at(&scenario.obstacle_track, t);
        let (label, flags) = flags_at(scenario, t);
        rows.push(TrajectoryRow {
            t,
            position: robot.position,
            obstacle: obstacle.position,
            step: robot.step,
            speed: robot.speed(),
            expression: label,
            turn_angle: flags.turn_angle,
        });
        let clearance = (robot.position - obstacle.position).norm();
        if clearance < scenario.collision_radius
            || robot.position == scenario.goal
            || t >= scenario.duration - 1e-9 * scenario.dt
        {
            break;
        }
        let world = WorldState {
            time: t,
            robot,
            obstacle,
            goal: scenario.goal,
        };
        match planner.tick(&world, &flags) {
            Ok(report) => robot = report.state,
            Err(e @ PlanError::LocalMinimum { .. }) => {
                stall = Some(e);
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let trajectory = Trajectory { mode, rows };
    let mut metrics = compute_metrics(&trajectory, scenario);
    if let Some(e) = stall {
        if !metrics.reached() {
            metrics.outcome = Outcome::LocalMinimum;
            metrics.dnf_reason = Some(e.to_string());
        }
    }
    Ok((trajectory, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PlannerConfig;
    use crate::human_signal::{ActionUnit, ActionUnitSample, GazeRaw, HeadPose, HumanSignalFrame};

    fn open_field(config: PlannerConfig) -> Scenario {
        Scenario::new(
            "open",
            0.2,
            30.0,
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            ObstacleTrack::stationary(Vec3::new(1.5, -0.5, 0.0)),
            Vec::new(),
            config,
        )
        .unwrap()
    }

    #[test]
    fn unobstructed_run_reaches_goal_cleanly() {
        let scenario = open_field(PlannerConfig::default());
        for mode in PlannerMode::ALL {
            let (traj, m) = run(&scenario, mode).unwrap();
            assert!(m.reached(), "{mode}: {m:?}");
            assert_eq!(m.sharp_turn_count, 0);
            assert!(m.min_clearance > scenario.config.potential.p_max);
            assert_eq!(traj.rows.last().unwrap().position, scenario.goal);
            assert!(m.path_length >= (scenario.goal - scenario.robot_start).norm());
        }
    }

    #[test]
    fn grid_is_uniform() {
        let scenario = open_field(PlannerConfig::default());
        let (traj, _) = run(&scenario, PlannerMode::Sdapf).unwrap();
        for (k, row) in traj.rows.iter().enumerate() {
            assert_eq!(row.t, k as f64 * scenario.dt);
        }
    }

    #[test]
    fn sad_expression_slows_only_psdapf() {
        let sad = ActionUnitSample::with_active(
            &[ActionUnit::AU04, ActionUnit::AU15, ActionUnit::AU17],
            3.0,
            0.2,
        )
        .unwrap();
        let mut scenario = open_field(PlannerConfig::default());
        scenario.signal_stream = vec![HumanSignalFrame {
            t: 0.0,
            aus: sad,
            head: HeadPose::default(),
            gaze: GazeRaw::default(),
        }];
        let (_, sdapf) = run(&scenario, PlannerMode::Sdapf).unwrap();
        let (traj, psdapf) = run(&scenario, PlannerMode::Psdapf).unwrap();
        assert!(psdapf.time_to_goal.unwrap() > sdapf.time_to_goal.unwrap());
        assert!(traj
            .rows
            .iter()
            .all(|r| r.expression == ExpressionLabel::Sad));
        assert!(traj.rows[1..].iter().all(|r| r.step <= 0.04 + 1e-15));
    }

    #[test]
    fn collision_stops_run() {
        let scenario = Scenario::new(
            "ram",
            0.2,
            10.0,
            Vec3::zeros(),
            Vec3::new(0.0, 1.0, 0.0),
            ObstacleTrack::stationary(Vec3::new(0.0, 0.02, 0.0)),
            Vec::new(),
            PlannerConfig::default(),
        )
        .unwrap();
        let (traj, m) = run(&scenario, PlannerMode::Apf).unwrap();
        assert!(m.collided);
        assert_eq!(m.outcome, Outcome::Collision);
        assert!(m.min_clearance < scenario.collision_radius);
        assert_eq!(traj.rows.len(), 1);
    }

    #[test]
    fn timeout_is_dnf() {
        let mut scenario = open_field(PlannerConfig::default());
        scenario.duration = 1.0;
        let (traj, m) = run(&scenario, PlannerMode::Apf).unwrap();
        assert_eq!(m.outcome, Outcome::Timeout);
        assert!(m.time_to_goal.is_none());
        assert_eq!(traj.rows.last().unwrap().t, 1.0);
    }

    #[test]
    fn runs_are_bit_reproducible() {
        let scenario = open_field(PlannerConfig::default());
        for mode in PlannerMode::ALL {
            assert_eq!(run(&scenario, mode).unwrap(), run(&scenario, mode).unwrap());
        }
    }
}
