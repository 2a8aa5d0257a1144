//! Per-tick control law.
//!
//! Three modes share one code path:
//!
//! * `Apf`: attraction plus the goal-aware repulsion, constant step `d_0`.
//! * `Sdapf`: adds the velocity repulsive force and the distance-driven
//!   step rule (velocity-scaled step when clear and closing, `d_0` inside
//!   the danger distance, a bounded move toward the goal when clear and
//!   separating).
//! * `Psdapf`: additionally slows down and shortens the step while the
//!   person shows an expression or looks away, and swaps the measured hand
//!   for the predicted one whenever a turn is detected.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apf::{self, ApfError};
use crate::config::PlannerConfig;
use crate::human_signal::{ExpressionLabel, DEFAULT_HEAD_GATE};
use crate::prediction::{self, ObstacleState, Prediction, PredictionError, TurnIntent};
use crate::Vec3;

/// Net force magnitude below which the planner reports a local minimum.
pub const MIN_FORCE: f64 = 1e-9;

/// Bound snapping tolerance for the adaptive step, meters.
const STEP_SNAP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("local minimum at ({:.6}, {:.6}, {:.6}): |F| = {force:e}", position.x, position.y, position.z)]
    LocalMinimum { position: Vec3, force: f64 },
    #[error(transparent)]
    Field(#[from] ApfError),
    #[error(transparent)]
    Prediction(#[from] PredictionError),
    #[error("parameter error: {0}")]
    Parameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerMode {
    Apf,
    Sdapf,
    Psdapf,
}

impl PlannerMode {
    pub const ALL: [PlannerMode; 3] = [PlannerMode::Apf, PlannerMode::Sdapf, PlannerMode::Psdapf];

    pub fn name(self) -> &'static str {
        match self {
            PlannerMode::Apf => "apf",
            PlannerMode::Sdapf => "sdapf",
            PlannerMode::Psdapf => "psdapf",
        }
    }
}

impl fmt::Display for PlannerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "").as_str() {
            "apf" => Ok(PlannerMode::Apf),
            "sdapf" => Ok(PlannerMode::Sdapf),
            "psdapf" => Ok(PlannerMode::Psdapf),
            other => Err(format!(
                "unknown planner '{other}', expected one of apf, sdapf, psdapf"
            )),
        }
    }
}

/// End-effector state after a tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub position: Vec3,
    pub velocity: Vec3,
    /// Displacement length of the tick that produced this state, meters.
    pub step: f64,
}

impl RobotState {
    pub fn at_rest(position: Vec3, step: f64) -> Self {
        Self {
            position,
            velocity: Vec3::zeros(),
            step,
        }
    }

    pub fn speed(&self) -> f64 {
        self.velocity.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub time: f64,
    pub robot: RobotState,
    pub obstacle: ObstacleState,
    pub goal: Vec3,
}

/// Speed and step adaptation constants. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptationParams {
    /// Largest velocity change a turn can add in one tick, m/s.
    pub v_max: f64,
    /// Speed reduction per tick while an expression is shown, m/s.
    pub v_b: f64,
    /// Step change per tick, meters.
    pub s_b: f64,
    /// Initial and largest step, meters.
    pub d_0: f64,
    /// Look-ahead time of the velocity-scaled step, seconds.
    pub t_m: f64,
    /// Smallest step, meters.
    pub s_min: f64,
    /// Control period, seconds.
    pub dt: f64,
    /// Turn angle above which attention counts as shifted.
    pub gaze_gate: f64,
    /// Head yaw below which the gaze angle is used instead.
    pub head_gate: f64,
    /// Absolute speed ceiling applied by the adaptation, m/s.
    pub v_cap: f64,
}

impl Default for AdaptationParams {
    fn default() -> Self {
        Self {
            v_max: 0.05,
            v_b: 0.03,
            s_b: 0.01,
            d_0: 0.05,
            t_m: 0.5,
            s_min: 0.02,
            dt: 0.2,
            gaze_gate: 10f64.to_radians(),
            head_gate: DEFAULT_HEAD_GATE,
            v_cap: 0.25,
        }
    }
}

impl AdaptationParams {
    pub fn validate(&self) -> Result<(), PlanError> {
        let fields = [
            ("v_max", self.v_max),
            ("v_b", self.v_b),
            ("s_b", self.s_b),
            ("d_0", self.d_0),
            ("t_m", self.t_m),
            ("s_min", self.s_min),
            ("dt", self.dt),
            ("gaze_gate", self.gaze_gate),
            ("head_gate", self.head_gate),
            ("v_cap", self.v_cap),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(PlanError::Parameter(format!("violated {name} > 0 ({v})")));
            }
        }
        if self.s_min > self.d_0 {
            return Err(PlanError::Parameter(format!(
                "violated s_min <= d_0 ({} > {})",
                self.s_min, self.d_0
            )));
        }
        Ok(())
    }
}

/// Human state as the control law sees it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HumanFlags {
    /// Abnormal (non-neutral) expression.
    pub expression_shown: bool,
    /// Attention shifted: turn angle beyond the gaze gate.
    pub attention_shifted: bool,
    /// Turn magnitude, radians.
    pub turn_angle: f64,
    /// Unit vector toward the turned-to side, zero without a turn.
    pub turn_direction: Vec3,
}

impl HumanFlags {
    pub fn neutral() -> Self {
        Self {
            expression_shown: false,
            attention_shifted: false,
            turn_angle: 0.0,
            turn_direction: Vec3::zeros(),
        }
    }

    pub fn abnormal(&self) -> bool {
        self.expression_shown || self.attention_shifted
    }
}

/// Derives the control flags from an expression label and a signed turn
/// angle. Positive angles turn toward `+lateral_axis`.
pub fn compute_flags(
    label: ExpressionLabel,
    signed_angle: f64,
    lateral_axis: &Vec3,
    params: &AdaptationParams,
) -> HumanFlags {
    let turn_angle = signed_angle.abs();
    let turn_direction = if turn_angle > 0.0 && lateral_axis.norm() > 0.0 {
        lateral_axis.normalize() * signed_angle.signum()
    } else {
        Vec3::zeros()
    };
    HumanFlags {
        expression_shown: !label.is_neutral(),
        attention_shifted: turn_angle > params.gaze_gate,
        turn_angle,
        turn_direction,
    }
}

fn clamp_speed(v: Vec3, v_cap: f64) -> Vec3 {
    let speed = v.norm();
    if speed > v_cap {
        v * (v_cap / speed)
    } else {
        v
    }
}

/// Adapts the robot velocity to the human flags.
///
/// With attention shifted the turn adds up to `v_max` toward the turn side.
/// Otherwise an abnormal expression takes `v_b` off the speed, keeping the
/// heading and never going below zero. With both flags clear the input is
/// returned untouched.
pub fn adapt_velocity(v_t: &Vec3, flags: &HumanFlags, params: &AdaptationParams) -> Vec3 {
    if flags.attention_shifted {
        let gain = params.v_max * flags.turn_angle.clamp(0.0, FRAC_PI_2) / FRAC_PI_2;
        clamp_speed(v_t + flags.turn_direction * gain, params.v_cap)
    } else if flags.expression_shown {
        let speed = v_t.norm();
        if speed == 0.0 {
            return Vec3::zeros();
        }
        let reduced = (speed - params.v_b).max(0.0);
        clamp_speed(v_t * (reduced / speed), params.v_cap)
    } else {
        *v_t
    }
}

/// Shrinks the step by `s_b` per abnormal tick down to `s_min`, and grows
/// it back by `s_b` per normal tick up to `d_0`.
pub fn adapt_step(s_t: f64, flags: &HumanFlags, params: &AdaptationParams) -> f64 {
    let next = if flags.abnormal() {
        (s_t - params.s_b).max(params.s_min)
    } else {
        (s_t + params.s_b).min(params.d_0)
    };
    if (next - params.s_min).abs() <= STEP_SNAP {
        params.s_min
    } else if (next - params.d_0).abs() <= STEP_SNAP {
        params.d_0
    } else {
        next
    }
}

/// Outcome of the distance-driven step rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepChoice {
    /// Follow the net force for this many meters.
    Step(f64),
    /// Clear of the obstacle and separating: head straight for the goal.
    GoalJump { step: f64 },
}

impl StepChoice {
    pub fn length(&self) -> f64 {
        match *self {
            StepChoice::Step(s) | StepChoice::GoalJump { step: s } => s,
        }
    }
}

/// Distance-driven step rule. `prev_distance` is the robot-obstacle
/// distance at the previous tick, `None` on the first tick.
pub fn sdapf_step_size(
    robot: &RobotState,
    obstacle_pos: &Vec3,
    prev_distance: Option<f64>,
    potential: &apf::PotentialParams,
    params: &AdaptationParams,
    goal: &Vec3,
) -> StepChoice {
    let distance = (robot.position - obstacle_pos).norm();
    let rate = prev_distance.map_or(0.0, |prev| distance - prev);
    let velocity_step = (robot.speed() * params.t_m).clamp(params.s_min, params.d_0);
    if distance <= potential.p_d {
        StepChoice::Step(params.d_0)
    } else if rate <= 0.0 {
        StepChoice::Step(velocity_step)
    } else {
        let remaining = (goal - robot.position).norm();
        StepChoice::GoalJump {
            step: remaining.min(velocity_step),
        }
    }
}

/// Intermediate quantities of one tick, kept for inspection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickReport {
    pub state: RobotState,
    pub force: Vec3,
    pub choice: Option<StepChoice>,
    pub prediction: Option<Prediction>,
    /// Step ceiling from the expression/attention adaptation.
    pub step_limit: f64,
    pub converged: bool,
}

/// Stateful planner for one episode. Not meant to be ticked concurrently.
#[derive(Debug, Clone)]
pub struct Planner {
    mode: PlannerMode,
    config: PlannerConfig,
    prev_distance: Option<f64>,
    step_limit: f64,
}

impl Planner {
    pub fn new(mode: PlannerMode, config: PlannerConfig) -> Result<Self, PlanError> {
        config
            .validate()
            .map_err(|e| PlanError::Parameter(e.to_string()))?;
        Ok(Self {
            mode,
            step_limit: config.adaptation.d_0,
            config,
            prev_distance: None,
        })
    }

    pub fn mode(&self) -> PlannerMode {
        self.mode
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.config
    }

    pub fn step_limit(&self) -> f64 {
        self.step_limit
    }

    /// Advances the robot by one control period.
    ///
    /// `flags` are ignored outside `Psdapf` mode.
    pub fn tick(
        &mut self,
        world: &WorldState,
        flags: &HumanFlags,
    ) -> Result<TickReport, PlanError> {
        let adapt = self.config.adaptation;
        let potential = self.config.potential;
        let x = world.robot.position;
        let goal = world.goal;
        let to_goal = goal - x;
        let remaining = to_goal.norm();
        let measured_distance = (x - world.obstacle.position).norm();

        if remaining < self.config.eps_goal {
            self.prev_distance = Some(measured_distance);
            return Ok(TickReport {
                state: RobotState {
                    position: goal,
                    velocity: to_goal / adapt.dt,
                    step: remaining,
                },
                force: Vec3::zeros(),
                choice: None,
                prediction: None,
                step_limit: self.step_limit,
                converged: true,
            });
        }

        let human = self.mode == PlannerMode::Psdapf;
        let flags = if human { *flags } else { HumanFlags::neutral() };
        if human {
            self.step_limit = adapt_step(self.step_limit, &flags, &adapt);
        }

        let prediction = if human && flags.attention_shifted {
            let intent = TurnIntent {
                direction: flags.turn_direction,
                angle: flags.turn_angle,
                arm_amp_max: self.config.arm_amp_max,
            };
            Some(prediction::predict(&world.obstacle, &intent, adapt.dt)?)
        } else {
            None
        };
        let (obs_pos, obs_vel) = match prediction {
            Some(p) => (p.pose, p.velocity),
            None => (world.obstacle.position, world.obstacle.velocity),
        };

        let v_r = world.robot.velocity;
        let f_att = apf::attractive_force(&x, &goal, potential.k_a);
        let f_rep = apf::repulsive_force(&x, &goal, &obs_pos, &potential);
        let f_rev = if self.mode == PlannerMode::Apf {
            Vec3::zeros()
        } else {
            let p = (x - obs_pos).norm().max(potential.p_floor);
            let f_d = apf::distance_factor(p, &potential)?;
            if f_d > 0.0 {
                let k_v = apf::speed_factor(&obs_vel, &v_r, potential.gamma);
                let alpha = apf::approach_angle(&v_r, &obs_vel, &x, &obs_pos)?;
                apf::velocity_repulsive(&v_r, &obs_vel, f_d, k_v, alpha, potential.k_ro)
            } else {
                Vec3::zeros()
            }
        };
        let force = apf::net_force(&f_att, &f_rep, &f_rev);

        let choice = match self.mode {
            PlannerMode::Apf => None,
            _ => Some(sdapf_step_size(
                &world.robot,
                &world.obstacle.position,
                self.prev_distance,
                &potential,
                &adapt,
                &goal,
            )),
        };
        self.prev_distance = Some(measured_distance);

        let (length, direction) = match choice {
            None => (adapt.d_0, self.force_direction(&force, &x)?),
            Some(StepChoice::Step(s)) => {
                (s.min(self.step_limit), self.force_direction(&force, &x)?)
            }
            Some(StepChoice::GoalJump { step }) => (step.min(self.step_limit), to_goal / remaining),
        };
        let length = length.min(remaining);
        let position = x + direction * length;
        let mut velocity = (position - x) / adapt.dt;
        if human {
            velocity = adapt_velocity(&velocity, &flags, &adapt);
        }
        Ok(TickReport {
            state: RobotState {
                position,
                velocity,
                step: length,
            },
            force,
            choice,
            prediction,
            step_limit: self.step_limit,
            converged: false,
        })
    }

    fn force_direction(&self, force: &Vec3, x: &Vec3) -> Result<Vec3, PlanError> {
        let magnitude = force.norm();
        if magnitude.is_nan() || magnitude < MIN_FORCE {
            return Err(PlanError::LocalMinimum {
                position: *x,
                force: magnitude,
            });
        }
        Ok(force / magnitude)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params() -> AdaptationParams {
        AdaptationParams::default()
    }

    fn flags(expression_shown: bool, attention_shifted: bool, turn_angle: f64) -> HumanFlags {
        HumanFlags {
            expression_shown,
            attention_shifted,
            turn_angle,
            turn_direction: if turn_angle > 0.0 {
                Vec3::y()
            } else {
                Vec3::zeros()
            },
        }
    }

    #[test]
    fn flag_examples() {
        let axis = Vec3::y();
        let f = compute_flags(ExpressionLabel::Expressionless, 0.0, &axis, &params());
        assert!(!f.expression_shown && !f.attention_shifted);
        let f = compute_flags(ExpressionLabel::Sad, 0.0, &axis, &params());
        assert!(f.expression_shown && !f.attention_shifted);
        let f = compute_flags(
            ExpressionLabel::Expressionless,
            30f64.to_radians(),
            &axis,
            &params(),
        );
        assert!(!f.expression_shown && f.attention_shifted);
        assert_eq!(f.turn_direction, Vec3::y());
        let f = compute_flags(
            ExpressionLabel::Happy,
            -30f64.to_radians(),
            &axis,
            &params(),
        );
        assert!(f.expression_shown && f.attention_shifted);
        assert_eq!(f.turn_direction, -Vec3::y());
        assert_eq!(f.turn_angle, 30f64.to_radians());
    }

    #[test]
    fn velocity_examples() {
        let v = Vec3::new(0.06, 0.08, 0.0);
        assert_eq!(adapt_velocity(&v, &flags(false, false, 0.0), &params()), v);
        let slowed = adapt_velocity(&v, &flags(true, false, 0.0), &params());
        assert_abs_diff_eq!(slowed.norm(), 0.07, epsilon = 1e-15);
        assert_abs_diff_eq!(slowed.normalize(), v.normalize(), epsilon = 1e-15);
        let turn = HumanFlags {
            expression_shown: false,
            attention_shifted: true,
            turn_angle: 0.0,
            turn_direction: Vec3::zeros(),
        };
        assert_eq!(adapt_velocity(&v, &turn, &params()), v);
    }

    #[test]
    fn expression_never_reverses_motion() {
        let v = Vec3::new(0.01, 0.0, 0.0);
        assert_eq!(
            adapt_velocity(&v, &flags(true, false, 0.0), &params()),
            Vec3::zeros()
        );
        assert_eq!(
            adapt_velocity(&Vec3::zeros(), &flags(true, false, 0.0), &params()),
            Vec3::zeros()
        );
    }

    #[test]
    fn turn_adds_velocity_toward_turn_side() {
        let v = Vec3::new(0.1, 0.0, 0.0);
        let out = adapt_velocity(&v, &flags(false, true, FRAC_PI_2), &params());
        assert_abs_diff_eq!(out, Vec3::new(0.1, 0.05, 0.0), epsilon = 1e-15);
        let fast = Vec3::new(0.25, 0.0, 0.0);
        let out = adapt_velocity(&fast, &flags(false, true, FRAC_PI_2), &params());
        assert_abs_diff_eq!(out.norm(), params().v_cap, epsilon = 1e-15);
    }

    #[test]
    fn step_examples() {
        let p = AdaptationParams {
            s_b: 0.02,
            ..params()
        };
        assert_eq!(adapt_step(0.03, &flags(true, false, 0.0), &p), 0.02);
        assert_eq!(
            adapt_step(p.d_0, &flags(false, false, 0.0), &params()),
            params().d_0
        );
        let p = AdaptationParams {
            s_b: 0.01,
            d_0: 0.1,
            ..params()
        };
        assert_abs_diff_eq!(
            adapt_step(0.05, &flags(false, false, 0.0), &p),
            0.06,
            epsilon = 1e-15
        );
    }

    #[test]
    fn step_reaches_floor_exactly() {
        let p = params();
        let mut s = p.d_0;
        let ticks = ((p.d_0 - p.s_min) / p.s_b - 1e-9).ceil() as usize;
        for _ in 0..ticks {
            s = adapt_step(s, &flags(true, false, 0.0), &p);
        }
        assert_eq!(s, 0.02);
        for _ in 0..ticks {
            s = adapt_step(s, &flags(false, false, 0.0), &p);
        }
        assert_eq!(s, p.d_0);
    }

    #[test]
    fn step_rule_cases() {
        let potential = apf::PotentialParams::default();
        let p = AdaptationParams {
            t_m: 0.5,
            d_0: 0.1,
            ..params()
        };
        let goal = Vec3::new(0.0, 5.0, 0.0);
        let robot = RobotState {
            position: Vec3::zeros(),
            velocity: Vec3::new(0.0, 0.1, 0.0),
            step: 0.05,
        };
        let at_pd = Vec3::new(potential.p_d, 0.0, 0.0);
        assert_eq!(
            sdapf_step_size(&robot, &at_pd, Some(1.0), &potential, &p, &goal),
            StepChoice::Step(p.d_0)
        );
        let far = Vec3::new(2.0 * potential.p_d, 0.0, 0.0);
        match sdapf_step_size(
            &robot,
            &far,
            Some(2.0 * potential.p_d + 0.01),
            &potential,
            &p,
            &goal,
        ) {
            StepChoice::Step(s) => assert_abs_diff_eq!(s, 0.05, epsilon = 1e-15),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            sdapf_step_size(
                &robot,
                &far,
                Some(2.0 * potential.p_d - 0.01),
                &potential,
                &p,
                &goal
            ),
            StepChoice::GoalJump { .. }
        ));
        // first tick: no history, treated as non-increasing
        assert!(matches!(
            sdapf_step_size(&robot, &far, None, &potential, &p, &goal),
            StepChoice::Step(_)
        ));
    }

    #[test]
    fn goal_jump_never_overshoots() {
        let potential = apf::PotentialParams::default();
        let goal = Vec3::new(0.0, 0.01, 0.0);
        let robot = RobotState {
            position: Vec3::zeros(),
            velocity: Vec3::new(0.0, 0.25, 0.0),
            step: 0.05,
        };
        let far = Vec3::new(1.0, 0.0, 0.0);
        assert_eq!(
            sdapf_step_size(&robot, &far, Some(0.9), &potential, &params(), &goal),
            StepChoice::GoalJump { step: 0.01 }
        );
    }

    fn world(robot: Vec3, obstacle: Vec3, goal: Vec3) -> WorldState {
        WorldState {
            time: 0.0,
            robot: RobotState::at_rest(robot, 0.05),
            obstacle: ObstacleState::at_rest(obstacle),
            goal,
        }
    }

    #[test]
    fn at_goal_is_a_fixed_point() {
        let goal = Vec3::new(0.3, 0.2, 0.1);
        for mode in PlannerMode::ALL {
            let mut planner = Planner::new(mode, PlannerConfig::default()).unwrap();
            let report = planner
                .tick(
                    &world(goal, Vec3::new(5.0, 5.0, 5.0), goal),
                    &HumanFlags::neutral(),
                )
                .unwrap();
            assert!(report.converged);
            assert_eq!(report.state.position, goal);
        }
    }

    #[test]
    fn displacement_equals_step() {
        let w = world(
            Vec3::zeros(),
            Vec3::new(0.1, 0.3, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        );
        for mode in PlannerMode::ALL {
            let mut planner = Planner::new(mode, PlannerConfig::default()).unwrap();
            let report = planner.tick(&w, &HumanFlags::neutral()).unwrap();
            let moved = (report.state.position - w.robot.position).norm();
            assert_abs_diff_eq!(moved, report.state.step, epsilon = 1e-15);
        }
    }

    #[test]
    fn psdapf_without_flags_matches_sdapf() {
        let w = world(
            Vec3::zeros(),
            Vec3::new(3.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        );
        let mut a = Planner::new(PlannerMode::Sdapf, PlannerConfig::default()).unwrap();
        let mut b = Planner::new(PlannerMode::Psdapf, PlannerConfig::default()).unwrap();
        let ra = a.tick(&w, &HumanFlags::neutral()).unwrap();
        let rb = b.tick(&w, &HumanFlags::neutral()).unwrap();
        assert_eq!(ra.state, rb.state);
    }

    #[test]
    fn vanishing_force_is_a_local_minimum() {
        // With both gains zeroed the net force is zero everywhere.
        let potential = apf::PotentialParams {
            k_a: 0.0,
            k_r: 0.0,
            ..Default::default()
        };
        let config = PlannerConfig {
            potential,
            ..PlannerConfig::default()
        };
        let mut planner = Planner::new(PlannerMode::Apf, config).unwrap();
        let err = planner
            .tick(
                &world(Vec3::zeros(), Vec3::new(0.1, 0.0, 0.0), Vec3::y()),
                &HumanFlags::neutral(),
            )
            .unwrap_err();
        assert!(matches!(err, PlanError::LocalMinimum { .. }));
    }

    #[test]
    fn mode_names_round_trip() {
        for mode in PlannerMode::ALL {
            assert_eq!(mode.name().parse::<PlannerMode>().unwrap(), mode);
        }
        assert_eq!(
            "P-SDAPF".parse::<PlannerMode>().unwrap(),
            PlannerMode::Psdapf
        );
        assert!("dwa".parse::<PlannerMode>().is_err());
    }

    proptest! {
        #[test]
        fn step_stays_in_bounds(seq in prop::collection::vec(any::<bool>(), 1..60)) {
            let p = params();
            let mut s = p.d_0;
            for abnormal in seq {
                s = adapt_step(s, &flags(abnormal, false, 0.0), &p);
                prop_assert!(s >= p.s_min && s <= p.d_0);
            }
        }

        #[test]
        fn speed_gain_bounded_by_v_max(
            vx in -0.2f64..0.2, vy in -0.2f64..0.2, turn_angle in 0.0f64..3.0, expression_shown in any::<bool>(), attention_shifted in any::<bool>(),
        ) {
            let v = Vec3::new(vx, vy, 0.0);
            let f = HumanFlags { expression_shown, attention_shifted, turn_angle, turn_direction: Vec3::z() };
            let out = adapt_velocity(&v, &f, &params());
            prop_assert!(out.norm() <= v.norm() + params().v_max + 1e-15);
        }
    }
}
