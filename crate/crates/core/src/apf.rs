//! Potential-field force terms.
//!
//! All functions are pure. Distances are meters; force vectors are in
//! planner units and only their direction and relative size matter to the
//! planner, which normalizes the net force.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Vec3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApfError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("geometry error: {0}")]
    Geometry(String),
}

/// Gains and radii of the potential field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialParams {
    /// Attractive gain.
    pub k_a: f64,
    /// Repulsive gain.
    pub k_r: f64,
    /// Velocity-repulsive gain.
    pub k_ro: f64,
    /// Goal-distance exponent of the repulsive potential.
    pub n: f64,
    /// Repulsion cutoff radius, meters.
    pub p_0: f64,
    /// Outer radius of the distance factor, meters.
    pub p_max: f64,
    /// Radius at which the distance factor equals one, meters.
    pub p_min: f64,
    /// Obstacle speed scale in the speed factor.
    pub gamma: f64,
    /// Danger distance of the step rule, meters.
    pub p_d: f64,
    /// Smallest distance used inside force formulas, meters.
    pub p_floor: f64,
}

impl Default for PotentialParams {
    fn default() -> Self {
        Self {
            k_a: 1.0,
            k_r: 0.01,
            k_ro: 0.5,
            n: 2.0,
            p_0: 0.25,
            p_max: 0.25,
            p_min: 0.05,
            gamma: 1.0,
            p_d: 0.25,
            p_floor: 1e-4,
        }
    }
}

impl PotentialParams {
    pub fn validate(&self) -> Result<(), ApfError> {
        let fields = [
            ("k_a", self.k_a),
            ("k_r", self.k_r),
            ("k_ro", self.k_ro),
            ("n", self.n),
            ("p_0", self.p_0),
            ("p_max", self.p_max),
            ("p_min", self.p_min),
            ("gamma", self.gamma),
            ("p_d", self.p_d),
            ("p_floor", self.p_floor),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(ApfError::Parameter(format!("{name} must be finite")));
        }
        let check = |ok: bool, rule: &str| {
            if ok {
                Ok(())
            } else {
                Err(ApfError::Parameter(format!("violated {rule}")))
            }
        };
        check(self.p_min > 0.0, "0 < p_min")?;
        check(self.p_min < self.p_max, "p_min < p_max")?;
        check(self.p_0 > 0.0, "p_0 > 0")?;
        check(self.n > 0.0, "n > 0")?;
        check(self.gamma > 0.0, "gamma > 0")?;
        check(self.p_d >= self.p_max, "p_d >= p_max")?;
        check(self.k_a >= 0.0, "k_a >= 0")?;
        check(self.k_r >= 0.0, "k_r >= 0")?;
        check(self.k_ro >= 0.0, "k_ro >= 0")?;
        check(self.p_floor > 0.0, "p_floor > 0")?;
        Ok(())
    }
}

/// Scale that makes the distance factor exactly one at `p_min`.
pub fn distance_scale(params: &PotentialParams) -> Result<f64, ApfError> {
    let (p_max, p_min) = (params.p_max, params.p_min);
    if !(p_min > 0.0 && p_min < p_max) {
        return Err(ApfError::Parameter(format!(
            "violated 0 < p_min < p_max (p_min = {p_min}, p_max = {p_max})"
        )));
    }
    Ok(p_max * p_min / (p_max - p_min))
}

/// Distance influence factor: `η (1/p − 1/p_max)` inside `p_max`, else 0.
pub fn distance_factor(p: f64, params: &PotentialParams) -> Result<f64, ApfError> {
    if p.is_nan() || p <= 0.0 {
        return Err(ApfError::Geometry(format!(
            "obstacle distance {p} must be positive"
        )));
    }
    distance_scale(params)?;
    let (p_max, p_min) = (params.p_max, params.p_min);
    if p > p_max {
        return Ok(0.0);
    }
    // Same value as η(1/p − 1/p_max) with η expanded; this grouping gives
    // exactly 1 at p_min and exactly 0 at p_max.
    Ok(p_min * (p_max - p) / (p * (p_max - p_min)))
}

/// Speed influence factor, the sign of `γ|v_o| − |v_r|`.
pub fn speed_factor(v_o: &Vec3, v_r: &Vec3, gamma: f64) -> i8 {
    let d = gamma * v_o.norm() - v_r.norm();
    if d > 0.0 {
        1
    } else if d < 0.0 {
        -1
    } else {
        0
    }
}

/// Angle in `[0, π]` between the relative velocity `v_r − v_o` and the
/// robot-to-obstacle displacement. A zero relative velocity reads as π.
pub fn approach_angle(
    v_r: &Vec3,
    v_o: &Vec3,
    x_robot: &Vec3,
    x_obstacle: &Vec3,
) -> Result<f64, ApfError> {
    let to_obstacle = x_obstacle - x_robot;
    if to_obstacle.norm() == 0.0 {
        return Err(ApfError::Geometry(
            "robot and obstacle positions coincide".into(),
        ));
    }
    let relative = v_r - v_o;
    if relative.norm() == 0.0 {
        return Ok(PI);
    }
    Ok(relative
        .cross(&to_obstacle)
        .norm()
        .atan2(relative.dot(&to_obstacle)))
}

/// Velocity repulsive force. Non-zero only while the robot closes on the
/// obstacle (`α < π/2`) inside the distance factor's range.
pub fn velocity_repulsive(
    v_r: &Vec3,
    v_o: &Vec3,
    f_d: f64,
    k_v: i8,
    alpha: f64,
    k_ro: f64,
) -> Vec3 {
    if !(f_d > 0.0 && alpha.abs() < FRAC_PI_2) {
        return Vec3::zeros();
    }
    if k_v > 0 {
        (v_r + v_o) * (k_ro * f_d)
    } else {
        (v_r - v_o) * (k_ro * f_d)
    }
}

pub fn attractive_force(x: &Vec3, x_g: &Vec3, k_a: f64) -> Vec3 {
    (x_g - x) * k_a
}

/// Magnitude of the obstacle-facing repulsive term,
/// `k_r (1/p − 1/p_0) d_g^n / p²`.
pub fn rep1_magnitude(p: f64, d_g: f64, params: &PotentialParams) -> f64 {
    if p >= params.p_0 {
        return 0.0;
    }
    params.k_r * (1.0 / p - 1.0 / params.p_0) / (p * p) * d_g.powf(params.n)
}

/// Magnitude of the goal-facing term, `(n k_r / 2)(1/p − 1/p_0)² d_g^(n−1)`.
pub fn rep2_magnitude(p: f64, d_g: f64, params: &PotentialParams) -> f64 {
    if p >= params.p_0 || d_g == 0.0 {
        return 0.0;
    }
    let s = 1.0 / p - 1.0 / params.p_0;
    params.n * params.k_r / 2.0 * s * s * d_g.powf(params.n - 1.0)
}

/// Repulsive potential `(k_r/2)(1/p − 1/p_0)² d_g^n`; the two terms above
/// are its partial derivatives in `p` and `d_g`.
pub fn repulsive_potential(p: f64, d_g: f64, params: &PotentialParams) -> f64 {
    if p >= params.p_0 {
        return 0.0;
    }
    let s = 1.0 / p - 1.0 / params.p_0;
    params.k_r / 2.0 * s * s * d_g.powf(params.n)
}

/// The two repulsive terms as vectors: the first points from the obstacle
/// to the robot, the second from the robot to the goal.
pub fn repulsive_terms(
    x: &Vec3,
    x_g: &Vec3,
    x_obs: &Vec3,
    params: &PotentialParams,
) -> (Vec3, Vec3) {
    let away = x - x_obs;
    let true_p = away.norm();
    let p = true_p.max(params.p_floor);
    if p >= params.p_0 {
        return (Vec3::zeros(), Vec3::zeros());
    }
    let to_goal = x_g - x;
    let d_g = to_goal.norm();
    let rep1 = if true_p > 0.0 {
        away / true_p * rep1_magnitude(p, d_g, params)
    } else {
        Vec3::zeros()
    };
    let rep2 = if d_g > 0.0 {
        to_goal / d_g * rep2_magnitude(p, d_g, params)
    } else {
        Vec3::zeros()
    };
    (rep1, rep2)
}

pub fn repulsive_force(x: &Vec3, x_g: &Vec3, x_obs: &Vec3, params: &PotentialParams) -> Vec3 {
    let (rep1, rep2) = repulsive_terms(x, x_g, x_obs, params);
    rep1 + rep2
}

pub fn net_force(f_att: &Vec3, f_rep: &Vec3, f_rev: &Vec3) -> Vec3 {
    f_att + f_rep + f_rev
}
