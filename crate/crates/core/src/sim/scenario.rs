use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::config::{ConfigError, PlannerConfig};
use crate::human_signal::{parse_signal_stream, validate_stream, HumanSignalFrame, SignalError};
use crate::prediction::ObstacleState;
use crate::Vec3;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("scenario schema: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("scenario field `{field}`: {message}")]
    Invalid {
        field: &'static str,
        message: String,
    },
    #[error("scenario signal stream: {0}")]
    Signal(#[from] SignalError),
    #[error("scenario {0}")]
    Config(#[from] ConfigError),
}

fn invalid(field: &'static str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waypoint {
    pub t: f64,
    pub position: Vec3,
}

/// Piecewise-linear hand path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObstacleTrack {
    pub waypoints: Vec<Waypoint>,
}

impl ObstacleTrack {
    pub fn stationary(position: Vec3) -> Self {
        Self {
            waypoints: vec![Waypoint { t: 0.0, position }],
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.waypoints.is_empty() {
            return Err(invalid("obstacle_track", "needs at least one waypoint"));
        }
        for (i, w) in self.waypoints.iter().enumerate() {
            if !w.t.is_finite() || w.position.iter().any(|c| !c.is_finite()) {
                return Err(invalid(
                    "obstacle_track",
                    format!("waypoint {i} is not finite"),
                ));
            }
            if i > 0 && w.t <= self.waypoints[i - 1].t {
                return Err(invalid(
                    "obstacle_track",
                    format!(
                        "waypoint times must strictly increase (waypoint {i} at t = {})",
                        w.t
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn last_time(&self) -> f64 {
        self.waypoints.last().map_or(0.0, |w| w.t)
    }
}

/// Hand state at time `t`: linear interpolation between waypoints with the
/// segment slope as velocity, held still outside the scripted span.
pub fn obstacle_at(track: &ObstacleTrack, t: f64) -> ObstacleState {
    let w = &track.waypoints;
    let first = w[0];
    let last = w[w.len() - 1];
    if t <= first.t {
        return ObstacleState::at_rest(first.position);
    }
    if t >= last.t {
        return ObstacleState::at_rest(last.position);
    }
    let i = w.partition_point(|wp| wp.t <= t);
    let (a, b) = (w[i - 1], w[i]);
    let velocity = (b.position - a.position) / (b.t - a.t);
    ObstacleState {
        position: a.position + velocity * (t - a.t),
        velocity,
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    dt: f64,
    duration: f64,
    robot_start: Vec3,
    goal: Vec3,
    obstacle_track: ObstacleTrack,
    #[serde(default)]
    signal_stream: Option<Value>,
    #[serde(default = "default_collision_radius")]
    collision_radius: f64,
    #[serde(default)]
    config: Value,
}

fn default_collision_radius() -> f64 {
    0.05
}

/// A scripted episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub dt: f64,
    pub duration: f64,
    pub robot_start: Vec3,
    pub goal: Vec3,
    pub obstacle_track: ObstacleTrack,
    pub signal_stream: Vec<HumanSignalFrame>,
    pub collision_radius: f64,
    /// Effective planner configuration. `adaptation.dt` always equals `dt`.
    pub config: PlannerConfig,
    config_block: Value,
}

impl Scenario {
    /// Builds a scenario in code; `config` is used as given apart from `dt`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        dt: f64,
        duration: f64,
        robot_start: Vec3,
        goal: Vec3,
        obstacle_track: ObstacleTrack,
        signal_stream: Vec<HumanSignalFrame>,
        config: PlannerConfig,
    ) -> Result<Self, ScenarioError> {
        let config_block = serde_json::to_value(&config)?;
        let mut scenario = Self {
            name: name.into(),
            dt,
            duration,
            robot_start,
            goal,
            obstacle_track,
            signal_stream,
            collision_radius: default_collision_radius(),
            config,
            config_block,
        };
        scenario.config.adaptation.dt = dt;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(invalid(
                "duration",
                format!("must be > 0, got {}", self.duration),
            ));
        }
        for (field, v) in [("robot_start", &self.robot_start), ("goal", &self.goal)] {
            if v.iter().any(|c| !c.is_finite()) {
                return Err(invalid(field, "must be finite"));
            }
        }
        self.obstacle_track.validate()?;
        if self.duration < self.obstacle_track.last_time() {
            return Err(invalid(
                "duration",
                format!(
                    "{} ends before the last waypoint at {}",
                    self.duration,
                    self.obstacle_track.last_time()
                ),
            ));
        }
        if !(self.collision_radius.is_finite() && self.collision_radius >= 0.0) {
            return Err(invalid(
                "collision_radius",
                "must be finite and non-negative",
            ));
        }
        validate_stream(&self.signal_stream)?;
        self.config.validate()?;
        Ok(())
    }

    /// Re-resolves the planner configuration with `overrides` layered on top
    /// of the scenario's embedded block.
    pub fn with_overrides(&self, overrides: &Value) -> Result<Self, ScenarioError> {
        let mut out = self.clone();
        out.config = PlannerConfig::layered([&self.config_block, overrides])?;
        out.config.adaptation.dt = self.dt;
        out.validate()?;
        Ok(out)
    }

    /// Latest signal frame at or before `t`.
    pub fn signal_at(&self, t: f64) -> Option<&HumanSignalFrame> {
        // Frame stamps and the tick grid come from different arithmetic;
        // allow a hair of slack so a frame stamped on a tick applies to it.
        let i = self
            .signal_stream
            .partition_point(|f| f.t <= t + 1e-9 * self.dt);
        i.checked_sub(1).map(|i| &self.signal_stream[i])
    }
}

/// Parses a scenario document. Relative signal-stream paths resolve against
/// `base_dir`.
pub fn load_scenario_str(text: &str, base_dir: Option<&Path>) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(text)?;
    let signal_stream = match file.signal_stream {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::String(path)) => {
            let path = PathBuf::from(path);
            let path = match base_dir {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path,
            };
            let text = std::fs::read_to_string(&path)
                .map_err(|source| ScenarioError::Io { path, source })?;
            parse_signal_stream(&text)?
        }
        Some(frames @ Value::Array(_)) => {
            serde_json::from_value(frames).map_err(|e| invalid("signal_stream", e.to_string()))?
        }
        Some(_) => {
            return Err(invalid(
                "signal_stream",
                "expected an array of frames or a JSON-lines file path",
            ))
        }
    };
    let mut config = PlannerConfig::layered([&file.config])?;
    config.adaptation.dt = file.dt;
    let scenario = Scenario {
        name: file.name,
        dt: file.dt,
        duration: file.duration,
        robot_start: file.robot_start,
        goal: file.goal,
        obstacle_track: file.obstacle_track,
        signal_stream,
        collision_radius: file.collision_radius,
        config,
        config_block: file.config,
    };
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_owned(),
        source,
    })?;
    load_scenario_str(&text, path.parent())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const MINIMAL: &str = r#"{
        "name": "straight",
        "dt": 0.2,
        "duration": 10,
        "robot_start": [0, 0, 0],
        "goal": [0, 1, 0],
        "obstacle_track": [{"t": 0, "position": [2, 0, 0]}]
    }"#;

    #[test]
    fn minimal_scenario_gets_defaults() {
        let s = load_scenario_str(MINIMAL, None).unwrap();
        assert_eq!(s.collision_radius, 0.05);
        assert!(s.signal_stream.is_empty());
        assert_eq!(s.config.potential, PlannerConfig::default().potential);
        assert_eq!(s.config.adaptation.dt, 0.2);
        assert!(s.signal_at(3.0).is_none());
    }

    #[test]
    fn duplicate_waypoint_times_rejected() {
        let text = MINIMAL.replace(
            r#"[{"t": 0, "position": [2, 0, 0]}]"#,
            r#"[{"t": 0, "position": [2, 0, 0]}, {"t": 0, "position": [1, 0, 0]}]"#,
        );
        let err = load_scenario_str(&text, None).unwrap_err();
        assert!(err.to_string().contains("obstacle_track"), "{err}");
    }

    #[test]
    fn missing_field_is_named() {
        let text = MINIMAL.replace(r#""goal": [0, 1, 0],"#, "");
        let err = load_scenario_str(&text, None).unwrap_err();
        assert!(err.to_string().contains("goal"), "{err}");
    }

    #[test]
    fn bad_dt_and_duration() {
        let err =
            load_scenario_str(&MINIMAL.replace(r#""dt": 0.2"#, r#""dt": 0"#), None).unwrap_err();
        assert!(err.to_string().contains("dt"), "{err}");
        let text = MINIMAL.replace(
            r#"[{"t": 0, "position": [2, 0, 0]}]"#,
            r#"[{"t": 0, "position": [2, 0, 0]}, {"t": 12, "position": [1, 0, 0]}]"#,
        );
        let err = load_scenario_str(&text, None).unwrap_err();
        assert!(err.to_string().contains("duration"), "{err}");
    }

    #[test]
    fn embedded_config_is_validated() {
        let text = MINIMAL.replace(
            r#""name": "straight","#,
            r#""name": "straight", "config": {"potential": {"p_min": 0.3}},"#,
        );
        let err = load_scenario_str(&text, None).unwrap_err();
        assert!(err.to_string().contains("p_min < p_max"), "{err}");
    }

    #[test]
    fn overrides_layer_over_embedded_block() {
        let text = MINIMAL.replace(
            r#""name": "straight","#,
            r#""name": "straight", "config": {"potential": {"k_r": 0.02, "k_ro": 0.2}},"#,
        );
        let s = load_scenario_str(&text, None).unwrap();
        let o = s
            .with_overrides(&serde_json::json!({"potential": {"k_r": 0.05}}))
            .unwrap();
        assert_eq!(o.config.potential.k_r, 0.05);
        assert_eq!(o.config.potential.k_ro, 0.2);
    }

    #[test]
    fn signal_stream_from_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("s.jsonl"),
            r#"{"t":0,"aus":{"AU01":0,"AU02":0,"AU04":0,"AU06":0,"AU07":0,"AU12":0,"AU15":0,"AU17":0,"AU25":0}}"#,
        )
        .unwrap();
        let text = MINIMAL.replace(
            r#""name": "straight","#,
            r#""name": "straight", "signal_stream": "s.jsonl","#,
        );
        let path = dir.path().join("scenario.json");
        std::fs::write(&path, text).unwrap();
        let s = load_scenario(&path).unwrap();
        assert_eq!(s.signal_stream.len(), 1);
    }

    #[test]
    fn interpolation() {
        let track = ObstacleTrack {
            waypoints: vec![
                Waypoint {
                    t: 0.0,
                    position: Vec3::zeros(),
                },
                Waypoint {
                    t: 1.0,
                    position: Vec3::new(0.0, 1.0, 0.0),
                },
                Waypoint {
                    t: 3.0,
                    position: Vec3::new(0.0, 1.0, 2.0),
                },
            ],
        };
        let mid = obstacle_at(&track, 0.5);
        assert_abs_diff_eq!(mid.position, Vec3::new(0.0, 0.5, 0.0), epsilon = 1e-15);
        assert_eq!(mid.velocity, Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(obstacle_at(&track, 1.0).position, Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(obstacle_at(&track, 3.0).position, Vec3::new(0.0, 1.0, 2.0));
        let after = obstacle_at(&track, 7.0);
        assert_eq!(after.position, Vec3::new(0.0, 1.0, 2.0));
        assert_eq!(after.velocity, Vec3::zeros());
        let before = obstacle_at(&track, -1.0);
        assert_eq!(before.position, Vec3::zeros());
    }

    #[test]
    fn interpolation_is_continuous() {
        let track = ObstacleTrack {
            waypoints: vec![
                Waypoint {
                    t: 0.0,
                    position: Vec3::zeros(),
                },
                Waypoint {
                    t: 1.0,
                    position: Vec3::new(1.0, -1.0, 0.5),
                },
                Waypoint {
                    t: 2.5,
                    position: Vec3::new(0.0, 2.0, 0.0),
                },
            ],
        };
        for i in 0..2500 {
            let t = i as f64 * 1e-3;
            let a = obstacle_at(&track, t).position;
            let b = obstacle_at(&track, t + 1e-6).position;
            assert!((a - b).norm() < 1e-5);
        }
    }
}
