//! Planner configuration block and its layering.
//!
//! The JSON form mirrors [`PlannerConfig`]; every field is optional and
//! falls back to its default. Layers are merged key by key, later layers
//! winning: defaults, then the scenario's embedded block, then an override
//! file.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::apf::PotentialParams;
use crate::human_signal::{AngleCalibration, ExpressionProfile};
use crate::planner::AdaptationParams;
use crate::Vec3;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub potential: PotentialParams,
    pub adaptation: AdaptationParams,
    /// Goal tolerance, meters.
    pub eps_goal: f64,
    /// Hand displacement for a quarter turn of the head, meters.
    pub arm_amp_max: f64,
    /// Workspace axis that a positive turn angle points along.
    pub lateral_axis: Vec3,
    pub expression: ExpressionProfile,
    pub gaze_calibration: AngleCalibration,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            potential: PotentialParams::default(),
            adaptation: AdaptationParams::default(),
            eps_goal: 0.01,
            arm_amp_max: 0.4,
            lateral_axis: Vec3::y(),
            expression: ExpressionProfile::default(),
            gaze_calibration: AngleCalibration::default(),
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());
        self.potential.validate().map_err(|e| invalid(&e))?;
        self.adaptation.validate().map_err(|e| invalid(&e))?;
        self.expression.validate().map_err(|e| invalid(&e))?;
        self.gaze_calibration.validate().map_err(|e| invalid(&e))?;
        if !(self.eps_goal.is_finite() && self.eps_goal > 0.0) {
            return Err(ConfigError::Invalid("violated eps_goal > 0".into()));
        }
        if !(self.arm_amp_max.is_finite() && self.arm_amp_max > 0.0) {
            return Err(ConfigError::Invalid("violated arm_amp_max > 0".into()));
        }
        if !(self.lateral_axis.iter().all(|c| c.is_finite()) && self.lateral_axis.norm() > 0.0) {
            return Err(ConfigError::Invalid(
                "lateral_axis must be a finite non-zero vector".into(),
            ));
        }
        Ok(())
    }

    /// Applies JSON layers over the defaults and validates the result.
    pub fn layered<'a>(layers: impl IntoIterator<Item = &'a Value>) -> Result<Self, ConfigError> {
        let mut merged = serde_json::to_value(Self::default())?;
        for layer in layers {
            if !layer.is_object() && !layer.is_null() {
                return Err(ConfigError::Invalid(
                    "config block must be a JSON object".into(),
                ));
            }
            merge(&mut merged, layer);
        }
        let config: Self = serde_json::from_value(merged)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let value: Value = serde_json::from_str(text)?;
        Self::layered([&value])
    }
}

/// Recursive object merge; non-object values replace.
pub fn merge(base: &mut Value, layer: &Value) {
    match (base, layer) {
        (Value::Object(base), Value::Object(layer)) => {
            for (key, value) in layer {
                match base.get_mut(key) {
                    Some(existing) if existing.is_object() && value.is_object() => {
                        merge(existing, value)
                    }
                    _ => {
                        base.insert(key.clone(), value.clone());
                    }
                }
            }
        }
        (_, Value::Null) => {}
        (base, layer) => *base = layer.clone(),
    }
}
