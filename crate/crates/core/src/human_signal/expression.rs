use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ActionUnit, ActionUnitSample, ExpressionLabel, SignalError};

fn default_threshold() -> f64 {
    1.0
}

/// Per-person calibration of expression responses.
///
/// `means` holds the trimmed per-AU averages gathered before a session and is
/// informational. `thresholds` gate classification: an expression is only
/// reported when the mean of its three characteristic AUs exceeds its
/// threshold.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpressionProfile {
    #[serde(default)]
    pub means: BTreeMap<ExpressionLabel, ActionUnitSample>,
    #[serde(default)]
    pub thresholds: Thresholds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default = "default_threshold")]
    pub surprise: f64,
    #[serde(default = "default_threshold")]
    pub sad: f64,
    #[serde(default = "default_threshold")]
    pub happy: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            surprise: default_threshold(),
            sad: default_threshold(),
            happy: default_threshold(),
        }
    }
}

impl Thresholds {
    pub fn get(&self, label: ExpressionLabel) -> Option<f64> {
        match label {
            ExpressionLabel::Expressionless => None,
            ExpressionLabel::Surprise => Some(self.surprise),
            ExpressionLabel::Sad => Some(self.sad),
            ExpressionLabel::Happy => Some(self.happy),
        }
    }
}

impl ExpressionProfile {
    pub fn validate(&self) -> Result<(), SignalError> {
        for (name, t) in [
            ("surprise", self.thresholds.surprise),
            ("sad", self.thresholds.sad),
            ("happy", self.thresholds.happy),
        ] {
            if !(t.is_finite() && t > 0.0) {
                return Err(SignalError::Calibration(format!(
                    "threshold for {name} must be > 0, got {t}"
                )));
            }
        }
        Ok(())
    }
}

fn trimmed_mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let kept = &values[1..values.len() - 1];
    kept.iter().sum::<f64>() / kept.len() as f64
}

/// Builds a profile from pre-session samples, dropping one maximum and one
/// minimum per AU before averaging. Thresholds start at their defaults.
pub fn calibrate_profile(
    samples: &BTreeMap<ExpressionLabel, Vec<ActionUnitSample>>,
) -> Result<ExpressionProfile, SignalError> {
    if samples.is_empty() {
        return Err(SignalError::Calibration("no expression samples".into()));
    }
    let mut means = BTreeMap::new();
    for (label, group) in samples {
        if group.len() < 3 {
            return Err(SignalError::Calibration(format!(
                "expression {label} has {} samples, at least 3 required",
                group.len()
            )));
        }
        let mut averaged = [0.0; 9];
        for au in ActionUnit::ALL {
            let mut column: Vec<f64> = group.iter().map(|s| s.get(au)).collect();
            averaged[au.index()] = trimmed_mean(&mut column);
        }
        means.insert(*label, ActionUnitSample::new(averaged)?);
    }
    Ok(ExpressionProfile {
        means,
        thresholds: Thresholds::default(),
    })
}

/// Labels a frame by the strongest characteristic AU group above threshold.
/// Ties resolve to the lowest label code.
pub fn classify_expression(
    sample: &ActionUnitSample,
    profile: &ExpressionProfile,
) -> ExpressionLabel {
    let mut best: Option<(ExpressionLabel, f64)> = None;
    for label in ExpressionLabel::ALL {
        let (Some(aus), Some(threshold)) = (label.action_units(), profile.thresholds.get(label))
        else {
            continue;
        };
        let score = aus.iter().map(|au| sample.get(*au)).sum::<f64>() / 3.0;
        if score <= threshold {
            continue;
        }
        // ALL is in code order, so strict > keeps the lowest code on ties.
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((label, score));
        }
    }
    best.map_or(ExpressionLabel::Expressionless, |(label, _)| label)
}
