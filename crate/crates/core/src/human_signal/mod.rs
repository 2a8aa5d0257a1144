//! Facial and pose signal processing.
//!
//! Input is what a face-analysis tool already produced per camera frame:
//! action unit intensities, head pose, and raw gaze angles. Nothing here
//! touches images.

mod expression;
mod turn;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use expression::{calibrate_profile, classify_expression, ExpressionProfile};
pub use turn::{
    bin_turn_samples, effective_turn_angle, fit_turn_regression, predict_arm_distance,
    raw_to_angle, AngleCalibration, TurnRegression, TurnTable, DEFAULT_HEAD_GATE, TURN_SCALES_DEG,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("calibration error: {0}")]
    Calibration(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("signal stream line {line}: {message}")]
    Stream { line: usize, message: String },
}

/// Action units consumed by the expression classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActionUnit {
    AU01,
    AU02,
    AU04,
    AU06,
    AU07,
    AU12,
    AU15,
    AU17,
    AU25,
}

impl ActionUnit {
    pub const ALL: [ActionUnit; 9] = [
        ActionUnit::AU01,
        ActionUnit::AU02,
        ActionUnit::AU04,
        ActionUnit::AU06,
        ActionUnit::AU07,
        ActionUnit::AU12,
        ActionUnit::AU15,
        ActionUnit::AU17,
        ActionUnit::AU25,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ActionUnit::AU01 => "AU01",
            ActionUnit::AU02 => "AU02",
            ActionUnit::AU04 => "AU04",
            ActionUnit::AU06 => "AU06",
            ActionUnit::AU07 => "AU07",
            ActionUnit::AU12 => "AU12",
            ActionUnit::AU15 => "AU15",
            ActionUnit::AU17 => "AU17",
            ActionUnit::AU25 => "AU25",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|au| au.name() == name)
    }
}

impl fmt::Display for ActionUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const AU_INTENSITY_MAX: f64 = 5.0;

/// One frame of action unit intensities, each in `[0, 5]`.
///
/// Serialized as a JSON object keyed by AU name. Keys for action units the
/// classifier does not use are ignored on input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, f64>", into = "BTreeMap<String, f64>")]
pub struct ActionUnitSample {
    intensities: [f64; 9],
}

impl ActionUnitSample {
    pub fn new(intensities: [f64; 9]) -> Result<Self, SignalError> {
        for (au, value) in ActionUnit::ALL.iter().zip(intensities) {
            if !value.is_finite() || !(0.0..=AU_INTENSITY_MAX).contains(&value) {
                return Err(SignalError::Input(format!(
                    "{au} intensity {value} outside [0, {AU_INTENSITY_MAX}]"
                )));
            }
        }
        Ok(Self { intensities })
    }

    /// Every AU at zero intensity.
    pub fn neutral() -> Self {
        Self {
            intensities: [0.0; 9],
        }
    }

    /// Sets `active` AUs to `level` and every other AU to `rest`.
    pub fn with_active(active: &[ActionUnit], level: f64, rest: f64) -> Result<Self, SignalError> {
        let mut intensities = [rest; 9];
        for au in active {
            intensities[au.index()] = level;
        }
        Self::new(intensities)
    }

    pub fn get(&self, au: ActionUnit) -> f64 {
        self.intensities[au.index()]
    }

    pub fn intensities(&self) -> &[f64; 9] {
        &self.intensities
    }

    /// Multiplies every intensity by `factor`, saturating at 5.
    pub fn scaled(&self, factor: f64) -> Result<Self, SignalError> {
        let mut intensities = self.intensities;
        for value in &mut intensities {
            *value = (*value * factor).min(AU_INTENSITY_MAX);
        }
        Self::new(intensities)
    }
}

impl TryFrom<BTreeMap<String, f64>> for ActionUnitSample {
    type Error = SignalError;

    fn try_from(map: BTreeMap<String, f64>) -> Result<Self, Self::Error> {
        let mut intensities = [0.0; 9];
        for au in ActionUnit::ALL {
            intensities[au.index()] = *map
                .get(au.name())
                .ok_or_else(|| SignalError::Input(format!("missing action unit {au}")))?;
        }
        Self::new(intensities)
    }
}

impl From<ActionUnitSample> for BTreeMap<String, f64> {
    fn from(sample: ActionUnitSample) -> Self {
        ActionUnit::ALL
            .iter()
            .map(|au| (au.name().to_owned(), sample.get(*au)))
            .collect()
    }
}

/// Expression classes with their fixed integer codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExpressionLabel {
    Expressionless = 0,
    Surprise = 1,
    Sad = 2,
    Happy = 3,
}

impl ExpressionLabel {
    pub const ALL: [ExpressionLabel; 4] = [
        ExpressionLabel::Expressionless,
        ExpressionLabel::Surprise,
        ExpressionLabel::Sad,
        ExpressionLabel::Happy,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|label| label.code() == code)
    }

    /// The three characteristic action units, `None` for the neutral class.
    pub fn action_units(self) -> Option<[ActionUnit; 3]> {
        use ActionUnit::*;
        match self {
            ExpressionLabel::Expressionless => None,
            ExpressionLabel::Surprise => Some([AU01, AU02, AU25]),
            ExpressionLabel::Sad => Some([AU04, AU15, AU17]),
            ExpressionLabel::Happy => Some([AU06, AU07, AU12]),
        }
    }

    pub fn is_neutral(self) -> bool {
        self == ExpressionLabel::Expressionless
    }
}

impl fmt::Display for ExpressionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ExpressionLabel::Expressionless => "expressionless",
            ExpressionLabel::Surprise => "surprise",
            ExpressionLabel::Sad => "sad",
            ExpressionLabel::Happy => "happy",
        };
        f.write_str(name)
    }
}

/// Head position (meters, camera frame) and orientation (radians).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct HeadPose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub pitch: f64,
    pub yaw: f64,
    pub roll: f64,
}

impl HeadPose {
    pub fn validate(&self) -> Result<(), SignalError> {
        for (name, v) in [("x", self.x), ("y", self.y), ("z", self.z)] {
            if !v.is_finite() {
                return Err(SignalError::Input(format!("head {name} is not finite")));
            }
        }
        let pi = std::f64::consts::PI;
        for (name, v) in [
            ("pitch", self.pitch),
            ("yaw", self.yaw),
            ("roll", self.roll),
        ] {
            if !v.is_finite() || !(-pi..=pi).contains(&v) {
                return Err(SignalError::Input(format!(
                    "head {name} {v} outside [-pi, pi]"
                )));
            }
        }
        Ok(())
    }
}

/// Raw gaze angles as reported by the tracker. `v` is carried but unused by
/// the planner.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct GazeRaw {
    pub h: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HumanSignalFrame {
    pub t: f64,
    pub aus: ActionUnitSample,
    #[serde(default)]
    pub head: HeadPose,
    #[serde(default)]
    pub gaze: GazeRaw,
}

impl HumanSignalFrame {
    pub fn validate(&self) -> Result<(), SignalError> {
        if !self.t.is_finite() || self.t < 0.0 {
            return Err(SignalError::Input(format!(
                "frame time {} must be finite and non-negative",
                self.t
            )));
        }
        self.head.validate()?;
        if !self.gaze.h.is_finite() || !self.gaze.v.is_finite() {
            return Err(SignalError::Input("gaze angles must be finite".into()));
        }
        Ok(())
    }
}

/// Checks per-frame validity and strictly increasing timestamps.
pub fn validate_stream(frames: &[HumanSignalFrame]) -> Result<(), SignalError> {
    for (i, frame) in frames.iter().enumerate() {
        frame.validate().map_err(|e| SignalError::Stream {
            line: i + 1,
            message: e.to_string(),
        })?;
        if i > 0 && frame.t <= frames[i - 1].t {
            return Err(SignalError::Stream {
                line: i + 1,
                message: format!(
                    "time {} does not increase past {}",
                    frame.t,
                    frames[i - 1].t
                ),
            });
        }
    }
    Ok(())
}

/// Parses a JSON-lines signal stream. Blank lines are skipped.
pub fn parse_signal_stream(text: &str) -> Result<Vec<HumanSignalFrame>, SignalError> {
    let mut frames = Vec::new();
    let mut lines = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let frame: HumanSignalFrame =
            serde_json::from_str(line).map_err(|e| SignalError::Stream {
                line: i + 1,
                message: e.to_string(),
            })?;
        frames.push(frame);
        lines.push(i + 1);
    }
    validate_stream(&frames).map_err(|e| match e {
        SignalError::Stream { line, message } => SignalError::Stream {
            line: lines[line - 1],
            message,
        },
        other => other,
    })?;
    Ok(frames)
}
