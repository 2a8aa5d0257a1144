use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::SignalError;

/// Head yaw below which the gaze angle stands in for the head angle (22°).
pub const DEFAULT_HEAD_GATE: f64 = 22.0 * std::f64::consts::PI / 180.0;

/// Angle bins of the turn calibration table, degrees.
pub const TURN_SCALES_DEG: [f64; 9] = [5.0, 15.0, 25.0, 35.0, 45.0, 55.0, 65.0, 75.0, 85.0];

/// Maps a raw tracker reading onto a turn angle: `center` reads as 0 and
/// `center ± max_abs` as ±π/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleCalibration {
    pub center: f64,
    pub max_abs: f64,
}

impl Default for AngleCalibration {
    /// Identity mapping for trackers that already report radians.
    fn default() -> Self {
        Self {
            center: 0.0,
            max_abs: FRAC_PI_2,
        }
    }
}

impl AngleCalibration {
    pub fn validate(&self) -> Result<(), SignalError> {
        if !self.center.is_finite() {
            return Err(SignalError::Calibration("center must be finite".into()));
        }
        if !(self.max_abs.is_finite() && self.max_abs > 0.0) {
            return Err(SignalError::Calibration(format!(
                "max_abs must be > 0, got {}",
                self.max_abs
            )));
        }
        Ok(())
    }
}

pub fn raw_to_angle(raw: f64, cal: &AngleCalibration) -> Result<f64, SignalError> {
    if !raw.is_finite() {
        return Err(SignalError::Input(format!("raw angle {raw} is not finite")));
    }
    cal.validate()?;
    Ok((raw - cal.center) / cal.max_abs * FRAC_PI_2)
}

/// Picks the signal that carries the turn: the gaze while the head stays
/// inside `head_gate`, the head yaw once it leaves it.
pub fn effective_turn_angle(head_yaw: f64, gaze_h: f64, head_gate: f64) -> f64 {
    if head_yaw.abs() < head_gate {
        gaze_h
    } else {
        head_yaw
    }
}

/// Arm displacement per angle bin, averaged over volunteers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurnTable {
    /// Distance in meters per entry of [`TURN_SCALES_DEG`]; `None` when no
    /// volunteer produced a sample near that angle.
    pub values: [Option<f64>; 9],
}

impl TurnTable {
    pub fn rows(&self) -> impl Iterator<Item = (f64, Option<f64>)> + '_ {
        TURN_SCALES_DEG
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    /// Present bins as `(angle radians, distance meters)`.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.rows()
            .filter_map(|(deg, v)| v.map(|d| (deg.to_radians(), d)))
            .collect()
    }

    pub fn get(&self, scale_deg: f64) -> Option<f64> {
        self.rows()
            .find(|(d, _)| *d == scale_deg)
            .and_then(|(_, v)| v)
    }
}

fn nearest_scale(angle_deg: f64) -> usize {
    // Midpoints between bins resolve upward.
    (((angle_deg - 5.0) / 10.0).round() as i64).clamp(0, 8) as usize
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Bins `(angle degrees, distance meters)` samples per volunteer, takes the
/// per-bin median for each volunteer, then averages across volunteers.
pub fn bin_turn_samples(volunteers: &[Vec<(f64, f64)>]) -> Result<TurnTable, SignalError> {
    if volunteers.iter().all(|v| v.is_empty()) {
        return Err(SignalError::Calibration("no turn samples".into()));
    }
    let mut sums = [0.0; 9];
    let mut counts = [0usize; 9];
    for (vi, samples) in volunteers.iter().enumerate() {
        let mut bins: [Vec<f64>; 9] = Default::default();
        for &(angle, distance) in samples {
            if !(angle.is_finite() && angle > 0.0 && angle < 90.0) {
                return Err(SignalError::Calibration(format!(
                    "volunteer {vi}: angle {angle} deg outside (0, 90)"
                )));
            }
            if !(distance.is_finite() && distance >= 0.0) {
                return Err(SignalError::Calibration(format!(
                    "volunteer {vi}: distance {distance} must be finite and non-negative"
                )));
            }
            bins[nearest_scale(angle)].push(distance);
        }
        for (i, bin) in bins.iter_mut().enumerate() {
            if !bin.is_empty() {
                sums[i] += median(bin);
                counts[i] += 1;
            }
        }
    }
    let mut values = [None; 9];
    for i in 0..9 {
        if counts[i] > 0 {
            values[i] = Some(sums[i] / counts[i] as f64);
        }
    }
    Ok(TurnTable { values })
}

/// Line `distance = alpha + beta * angle`, angle in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurnRegression {
    pub alpha: f64,
    pub beta: f64,
}

impl TurnRegression {
    pub fn evaluate(&self, angle: f64) -> f64 {
        self.alpha + self.beta * angle
    }

    /// Sum of squared residuals over `points`.
    pub fn sse(&self, points: &[(f64, f64)]) -> f64 {
        points
            .iter()
            .map(|&(x, y)| {
                let r = y - self.evaluate(x);
                r * r
            })
            .sum()
    }

    /// Closed-form least squares on `(x, y)` pairs.
    pub fn fit(points: &[(f64, f64)]) -> Result<Self, SignalError> {
        if points.len() < 2 {
            return Err(SignalError::Fit(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(SignalError::Fit("non-finite point".into()));
        }
        let n = points.len() as f64;
        let x_mean = points.iter().map(|p| p.0).sum::<f64>() / n;
        let y_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
        let (mut sxx, mut sxy) = (0.0, 0.0);
        for &(x, y) in points {
            let dx = x - x_mean;
            sxx += dx * dx;
            sxy += dx * (y - y_mean);
        }
        if sxx == 0.0 {
            return Err(SignalError::Fit("all angles identical".into()));
        }
        let beta = sxy / sxx;
        Ok(Self {
            alpha: y_mean - beta * x_mean,
            beta,
        })
    }
}

pub fn fit_turn_regression(table: &TurnTable) -> Result<TurnRegression, SignalError> {
    TurnRegression::fit(&table.points())
}

/// Expected arm displacement for a turn, never negative.
pub fn predict_arm_distance(angle: f64, reg: &TurnRegression) -> f64 {
    reg.evaluate(angle).max(0.0)
}
