//! File formats: trajectory CSV, metrics JSON, comparison table CSV.
//!
//! Floats are written with 9 significant digits so repeated runs produce
//! byte-identical files.

use std::io::{self, Write};

use serde::Serialize;

use super::{Metrics, Outcome, Trajectory};
use crate::planner::PlannerMode;

pub const TRAJECTORY_HEADER: &str = "t,x,y,z,ox,oy,oz,step,speed,expr,a_h,mode";

pub const COMPARE_HEADER: &str =
    "mode,outcome,time_to_goal,path_length,min_clearance,sharp_turn_count,collided,mean_speed";

/// Formats `v` with 9 significant digits, plain notation for moderate
/// magnitudes and scientific otherwise. Trailing zeros are trimmed.
pub fn format_sig9(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".to_owned();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("exponent");
    if (-5..9).contains(&exponent) {
        let decimals = (8 - exponent).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exponent}", trim_zeros(mantissa.to_owned()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

/// Rounds to 9 significant digits, for JSON output.
pub fn round_sig9(v: f64) -> f64 {
    format_sig9(v).parse().unwrap_or(v)
}

pub fn write_trajectory<W: Write>(out: W, traj: &Trajectory) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER.split(','))?;
    for r in &traj.rows {
        let mut record: Vec<String> = [
            r.t,
            r.position.x,
            r.position.y,
            r.position.z,
            r.obstacle.x,
            r.obstacle.y,
            r.obstacle.z,
            r.step,
            r.speed,
        ]
        .iter()
        .map(|v| format_sig9(*v))
        .collect();
        record.push(r.expression.code().to_string());
        record.push(format_sig9(r.turn_angle));
        record.push(traj.mode.name().to_owned());
        w.write_record(&record)?;
    }
    w.flush()
}

#[derive(Serialize)]
struct MetricsRecord<'a> {
    mode: &'a str,
    outcome: Outcome,
    path_length: f64,
    min_clearance: f64,
    sharp_turn_count: usize,
    time_to_goal: Option<f64>,
    collided: bool,
    mean_speed: f64,
    dnf_reason: Option<&'a str>,
}

pub fn metrics_json(mode: PlannerMode, m: &Metrics) -> String {
    let record = MetricsRecord {
        mode: mode.name(),
        outcome: m.outcome,
        path_length: round_sig9(m.path_length),
        min_clearance: round_sig9(m.min_clearance),
        sharp_turn_count: m.sharp_turn_count,
        time_to_goal: m.time_to_goal.map(round_sig9),
        collided: m.collided,
        mean_speed: round_sig9(m.mean_speed),
        dnf_reason: m.dnf_reason.as_deref(),
    };
    let mut text = serde_json::to_string_pretty(&record).expect("metrics serialize");
    text.push('\n');
    text
}

pub fn write_compare_table<W: Write>(out: W, rows: &[(PlannerMode, Metrics)]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPARE_HEADER.split(','))?;
    for (mode, m) in rows {
        let outcome = serde_json::to_value(m.outcome)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        w.write_record([
            mode.name().to_owned(),
            outcome,
            m.time_to_goal.map(format_sig9).unwrap_or_default(),
            format_sig9(m.path_length),
            format_sig9(m.min_clearance),
            m.sharp_turn_count.to_string(),
            m.collided.to_string(),
            format_sig9(m.mean_speed),
        ])?;
    }
    w.flush()
}
