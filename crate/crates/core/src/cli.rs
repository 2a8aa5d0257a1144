//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on input or usage errors, 2 when a run ends
//! without reaching the goal (collision, timeout or local minimum).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::human_signal::{bin_turn_samples, fit_turn_regression, TurnTable};
use crate::planner::PlannerMode;
use crate::sim::{self, load_scenario, output, Metrics, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DNF: i32 = 2;

const EXIT_CODES_HELP: &str = "Exit codes:
  0  success
  1  input or usage error (unreadable scenario, bad flag, invalid config)
  2  a planner run ended in collision, timeout or local minimum";

#[derive(Debug, Parser)]
#[command(
    name = "psdapf",
    version,
    about = "Human-aware potential-field planner: scenario runs, mode comparison, turn calibration",
    after_help = EXIT_CODES_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run planner modes on a scenario and write trajectory CSV and metrics JSON per mode.
    #[command(after_help = EXIT_CODES_HELP)]
    Run(RunArgs),
    /// Run several modes on the same scenario and write a side-by-side metrics table.
    #[command(after_help = EXIT_CODES_HELP)]
    Compare(CompareArgs),
    /// Fit the turn-angle to arm-displacement regression from volunteer samples.
    #[command(after_help = EXIT_CODES_HELP)]
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// JSON file layered over the scenario's config block.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Accepted for interface stability; runs are deterministic and ignore it.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Planner mode (apf, sdapf, psdapf); a comma-separated list runs each.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_mode)]
    planner: Vec<PlannerMode>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated planner modes.
    #[arg(long, value_delimiter = ',', default_value = "sdapf,psdapf", value_parser = parse_mode)]
    planners: Vec<PlannerMode>,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// CSV with columns volunteer,angle_deg,distance_m.
    #[arg(long)]
    input: PathBuf,
    /// Output JSON path.
    #[arg(long, default_value = "calibration.json")]
    out: PathBuf,
}

fn parse_mode(s: &str) -> Result<PlannerMode, String> {
    s.parse()
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => {
                    if !e.render().to_string().contains("Usage:") {
                        eprintln!("\n{}", Cli::command().render_usage());
                    }
                    EXIT_INPUT
                }
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::Calibrate(args) => cmd_calibrate(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT
        }
    }
}

fn prepare(common: &Common) -> Result<Scenario> {
    let scenario = load_scenario(&common.scenario)
        .with_context(|| format!("loading scenario {}", common.scenario.display()))?;
    let scenario = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let overrides: Value = serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?;
            scenario
                .with_overrides(&overrides)
                .with_context(|| format!("applying config {}", path.display()))?
        }
        None => scenario,
    };
    fs::create_dir_all(&common.out)
        .with_context(|| format!("creating output directory {}", common.out.display()))?;
    Ok(scenario)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Runs one mode and writes `<mode>.csv` and `<mode>.metrics.json`.
fn run_and_write(scenario: &Scenario, mode: PlannerMode, out: &Path) -> Result<Metrics> {
    let (traj, metrics) =
        sim::run(scenario, mode).with_context(|| format!("running {}", mode.name()))?;
    let mut csv = Vec::new();
    output::write_trajectory(&mut csv, &traj)?;
    write_file(&out.join(format!("{}.csv", mode.name())), &csv)?;
    write_file(
        &out.join(format!("{}.metrics.json", mode.name())),
        output::metrics_json(mode, &metrics).as_bytes(),
    )?;
    Ok(metrics)
}

fn summary_line(mode: PlannerMode, m: &Metrics) -> String {
    match (m.time_to_goal, &m.dnf_reason) {
        (Some(t), _) => format!(
            "{}: reached in {} s, path {} m, min clearance {} m, sharp turns {}",
            mode.name(),
            output::format_sig9(t),
            output::format_sig9(m.path_length),
            output::format_sig9(m.min_clearance),
            m.sharp_turn_count
        ),
        (None, reason) => format!(
            "{}: did not finish ({}), min clearance {} m",
            mode.name(),
            reason.as_deref().unwrap_or("unknown"),
            output::format_sig9(m.min_clearance)
        ),
    }
}

fn unique(modes: &[PlannerMode]) -> Vec<PlannerMode> {
    let mut out = Vec::new();
    for &m in modes {
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

fn cmd_run(args: &RunArgs) -> Result<i32> {
    let scenario = prepare(&args.common)?;
    let mut code = EXIT_OK;
    for mode in unique(&args.planner) {
        let metrics = run_and_write(&scenario, mode, &args.common.out)?;
        println!("{}", summary_line(mode, &metrics));
        if !metrics.reached() {
            code = EXIT_DNF;
        }
    }
    Ok(code)
}

fn cmd_compare(args: &CompareArgs) -> Result<i32> {
    let modes = unique(&args.planners);
    if modes.is_empty() {
        bail!("--planners needs at least one mode");
    }
    let scenario = prepare(&args.common)?;
    let mut rows = Vec::new();
    for mode in modes {
        let metrics = run_and_write(&scenario, mode, &args.common.out)?;
        println!("{}", summary_line(mode, &metrics));
        rows.push((mode, metrics));
    }
    let mut table = Vec::new();
    output::write_compare_table(&mut table, &rows)?;
    write_file(&args.common.out.join("compare.csv"), &table)?;
    let code = if rows.iter().all(|(_, m)| m.reached()) {
        EXIT_OK
    } else {
        EXIT_DNF
    };
    Ok(code)
}

#[derive(Debug, Deserialize)]
struct SampleRecord {
    volunteer: String,
    angle_deg: f64,
    distance_m: f64,
}

#[derive(Debug, Serialize)]
struct TableEntry {
    angle_deg: f64,
    distance_m: Option<f64>,
}

#[derive(Debug, Serialize)]
struct CalibrationReport {
    table: Vec<TableEntry>,
    alpha: f64,
    beta: f64,
    /// Sum of squared residuals of the fit over the table, meters squared.
    residual: f64,
}

/// Reads `volunteer,angle_deg,distance_m` rows grouped by volunteer id.
pub fn read_turn_samples<R: std::io::Read>(reader: R) -> Result<Vec<Vec<(f64, f64)>>> {
    let mut by_volunteer: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    for (i, record) in rdr.deserialize::<SampleRecord>().enumerate() {
        let r = record.with_context(|| format!("calibration row {}", i + 1))?;
        by_volunteer
            .entry(r.volunteer)
            .or_default()
            .push((r.angle_deg, r.distance_m));
    }
    Ok(by_volunteer.into_values().collect())
}

fn calibration_report(table: &TurnTable) -> Result<CalibrationReport> {
    let points = table.points();
    if points.len() < 2 {
        bail!(
            "calibration needs samples in at least 2 angle scales, found {}",
            points.len()
        );
    }
    let reg = fit_turn_regression(table)?;
    Ok(CalibrationReport {
        table: table
            .rows()
            .map(|(deg, v)| TableEntry {
                angle_deg: deg,
                distance_m: v,
            })
            .collect(),
        alpha: reg.alpha,
        beta: reg.beta,
        residual: reg.sse(&points),
    })
}

fn cmd_calibrate(args: &CalibrateArgs) -> Result<i32> {
    let file =
        fs::File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let samples = read_turn_samples(file)?;
    let table = bin_turn_samples(&samples)?;
    let report = calibration_report(&table)?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    write_file(&args.out, text.as_bytes())?;
    let mut stdout = std::io::stdout().lock();
    writeln!(
        stdout,
        "alpha = {}, beta = {} m/rad, residual = {}",
        report.alpha, report.beta, report.residual
    )?;
    Ok(EXIT_OK)
}
