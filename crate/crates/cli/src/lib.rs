//! Scenario evaluation, parameter sweeps and self-verification for the
//! `thermofringe` command.

pub mod grid;
pub mod scenario;
pub mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::json;
use thermofringe::checks::{run_verify, Level, VerifyReport};
use thermofringe::Error as CoreError;

pub use grid::{Grid, Param, Spacing};
pub use scenario::{ModelChoice, Scenario};
pub use table::{Cell, ClaimSummary, Output, Plan, Point, Table};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Parse, validation or I/O failure; nothing was evaluated.
pub const EXIT_INPUT: i32 = 1;
/// Evaluated, but some rows carry domain errors.
pub const EXIT_DOMAIN: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(CoreError),
    #[error("unknown parameter `{0}` (expected one of T, N, omega_p, chi, eta, omega, m)")]
    UnknownParameter(String),
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// One row per scenario temperature.
pub fn eval(scenario: &Scenario, override_regime: bool) -> Result<Table, CliError> {
    let points: Vec<Point> = scenario
        .temperatures
        .iter()
        .map(|&t| Point {
            spec: scenario.spec,
            temperature: t,
            varied: None,
        })
        .collect();
    table::build(&plan(scenario, override_regime, None), &points)
}

/// One row per grid value and scenario temperature, grid-major.
pub fn sweep(
    scenario: &Scenario,
    param: Param,
    grid: &Grid,
    override_regime: bool,
) -> Result<Table, CliError> {
    let values = grid.values()?;
    let points: Vec<Point> = match param {
        Param::Temperature => values
            .iter()
            .map(|&t| Point {
                spec: scenario.spec,
                temperature: t,
                varied: Some(t),
            })
            .collect(),
        p => values
            .iter()
            .flat_map(|&x| {
                scenario.temperatures.iter().map(move |&t| Point {
                    spec: p.apply(&scenario.spec, x),
                    temperature: t,
                    varied: Some(x),
                })
            })
            .collect(),
    };
    table::build(&plan(scenario, override_regime, Some(param)), &points)
}

fn plan(scenario: &Scenario, override_regime: bool, vary: Option<Param>) -> Plan {
    Plan {
        model: scenario.model,
        outputs: scenario.outputs.clone(),
        override_regime,
        claimed_delta_t: scenario.claimed_delta_t,
        vary,
    }
}

pub fn write_table<W: Write>(table: &Table, format: Format, w: W) -> Result<(), CliError> {
    match format {
        Format::Csv => table.write_csv(w),
        Format::Json => table.write_json(w),
    }
}

/// Writes `table` to `path` plus a `<path>.meta.json` sidecar describing the
/// run. The data file itself carries no run-specific metadata.
pub fn write_outputs(
    table: &Table,
    format: Format,
    path: &Path,
    command: &str,
    scenario: &Path,
) -> Result<PathBuf, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let file = File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    write_table(table, format, &mut w)?;
    w.flush().map_err(io)?;

    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".meta.json");
    let sidecar = PathBuf::from(sidecar);
    let generated = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = json!({
        "tool": "thermofringe",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "scenario": scenario.display().to_string(),
        "format": match format { Format::Csv => "csv", Format::Json => "json" },
        "columns": table.columns,
        "rows": table.rows.len(),
        "row_errors": table.row_errors,
        "generated_unix_s": generated,
    });
    let text = serde_json::to_string_pretty(&meta).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(&sidecar, text + "\n").map_err(io)?;
    Ok(sidecar)
}

pub fn exit_code(table: &Table) -> i32 {
    if table.row_errors > 0 {
        EXIT_DOMAIN
    } else {
        EXIT_OK
    }
}

/// Runs the self-check suite and prints one line per check.
pub fn verify<W: Write>(
    level: Level,
    tolerance_scale: f64,
    mut w: W,
) -> std::io::Result<VerifyReport> {
    let report = run_verify(level, tolerance_scale);
    for o in &report.outcomes {
        writeln!(
            w,
            "{} {:<28} deviation {:e} tolerance {:e} ({:.3} s) {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.deviation,
            o.tolerance,
            o.seconds,
            o.detail
        )?;
    }
    writeln!(
        w,
        "{} of {} checks passed",
        report.outcomes.len() - report.failures(),
        report.outcomes.len()
    )?;
    Ok(report)
}
