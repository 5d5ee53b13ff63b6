use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thermofringe::checks::Level;
use thermofringe_cli::{
    eval, exit_code, scenario, sweep, verify, write_outputs, write_table, CliError, Format, Grid,
    Param, Table, EXIT_INPUT,
};

#[derive(Parser)]
#[command(
    name = "thermofringe",
    version,
    about = "Interferometric thermometry of a thermal mirror"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioFormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Evaluate approximate models outside their regime.
    #[arg(long)]
    override_regime: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario at each of its temperatures.
    Eval {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Vary one parameter over a grid.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// One of T, N, omega_p, chi, eta, omega, m.
        #[arg(long)]
        vary: String,
        /// `log:start:stop:points`, `lin:start:stop:points` or `v1,v2,...`.
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the self-check suite.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: LevelArg,
        #[arg(long, default_value_t = 1.0, hide = true)]
        tolerance_scale: f64,
    },
    /// Print the normalised scenario.
    ScenarioPrint {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: ScenarioFormatArg,
    },
}

fn format(f: FormatArg) -> Format {
    match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    }
}

fn emit(
    table: &Table,
    out: &OutputArgs,
    command: &str,
    scenario: &std::path::Path,
) -> Result<i32, CliError> {
    let fmt = format(out.format);
    match &out.output {
        Some(path) => {
            write_outputs(table, fmt, path, command, scenario)?;
        }
        None => write_table(table, fmt, io::stdout().lock())?,
    }
    let mut err = io::stderr().lock();
    for s in &table.summaries {
        let _ = writeln!(err, "{s}");
    }
    if table.row_errors > 0 {
        let _ = writeln!(
            err,
            "{} of {} rows carry domain errors",
            table.row_errors,
            table.rows.len()
        );
    }
    Ok(exit_code(table))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Eval {
            scenario: path,
            out,
        } => {
            let s = scenario::load(&path)?;
            let table = eval(&s, out.override_regime)?;
            emit(&table, &out, "eval", &path)
        }
        Command::Sweep {
            scenario: path,
            vary,
            grid,
            out,
        } => {
            let param: Param = vary.parse()?;
            let grid: Grid = grid.parse()?;
            let s = scenario::load(&path)?;
            let table = sweep(&s, param, &grid, out.override_regime)?;
            emit(&table, &out, "sweep", &path)
        }
        Command::Verify {
            level,
            tolerance_scale,
        } => {
            let level = match level {
                LevelArg::Fast => Level::Fast,
                LevelArg::Full => Level::Full,
            };
            let report = verify(level, tolerance_scale, io::stdout().lock())
                .map_err(|e| CliError::Io(e.to_string()))?;
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::ScenarioPrint {
            scenario: path,
            format: f,
        } => {
            let s = scenario::load(&path)?;
            thermofringe::validate(&s.spec).map_err(CliError::Validation)?;
            let text = scenario::render(&s.file, matches!(f, ScenarioFormatArg::Json))?;
            print!("{text}");
            Ok(0)
        }
    }
}

/// Exit status of one invocation; usage errors exit through clap.
fn status<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(status(std::env::args_os()) as u8)
}
