//! `nhspec run <config>` executes one scenario and writes its report.
//!
//! Exit codes: 0 all checks pass, 1 a check failed (the report is still
//! written), 2 the config is invalid, 3 the output path is unwritable.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nhspec::report::{emit_report, run_scenario, ReportError, ReportFormat, Scenario, ScenarioConfig};

const DEFAULT_OUT: &str = "nhspec-out";

#[derive(Parser)]
#[command(name = "nhspec", version, about = "Run non-Hermitian spectral verification scenarios")]
struct Cli {
    /// Print the available scenarios and exit.
    #[arg(long)]
    list_scenarios: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file (JSON or `key = value` lines).
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed; overrides the config value.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the report as `report.csv`.
        #[arg(long)]
        csv: bool,
    },
}

enum Failure {
    Checks,
    Numeric(String),
    Config(String),
    Io(String),
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Config(_) => Failure::Config(e.to_string()),
            ReportError::Io { .. } => Failure::Io(e.to_string()),
            ReportError::Numeric(_) => Failure::Numeric(e.to_string()),
        }
    }
}

fn run(config: PathBuf, out: Option<PathBuf>, seed: Option<u64>, csv: bool) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&config).map_err(|e| Failure::Config(format!("{}: {e}", config.display())))?;
    let mut cfg = ScenarioConfig::parse_unvalidated(&text)?;
    if seed.is_some() {
        cfg.seed = seed;
    }
    cfg.validate()?;
    let dir = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));

    let output = run_scenario(&cfg)?;
    let mut written = output.write_to(&dir)?;
    if csv {
        let p = dir.join("report.csv");
        emit_report(&output.report, ReportFormat::Csv, &p)?;
        written.push(p);
    }

    let r = &output.report;
    println!("{} {}", r.scenario, if r.pass { "PASS" } else { "FAIL" });
    for c in r.failing() {
        println!("  {} = {} (tol {})", c.name, c.value, c.tol);
    }
    for p in &written {
        println!("wrote {}", p.display());
    }
    if r.pass {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_scenarios {
        for s in Scenario::ALL {
            println!("{:<14} {}", s.name(), s.summary());
        }
        return ExitCode::SUCCESS;
    }
    let Some(Command::Run { config, out, seed, csv }) = cli.command else {
        eprintln!("nothing to do; try `nhspec run <config>` or `nhspec --list-scenarios`");
        return ExitCode::from(2);
    };
    match run(config, out, seed, csv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
