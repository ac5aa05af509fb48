//! Front end for the `verify` binary.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use dynrefl::scenarios::{builtin_scenario, Overrides, Scenario, BUILTINS, SUITES};
use dynrefl::{run_suites, Report, RunOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Parser)]
#[command(
    name = "verify",
    about = "Residual checks for semi-dynamical reflection algebra data"
)]
pub struct Args {
    /// Scenario file to load.
    #[arg(long, value_name = "PATH", conflicts_with = "builtin")]
    pub scenario: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long, value_name = "NAME")]
    pub builtin: Option<String>,
    /// Rank of a built-in scenario (2 or 3).
    #[arg(long, value_name = "INT", requires = "builtin")]
    pub rank: Option<usize>,
    /// Suite to run; repeatable. Defaults to the scenario's own list, or `all`.
    #[arg(long = "suite", value_name = "NAME")]
    pub suites: Vec<String>,
    #[arg(long, value_name = "INT")]
    pub samples: Option<usize>,
    #[arg(long, value_name = "INT")]
    pub seed: Option<u64>,
    /// Overrides both the shallow and the deep tolerance.
    #[arg(long, value_name = "FLOAT")]
    pub tol: Option<f64>,
    #[arg(long, value_name = "INT")]
    pub sites: Option<usize>,
    /// Write the structured report here.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Format of the summary printed to stdout.
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Record wall-clock runtime in the report.
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub list_builtins: bool,
    #[arg(long)]
    pub list_suites: bool,
}

fn load(args: &Args) -> Result<Scenario, String> {
    match (&args.scenario, &args.builtin) {
        (Some(path), None) => Scenario::load(path).map_err(|e| e.to_string()),
        (None, Some(name)) => builtin_scenario(
            name,
            &Overrides {
                rank: args.rank,
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string()),
        _ => Err("exactly one of --scenario or --builtin is required".into()),
    }
}

/// Writes a report document to `path`.
pub fn write_report(report: &Report, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, report.to_json())
}

fn execute(args: &Args, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if args.list_builtins || args.list_suites {
        if args.list_builtins {
            for b in BUILTINS {
                let _ = writeln!(out, "{b}");
            }
        }
        if args.list_suites {
            let _ = writeln!(out, "all");
            for s in SUITES {
                let _ = writeln!(out, "{s}");
            }
        }
        return EXIT_PASS;
    }
    let scenario = match load(args) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let suites = if !args.suites.is_empty() {
        args.suites.clone()
    } else if !scenario.suites.is_empty() {
        scenario.suites.clone()
    } else {
        vec!["all".to_string()]
    };
    let opts = RunOptions {
        samples: args.samples,
        seed: args.seed,
        tolerance: args.tol,
        sites: args.sites,
    };
    let started = Instant::now();
    let result = scenario
        .assemble()
        .and_then(|inst| run_suites(&inst, &suites, &opts));
    let mut report = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    if args.timing {
        report.runtime_ms = Some(started.elapsed().as_millis() as u64);
    }
    if let Some(path) = &args.report {
        if let Err(e) = write_report(&report, path) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return EXIT_CONFIG;
        }
    }
    let _ = match args.format {
        Format::Text => write!(out, "{}", report.to_text()),
        Format::Structured => write!(out, "{}", report.to_json()),
    };
    if report.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Runs with explicit output streams; `argv[0]` is the program name.
pub fn run_with(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match Args::try_parse_from(argv) {
        Ok(args) => execute(&args, out, err),
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                EXIT_PASS
            } else {
                let _ = write!(err, "{e}");
                EXIT_CONFIG
            }
        }
    }
}

pub fn run(argv: Vec<String>) -> i32 {
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}
