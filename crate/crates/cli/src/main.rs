use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde_json::json;
use ultramani_cli::{exit_code, parse_document, report, Command, Flags};
use ultramani_core::ErrorClass;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Spectrum,
    Split,
    Norm,
    Chart,
    Stable,
    Unstable,
    Classify,
    Orbit,
    Member,
    Verify,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Split => Command::Split,
            Cmd::Norm => Command::Norm,
            Cmd::Chart => Command::Chart,
            Cmd::Stable => Command::Stable,
            Cmd::Unstable => Command::Unstable,
            Cmd::Classify => Command::Classify,
            Cmd::Orbit => Command::Orbit,
            Cmd::Member => Command::Member,
            Cmd::Verify => Command::Verify,
        }
    }
}

/// Invariant manifolds of analytic maps over Q_p and F_p((t)).
///
/// Exit codes: 0 success, 1 input error, 2 failed mathematical
/// precondition, 3 insufficient precision.
#[derive(Parser, Debug)]
#[command(name = "ultramani", version)]
struct Cli {
    command: Cmd,
    /// System document (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Threshold a = p^{-EXP}, e.g. `1/2`.
    #[arg(long, value_name = "EXP", allow_hyphen_values = true)]
    a: Option<String>,
    /// Membership rate b = p^{-EXP}.
    #[arg(long, value_name = "EXP", allow_hyphen_values = true)]
    b: Option<String>,
    /// Truncation degree of charts (default 8).
    #[arg(long)]
    degree: Option<u32>,
    /// Working precision in digits (default: the document's).
    #[arg(long)]
    precision: Option<i64>,
    /// Orbit and membership step budget (default 200).
    #[arg(long)]
    budget: Option<usize>,
    /// Manifold kind: centre-stable, stable, centre or unstable.
    #[arg(long)]
    kind: Option<String>,
    /// A point as a JSON array of scalars.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Number of sample points when no point is given.
    #[arg(long)]
    samples: Option<usize>,
    /// Chart report to check (`verify`).
    #[arg(long)]
    chart: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Add wall-clock timings; the report is then no longer reproducible.
    #[arg(long)]
    timings: bool,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(exit_code(ErrorClass::Input) as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    if let Ok(n) = std::env::var("ULTRAMANI_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    return fail(e);
                }
            }
            _ => return fail(format!("ULTRAMANI_THREADS must be a positive integer, got {n:?}")),
        }
    }
    let text = match std::fs::read_to_string(&cli.input) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", cli.input.display())),
    };
    let doc = match parse_document(&text, cli.precision) {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    let chart = match &cli.chart {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => Some(t),
            Err(e) => return fail(format!("{}: {e}", p.display())),
        },
        None => None,
    };
    let flags = Flags {
        a: cli.a,
        b: cli.b,
        degree: cli.degree,
        budget: cli.budget,
        kind: cli.kind,
        point: cli.point,
        samples: cli.samples,
        chart,
    };
    let (mut rep, code) = match report(cli.command.into(), &doc, &flags) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if cli.timings {
        rep["timings"] = json!({ "total_ms": start.elapsed().as_secs_f64() * 1e3 });
    }
    let mut out = serde_json::to_string_pretty(&rep).expect("report serializes");
    out.push('\n');
    let written = match &cli.output {
        Some(p) => std::fs::write(p, out),
        None => {
            print!("{out}");
            Ok(())
        }
    };
    if let Err(e) = written {
        return fail(e);
    }
    ExitCode::from(code as u8)
}
