//! `delay-margin`: batch front-end reading JSON problem files and writing JSON
//! reports.
//!
//! Exit status: 0 on success, 2 when the result carries degenerate crossings,
//! 1 on any error.

mod commands;
mod problem;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{Flags, Outcome};
use problem::{Diagnostic, Kind, ProblemFile};

#[derive(Parser)]
#[command(
    name = "delay-margin",
    version,
    about = "Delay margins of operator-valued retarded delay systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stability windows and delay margin over the spectrum.
    Margin(RunArgs),
    /// Boundary H∞-norm certificate at the delay `system.h`.
    Hinf(RunArgs),
    /// Isometry and multiplier checks in a weighted space.
    ZenVerify(RunArgs),
    /// |G| along the imaginary axis for a neutral system.
    NeutralDemo(RunArgs),
    /// Boundary sup for truncations of an unbounded operator.
    UnboundedDemo(RunArgs),
    /// Schema and pre-flight checks only.
    Validate(ValidateArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Problem file (JSON).
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Directory for events.csv / norm_grid.csv.
    #[arg(long, value_name = "DIR")]
    csv: Option<PathBuf>,
    /// Overrides the tolerance of the selected computation.
    #[arg(long)]
    tol: Option<f64>,
    /// Overrides `system.h_max`.
    #[arg(long)]
    h_max: Option<f64>,
    /// Seed for randomized kernel samples.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(clap::Args)]
struct ValidateArgs {
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn configure_threads() {
    let Ok(v) = std::env::var("DELAY_MARGIN_THREADS") else {
        return;
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
            {
                eprintln!("warning: DELAY_MARGIN_THREADS ignored: {e}");
            }
        }
        _ => eprintln!("warning: DELAY_MARGIN_THREADS must be a positive integer, got `{v}`"),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &PathBuf) -> Result<ProblemFile, Vec<Diagnostic>> {
    let text = fs::read_to_string(path).map_err(|e| {
        vec![Diagnostic {
            path: String::new(),
            code: "io".into(),
            message: format!("cannot read {}: {e}", path.display()),
        }]
    })?;
    problem::parse(&text).map_err(|d| vec![d])
}

fn report_errors(diags: &[Diagnostic]) -> ExitCode {
    for d in diags {
        eprintln!("error: {d}");
    }
    ExitCode::from(1)
}

fn run(kind: Kind, args: RunArgs) -> ExitCode {
    let problem = match &args.input {
        Some(path) => match load(path) {
            Ok(p) => p,
            Err(d) => return report_errors(&d),
        },
        None if matches!(kind, Kind::NeutralDemo | Kind::UnboundedDemo) => ProblemFile {
            kind,
            system: None,
            margin: Default::default(),
            grid: Default::default(),
            zen: None,
            n_max: None,
        },
        None => {
            return report_errors(&[diag(
                "",
                "io",
                format!("`{}` needs --in <PATH>", kind.name()),
            )])
        }
    };
    if problem.kind != kind {
        let msg = format!(
            "file is a `{}` problem but `{}` was requested",
            problem.kind.name(),
            kind.name()
        );
        return report_errors(&[diag("kind", "schema", msg)]);
    }
    let diags = problem::preflight(&problem);
    if !diags.is_empty() {
        return report_errors(&diags);
    }
    let flags = Flags {
        tol: args.tol,
        h_max: args.h_max,
        seed: args.seed,
    };
    let Outcome {
        report,
        tables,
        degenerate,
    } = match commands::run(kind, &problem, flags) {
        Ok(o) => o,
        Err(d) => return report_errors(&d),
    };
    if let Some(dir) = &args.csv {
        if let Err(e) = tables.write(dir) {
            return report_errors(&[diag("", "io", e)]);
        }
    }
    if let Err(e) = emit(&report.to_text(), args.out.as_ref()) {
        return report_errors(&[diag("", "io", e)]);
    }
    ExitCode::from(if degenerate { 2 } else { 0 })
}

fn diag(path: &str, code: &str, message: String) -> Diagnostic {
    Diagnostic {
        path: path.into(),
        code: code.into(),
        message,
    }
}

fn validate(args: ValidateArgs) -> ExitCode {
    let diags = match load(&args.input) {
        Ok(p) => problem::preflight(&p),
        Err(d) => d,
    };
    let mut text =
        serde_json::to_string_pretty(&json!({ "valid": diags.is_empty(), "diagnostics": diags }))
            .expect("diagnostics serialize");
    text.push('\n');
    if let Err(e) = emit(&text, args.out.as_ref()) {
        return report_errors(&[diag("", "io", e)]);
    }
    ExitCode::from(if diags.is_empty() { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // exit 2 is reserved for degenerate results
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    configure_threads();
    match cli.command {
        Command::Margin(a) => run(Kind::Margin, a),
        Command::Hinf(a) => run(Kind::Hinf, a),
        Command::ZenVerify(a) => run(Kind::ZenVerify, a),
        Command::NeutralDemo(a) => run(Kind::NeutralDemo, a),
        Command::UnboundedDemo(a) => run(Kind::UnboundedDemo, a),
        Command::Validate(a) => validate(a),
    }
}
