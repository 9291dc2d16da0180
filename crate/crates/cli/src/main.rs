use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orbitlab::battery::run_battery;
use orbitlab::exit;
use orbitlab::report::run_scenario;
use orbitlab::scenario::{Scenario, ScenarioError};
use orbitlab_core::poly::parse_expression;

#[derive(Parser)]
#[command(
    name = "orbitlab",
    version,
    about = "Orbit, height and dynamical-degree experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write report.json plus CSV traces.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the built-in example battery.
    Battery {
        /// Also write battery.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse an expression and print its canonical form.
    ParseCheck {
        expr: String,
        #[arg(long, value_delimiter = ',', required = true)]
        vars: Vec<String>,
    },
}

fn fail(kind: &str, msg: impl std::fmt::Display, code: i32) -> ExitCode {
    eprintln!("error[{kind}]: {msg}");
    ExitCode::from(code as u8)
}

fn run(scenario: PathBuf, out: PathBuf, workers: Option<usize>) -> ExitCode {
    let validated = match Scenario::load(&scenario).and_then(Scenario::validate) {
        Ok(v) => v,
        Err(e @ ScenarioError::Io(_)) => return fail("io", e, exit::FAILURE),
        Err(e) => return fail("validation", e, exit::VALIDATION),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    match workers {
        Some(0) => return fail("validation", "workers must be positive", exit::VALIDATION),
        Some(n) => pool = pool.num_threads(n),
        None => {}
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return fail("internal", e, exit::FAILURE),
    };
    let output = pool.install(|| run_scenario(&validated));
    if let Err(e) = output.write(&out) {
        return fail("io", format!("{}: {e}", out.display()), exit::FAILURE);
    }
    for f in &output.report.flags {
        eprintln!("{f}");
    }
    if output.report.has_contradiction() {
        return ExitCode::from(exit::CONTRADICTION as u8);
    }
    ExitCode::SUCCESS
}

fn battery(out: Option<PathBuf>) -> ExitCode {
    let report = run_battery();
    print!("{}", report.table());
    if let Some(dir) = out {
        let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
        json.push('\n');
        let written = std::fs::create_dir_all(&dir)
            .and_then(|_| std::fs::write(dir.join("battery.json"), json));
        if let Err(e) = written {
            return fail("io", format!("{}: {e}", dir.display()), exit::FAILURE);
        }
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(exit::FAILURE as u8)
    }
}

fn parse_check(expr: &str, vars: &[String]) -> ExitCode {
    match parse_expression(expr, vars) {
        Ok(p) => {
            println!("{}", p.into_rational().to_expr_string(vars));
            ExitCode::SUCCESS
        }
        Err(e) => fail("parse", e, exit::VALIDATION),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenario,
            out,
            workers,
        } => run(scenario, out, workers),
        Command::Battery { out } => battery(out),
        Command::ParseCheck { expr, vars } => parse_check(&expr, &vars),
    }
}
