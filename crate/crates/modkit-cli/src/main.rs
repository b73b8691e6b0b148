//! `modkit` command-line front end. Every subcommand prints one JSON report
//! (or CSV for the sweep-style commands) on stdout.

mod cmd;
mod parse;
mod report;

use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};
use modkit::Exec;
use report::Output;
use std::process::ExitCode;
use std::time::Instant;

const EXIT_DOMAIN: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "modkit", version, about = "Automorphic-form computations over Q and real quadratic fields")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Options shared by every subcommand.
#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    /// squarefree D selecting Q(√D); 1 is Q
    #[arg(long, global = true, default_value_t = 1)]
    pub field: i64,
    /// quadrature / series tolerance
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// enumeration bound (norm, height or prime bound, per command)
    #[arg(long, global = true)]
    pub bound: Option<f64>,
    /// seed for synthetic eigenvalue systems
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// worker threads; 1 forces the sequential path, 0 uses every core
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, alias = "out")]
    pub format: Option<Format>,
    /// report elapsed_ms as null so the output is byte-identical across runs
    #[arg(long, global = true)]
    pub no_timing: bool,
}

impl RunConfig {
    pub fn exec(&self) -> Exec {
        if self.jobs == 1 {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn bound_or(&self, default: f64) -> f64 {
        self.bound.unwrap_or(default)
    }

    fn validate(&self) -> modkit::Result<()> {
        if self.tol.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
            return Err(modkit::Error::Domain("--tol must be positive".into()));
        }
        if self.bound.is_some_and(|b| !(b > 0.0 && b.is_finite())) {
            return Err(modkit::Error::Domain("--bound must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Field and ideal data
    #[command(subcommand)]
    Field(cmd::field::FieldCmd),
    /// Finite and Hecke characters
    #[command(subcommand)]
    Chars(cmd::chars::CharsCmd),
    /// Normalized Whittaker functions
    #[command(subcommand)]
    Whittaker(cmd::whittaker::WhittakerCmd),
    /// Kloosterman sums and Weil margins
    Kloosterman(cmd::kloosterman::KloostermanArgs),
    /// Eisenstein local data, coefficients and constant terms
    #[command(subcommand)]
    Eisen(cmd::eisen::EisenCmd),
    /// Oldform bases, Bessel transforms, Kuznetsov geometric side
    #[command(subcommand)]
    Spectral(cmd::spectral::SpectralCmd),
    /// Shifted convolution sums, Dirichlet series, amplified moments
    #[command(subcommand)]
    Shifted(cmd::shifted::ShiftedCmd),
}

impl Command {
    fn name(&self) -> String {
        match self {
            Command::Field(c) => format!("field {}", c.name()),
            Command::Chars(c) => format!("chars {}", c.name()),
            Command::Whittaker(c) => format!("whittaker {}", c.name()),
            Command::Kloosterman(a) => a.name().to_string(),
            Command::Eisen(c) => format!("eisen {}", c.name()),
            Command::Spectral(c) => format!("spectral {}", c.name()),
            Command::Shifted(c) => format!("shifted {}", c.name()),
        }
    }

    fn run(&self, cfg: &RunConfig) -> modkit::Result<Output> {
        cfg.validate()?;
        match self {
            Command::Field(c) => c.run(cfg),
            Command::Chars(c) => c.run(cfg),
            Command::Whittaker(c) => c.run(cfg),
            Command::Kloosterman(a) => a.run(cfg),
            Command::Eisen(c) => c.run(cfg),
            Command::Spectral(c) => c.run(cfg),
            Command::Shifted(c) => c.run(cfg),
        }
    }
}

fn error_kind(e: &modkit::Error) -> &'static str {
    use modkit::Error::*;
    match e {
        Domain(_) => "domain",
        OverBound { .. } => "over_bound",
        ClassNumber(_) => "class_number",
        Overflow(_) => "overflow",
        NoConvergence(_) => "no_convergence",
        Certificate(_) => "certificate",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                ErrorKind::InvalidSubcommand | ErrorKind::MissingSubcommand => {
                    let _ = e.print();
                    ExitCode::from(EXIT_USAGE)
                }
                _ => {
                    let first = e.render().to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
                    emit(&serde_json::to_string_pretty(&report::error("", "usage", &first)).unwrap());
                    ExitCode::from(EXIT_DOMAIN)
                }
            };
        }
    };
    let name = cli.command.name();
    let start = Instant::now();
    let out = modkit::exec::with_jobs(cli.cfg.jobs, || cli.command.run(&cli.cfg));
    let elapsed = (!cli.cfg.no_timing).then(|| start.elapsed().as_millis());
    match out {
        Ok(Output::Json { inputs, result, certificates }) => {
            emit(&serde_json::to_string_pretty(&report::envelope(&name, inputs, result, certificates, elapsed)).unwrap());
            ExitCode::SUCCESS
        }
        Ok(Output::Csv(s)) => {
            emit(s.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            emit(&serde_json::to_string_pretty(&report::error(&name, error_kind(&e), &e.to_string())).unwrap());
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}

/// A closed pipe downstream (`| head`) is not an error worth a panic.
fn emit(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{s}");
}
