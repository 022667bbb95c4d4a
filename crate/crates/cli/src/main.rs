use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod expr;

use config::{FileConfig, MeasureFlags, Overrides, RunConfig};

/// Integration, antiderivatives and Fourier coefficients by recursion on
/// dyadic step functions.
#[derive(Debug, Parser)]
#[command(name = "catint", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a function; prints {value, level_reached, converged, residual}.
    Integrate(Flags),
    /// Antiderivative x ↦ ∫_0^x f on [0,1]; value is the breakpoint list.
    Antiderive(Flags),
    /// Weak derivative of F; value is the list of cell slopes.
    Differentiate(Flags),
    /// Fourier coefficient c_k on [0,1].
    Fourier(Flags),
    /// Run invariant suites; exit 3 on any failure.
    Verify(Flags),
    /// CSV of level,value,residual for the integral across levels.
    Table(Flags),
}

#[derive(Debug, clap::Args)]
struct Flags {
    /// JSON config; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Expression in x1..xn, `step:<u>,c0,c1,…`, `poly:c0,c1,…` or `pl:<u>,v0,v1,…`.
    #[arg(long, allow_hyphen_values = true)]
    function: Option<String>,
    /// Measure kind: lebesgue, power, polynomial, x^2.
    #[arg(long)]
    measure: Option<String>,
    /// Exponent of the power measure F(x) = x^q.
    #[arg(long)]
    q: Option<f64>,
    /// Polynomial distribution coefficients, ascending.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Interval `a,b` for every axis.
    #[arg(long, allow_hyphen_values = true)]
    interval: Option<String>,
    /// Split point inside the interval.
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// Level range `a:b`.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    /// midpoint, left or right.
    #[arg(long)]
    convention: Option<String>,
    /// rational, float or complex.
    #[arg(long)]
    backend: Option<String>,
    /// Direct-sum norm weight: printed or leinster.
    #[arg(long)]
    weight: Option<String>,
    /// Fourier frequency.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i64>,
    /// Report the L^p norm of the function instead of its integral.
    #[arg(long)]
    p: Option<f64>,
    /// Suite name or `all`.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    cases: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Flags {
    fn resolve(self) -> catint::Result<RunConfig> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let overrides = Overrides {
            function: self.function,
            dim: self.dim,
            measure: MeasureFlags {
                kind: self.measure,
                q: self.q,
                coeffs: self.coeffs,
                interval: self.interval,
                xi: self.xi,
            },
            backend: self.backend,
            levels: self.levels,
            tol: self.tol,
            convention: self.convention,
            weight: self.weight,
            k: self.k,
            p: self.p,
            suite: self.suite,
            cases: self.cases,
            seed: self.seed,
        };
        RunConfig::merge(file, overrides)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (run, flags): (fn(&RunConfig) -> catint::Result<commands::Output>, Flags) = match cli.command {
        Command::Integrate(f) => (commands::integrate_cmd, f),
        Command::Antiderive(f) => (commands::antiderive_cmd, f),
        Command::Differentiate(f) => (commands::differentiate_cmd, f),
        Command::Fourier(f) => (commands::fourier_cmd, f),
        Command::Verify(f) => (commands::verify_cmd, f),
        Command::Table(f) => (commands::table_cmd, f),
    };
    match flags.resolve().and_then(|cfg| run(&cfg)) {
        Ok(out) => {
            println!("{}", out.text);
            if !out.verified {
                ExitCode::from(3)
            } else if !out.converged {
                eprintln!("warning: did not converge within the level cap");
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
