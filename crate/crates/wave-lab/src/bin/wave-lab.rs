//! Batch front end: configure a run, invoke the kernels, emit CSV/JSON
//! data and SVG snapshots.
//!
//! Exit codes: 0 success (all checks pass), 1 configuration error,
//! 2 kernel error, 3 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wave_lab::cli::{self, load_config, CliError, Mode, OutputFormat, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "wave-lab",
    about = "Numerical laboratory for inclined-force-driven waves on a 1-D mass-spring line",
    version
)]
struct WaveLab {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form steady displacement profile.
    Analytic(CommonArgs),
    /// Exact finite-chain steady solve (tridiagonal, matched termination).
    Oracle(CommonArgs),
    /// Time-domain integration with steady-state extraction.
    Simulate(CommonArgs),
    /// Implicit inclined-sine wave: field snapshot and residual report.
    Implicit(CommonArgs),
    /// Element orbits and conic fits.
    Orbit(CommonArgs),
    /// Run the full cross-oracle verification suite.
    #[command(name = "verify-all")]
    VerifyAll(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output data format.
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Also emit SVG snapshot figures.
    #[arg(long)]
    svg: bool,

    /// Mass per element (kg).
    #[arg(long)]
    m: Option<f64>,
    /// Spring stiffness (N/m).
    #[arg(long)]
    s: Option<f64>,
    /// Element spacing (m).
    #[arg(long)]
    a: Option<f64>,
    /// Drive amplitude (N).
    #[arg(long = "F0")]
    f0: Option<f64>,
    /// Drive inclination (rad).
    #[arg(long)]
    alpha: Option<f64>,
    /// Drive frequency (rad/s).
    #[arg(long)]
    omega: Option<f64>,
    /// Set omega so the frequency ratio hits this value.
    #[arg(long = "beta-target")]
    beta_target: Option<f64>,
    /// Element count for the oracle solve and the simulation.
    #[arg(long = "N")]
    n_elements: Option<usize>,
    /// Integrator time step (s).
    #[arg(long)]
    dt: Option<f64>,
    /// Simulation length in drive periods.
    #[arg(long)]
    periods: Option<f64>,
    /// Transverse drive phase lag (rad).
    #[arg(long = "phase-offset")]
    phase_offset: Option<f64>,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(format!("unknown format '{other}' (expected csv or json)")),
    }
}

impl CommonArgs {
    fn build_config(&self) -> Result<RunConfig, CliError> {
        let mut config = load_config(self.config.as_deref())?;
        let overrides = Overrides {
            m: self.m,
            s: self.s,
            a: self.a,
            f0: self.f0,
            alpha: self.alpha,
            omega: self.omega,
            beta_target: self.beta_target,
            n_elements: self.n_elements,
            dt: self.dt,
            periods: self.periods,
            phase_offset: self.phase_offset,
        };
        overrides.apply(&mut config);
        if let Some(out) = &self.out {
            config.output.dir = out.clone();
        }
        if let Some(format) = self.format {
            config.output.format = format;
        }
        if self.svg {
            config.output.svg = true;
        }
        Ok(config)
    }
}

fn main() -> ExitCode {
    let parsed = WaveLab::parse();
    let (mode, args) = match &parsed.command {
        Command::Analytic(a) => (Mode::Analytic, a),
        Command::Oracle(a) => (Mode::Oracle, a),
        Command::Simulate(a) => (Mode::Simulate, a),
        Command::Implicit(a) => (Mode::Implicit, a),
        Command::Orbit(a) => (Mode::Orbit, a),
        Command::VerifyAll(a) => (Mode::VerifyAll, a),
    };

    let config = match args.build_config() {
        Ok(config) => config,
        Err(err) => {
            eprintln!("wave-lab: {err}");
            return ExitCode::from(err.exit_code());
        }
    };
    match cli::run(mode, &config) {
        Ok(report) => {
            for check in &report.checks {
                println!(
                    "{} {} (metric {:.6e}, requirement {})",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    check.metric,
                    check.requirement
                );
            }
            if !report.checks.is_empty() {
                let failed = report.checks.iter().filter(|c| !c.passed).count();
                println!(
                    "{} of {} checks passed",
                    report.checks.len() - failed,
                    report.checks.len()
                );
                if failed > 0 {
                    return ExitCode::from(cli::EXIT_VERIFY);
                }
            }
            for file in &report.files {
                println!("wrote {}", file.display());
            }
            ExitCode::from(cli::EXIT_OK)
        }
        Err(err) => {
            eprintln!("wave-lab: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
