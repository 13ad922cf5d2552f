//! Run configuration, deterministic CSV/JSON emission, and mode dispatch
//! for the `wave-lab` binary.
//!
//! A run is described by one JSON document; command-line flags override
//! file fields, which override defaults. Unknown keys are rejected so a
//! typo cannot silently fall back to a default. All emitted files are
//! deterministic: floats are serialized with 17 significant digits (which
//! reparse to bit-identical values) and nothing time- or platform-dependent
//! is written.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analytic::forced_profile;
use crate::error::Error;
use crate::implicit::{pde_residual_fd, FdGrid, InclinedSineSpec};
use crate::line::{DispersionParams, LineParams, Regime};
use crate::steady_state::{solve_steady_chain, Termination};
use crate::svg::{emit_snapshot_svg, Series};
use crate::time_domain::{simulate, steady_state_extract, SimConfig};
use crate::trajectory::{element_orbit, fit_conic, phase_shift_along_line};
use crate::verify::{run_all, CheckResult};

/// Process exit codes of the binary.
pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_KERNEL: u8 = 2;
pub const EXIT_VERIFY: u8 = 3;

/// What the binary was asked to do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    Oracle,
    Simulate,
    Implicit,
    Orbit,
    VerifyAll,
}

/// Errors at the CLI boundary, partitioned by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Configuration could not be parsed or violates an invariant (exit 1).
    #[error("{0}")]
    Config(String),
    /// A kernel failed at runtime (exit 2).
    #[error(transparent)]
    Kernel(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Kernel(_) => EXIT_KERNEL,
        }
    }
}

// -- Configuration ------------------------------------------------------------

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub line: LineParams,
    pub analytic: AnalyticSection,
    pub oracle: OracleSection,
    pub sim: SimSection,
    pub implicit: ImplicitSection,
    pub orbit: OrbitSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyticSection {
    /// Number of elements in the emitted profile.
    pub n_max: usize,
    /// Snapshot time (s).
    pub t: f64,
}

impl Default for AnalyticSection {
    fn default() -> Self {
        Self { n_max: 40, t: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub n_elements: usize,
    pub termination: Termination,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            n_elements: 200,
            termination: Termination::Matched,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub n_elements: usize,
    /// Run length in drive periods.
    pub periods: f64,
    /// Steps per drive period; ignored when `dt` is set explicitly.
    pub steps_per_period: usize,
    /// Extraction window length in drive periods (taken from the run tail).
    pub extract_periods: f64,
    pub absorber_len: Option<usize>,
    pub absorber_max_damping: Option<f64>,
    pub dt: Option<f64>,
    pub sample_every: Option<usize>,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            n_elements: 300,
            periods: 150.0,
            steps_per_period: 200,
            extract_periods: 20.0,
            absorber_len: None,
            absorber_max_damping: None,
            dt: None,
            sample_every: None,
        }
    }
}

impl SimSection {
    /// Lower the section into an integrator configuration for `params`.
    pub fn to_sim_config(&self, params: &LineParams) -> Result<SimConfig, CliError> {
        let period = params.drive_period();
        if self.steps_per_period == 0 {
            return Err(CliError::Config("sim.steps_per_period must be >= 1".into()));
        }
        let dt = self.dt.unwrap_or(period / self.steps_per_period as f64);
        let cfg = SimConfig {
            n_elements: self.n_elements,
            dt,
            t_end: self.periods * period,
            absorber_len: self
                .absorber_len
                .unwrap_or_else(|| (self.n_elements / 2).saturating_sub(1).min(60)),
            absorber_max_damping: self.absorber_max_damping.unwrap_or(0.6 * params.omega),
            sample_every: self
                .sample_every
                .unwrap_or_else(|| (self.steps_per_period / 25).max(1)),
        };
        cfg.validate(params)
            .map_err(|e| CliError::Config(e.to_string()))?;
        if !(self.extract_periods > 0.0 && self.extract_periods <= self.periods) {
            return Err(CliError::Config(format!(
                "sim.extract_periods = {} must lie in (0, periods]",
                self.extract_periods
            )));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ImplicitSection {
    /// Inclined sine amplitude (m).
    pub c_amp: f64,
    /// Inclination angle (rad).
    pub alpha: f64,
    pub k: f64,
    pub omega: f64,
    /// Residual-certification grid.
    pub nx: usize,
    pub nt: usize,
    pub hx: f64,
    pub ht: f64,
    pub x0: f64,
    pub t0: f64,
    /// Field snapshot: x in [0, x_span] sampled with `snapshot_points`
    /// columns at each listed time.
    pub x_span: f64,
    pub snapshot_points: usize,
    pub snapshot_times: Vec<f64>,
}

impl Default for ImplicitSection {
    fn default() -> Self {
        Self {
            c_amp: 0.5,
            alpha: std::f64::consts::FRAC_PI_3,
            k: 1.0,
            omega: 1.0,
            nx: 201,
            nt: 9,
            hx: 2e-3,
            ht: 4e-3,
            x0: 0.0,
            t0: 0.0,
            x_span: std::f64::consts::TAU,
            snapshot_points: 400,
            snapshot_times: vec![0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitSection {
    /// Inclusive 1-based element range.
    pub first: usize,
    pub last: usize,
    pub samples: usize,
}

impl Default for OrbitSection {
    fn default() -> Self {
        Self {
            first: 1,
            last: 10,
            samples: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: OutputFormat,
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
            svg: false,
        }
    }
}

/// Command-line overrides; flags beat file fields beat defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub m: Option<f64>,
    pub s: Option<f64>,
    pub a: Option<f64>,
    pub f0: Option<f64>,
    pub alpha: Option<f64>,
    pub omega: Option<f64>,
    /// Sets omega to hit this frequency ratio given the final m and s.
    pub beta_target: Option<f64>,
    /// Element count for both the oracle solve and the simulation.
    pub n_elements: Option<usize>,
    pub dt: Option<f64>,
    pub periods: Option<f64>,
    pub phase_offset: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = self.m {
            cfg.line.m = v;
        }
        if let Some(v) = self.s {
            cfg.line.s = v;
        }
        if let Some(v) = self.a {
            cfg.line.a = v;
        }
        if let Some(v) = self.f0 {
            cfg.line.f0 = v;
        }
        if let Some(v) = self.alpha {
            cfg.line.alpha = v;
        }
        if let Some(v) = self.omega {
            cfg.line.omega = v;
        }
        if let Some(beta) = self.beta_target {
            // Applied after m/s so the ratio lands exactly.
            cfg.line.omega = 2.0 * beta * (cfg.line.s / cfg.line.m).sqrt();
        }
        if let Some(v) = self.n_elements {
            cfg.oracle.n_elements = v;
            cfg.sim.n_elements = v;
        }
        if let Some(v) = self.dt {
            cfg.sim.dt = Some(v);
        }
        if let Some(v) = self.periods {
            cfg.sim.periods = v;
        }
        if let Some(v) = self.phase_offset {
            cfg.line.phase_offset = v;
        }
    }
}

/// Load a config file, or the defaults when no path is given. Parse errors
/// carry the file position.
pub fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::Config(format!("{}:{}:{}: {e}", p.display(), e.line(), e.column()))
            })
        }
    }
}

/// Everything a finished run reports back.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// Files written, in emission order.
    pub files: Vec<PathBuf>,
    /// Check results; empty unless the mode was `VerifyAll`.
    pub checks: Vec<CheckResult>,
}

impl RunReport {
    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Execute one mode: validate, run the kernels, and emit files under
/// `config.output.dir`.
pub fn run(mode: Mode, config: &RunConfig) -> Result<RunReport, CliError> {
    config
        .line
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let out_dir = &config.output.dir;
    std::fs::create_dir_all(out_dir).map_err(|e| {
        CliError::Config(format!(
            "cannot create output dir {}: {e}",
            out_dir.display()
        ))
    })?;

    match mode {
        Mode::Analytic => run_analytic(config),
        Mode::Oracle => run_oracle(config),
        Mode::Simulate => run_simulate(config),
        Mode::Implicit => run_implicit(config),
        Mode::Orbit => run_orbit(config),
        Mode::VerifyAll => run_verify_all(config),
    }
}

fn run_analytic(config: &RunConfig) -> Result<RunReport, CliError> {
    if config.analytic.n_max < 1 {
        return Err(CliError::Config("analytic.n_max must be >= 1".into()));
    }
    let disp = DispersionParams::from_line(&config.line).map_err(CliError::Kernel)?;
    let profile = forced_profile(
        &config.line,
        &disp,
        config.analytic.n_max,
        config.analytic.t,
    );

    let mut files = Vec::new();
    match config.output.format {
        OutputFormat::Csv => {
            let mut rows = Vec::with_capacity(profile.len());
            for p in &profile {
                rows.push(vec![p.n.to_string(), fmt_f64(p.delta), fmt_f64(p.y)]);
            }
            files.push(write_csv(
                &config.output.dir.join("analytic.csv"),
                &["n", "delta", "y"],
                &rows,
            )?);
        }
        OutputFormat::Json => {
            let value = json!({
                "regime": disp.regime,
                "beta": disp.beta,
                "t": config.analytic.t,
                "profile": profile
                    .iter()
                    .map(|p| json!({"n": p.n, "delta": p.delta, "y": p.y}))
                    .collect::<Vec<_>>(),
            });
            files.push(write_json(
                &config.output.dir.join("analytic.json"),
                &value,
            )?);
        }
    }
    if config.output.svg {
        let delta: Vec<[f64; 2]> = profile.iter().map(|p| [p.n as f64, p.delta]).collect();
        let y: Vec<[f64; 2]> = profile.iter().map(|p| [p.n as f64, p.y]).collect();
        let path = config.output.dir.join("analytic.svg");
        emit_snapshot_svg(
            &format!(
                "steady profile: beta={:.4} alpha={:.4} t={:.4} ({})",
                disp.beta, config.line.alpha, config.analytic.t, disp.regime
            ),
            "element n",
            "displacement (m)",
            &[
                Series::new("longitudinal", delta),
                Series::new("transverse", y),
            ],
            &path,
        )
        .map_err(CliError::Kernel)?;
        files.push(path);
    }
    Ok(RunReport {
        files,
        checks: vec![],
    })
}

fn run_oracle(config: &RunConfig) -> Result<RunReport, CliError> {
    if config.oracle.n_elements < 3 {
        return Err(CliError::Config(format!(
            "oracle.n_elements = {} but the chain solve needs at least 3 elements",
            config.oracle.n_elements
        )));
    }
    let solve = solve_steady_chain(
        &config.line,
        config.oracle.n_elements,
        config.oracle.termination,
    )
    .map_err(CliError::Kernel)?;
    let mut files = Vec::new();
    match config.output.format {
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = solve
                .amplitudes
                .iter()
                .map(|p| {
                    vec![
                        p.n.to_string(),
                        fmt_f64(p.delta.re),
                        fmt_f64(p.delta.im),
                        fmt_f64(p.y.re),
                        fmt_f64(p.y.im),
                    ]
                })
                .collect();
            files.push(write_csv(
                &config.output.dir.join("oracle.csv"),
                &["n", "delta_re", "delta_im", "y_re", "y_im"],
                &rows,
            )?);
        }
        OutputFormat::Json => {
            let value = json!({
                "termination": solve.termination,
                "residual_norm": solve.residual_norm,
                "amplitudes": solve
                    .amplitudes
                    .iter()
                    .map(|p| json!({
                        "n": p.n,
                        "delta_re": p.delta.re,
                        "delta_im": p.delta.im,
                        "y_re": p.y.re,
                        "y_im": p.y.im,
                    }))
                    .collect::<Vec<_>>(),
            });
            files.push(write_json(&config.output.dir.join("oracle.json"), &value)?);
        }
    }
    Ok(RunReport {
        files,
        checks: vec![],
    })
}

fn run_simulate(config: &RunConfig) -> Result<RunReport, CliError> {
    let cfg = config.sim.to_sim_config(&config.line)?;
    let rec = simulate(&config.line, &cfg).map_err(CliError::Kernel)?;
    let period = config.line.drive_period();
    let window = (
        (config.sim.periods - config.sim.extract_periods) * period,
        config.sim.periods * period,
    );
    let ext = steady_state_extract(&rec, config.line.omega, window).map_err(CliError::Kernel)?;

    let mut files = Vec::new();
    match config.output.format {
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = ext
                .elements
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    vec![
                        (i + 1).to_string(),
                        fmt_f64(e.amp_delta),
                        fmt_f64(e.phase_delta),
                        fmt_f64(e.amp_y),
                        fmt_f64(e.phase_y),
                        fmt_f64(e.fit_residual),
                    ]
                })
                .collect();
            files.push(write_csv(
                &config.output.dir.join("simulate.csv"),
                &[
                    "n",
                    "amp_delta",
                    "phase_delta",
                    "amp_y",
                    "phase_y",
                    "fit_residual",
                ],
                &rows,
            )?);
        }
        OutputFormat::Json => {
            let value = json!({
                "window": { "start": ext.window.0, "end": ext.window.1 },
                "elements": ext
                    .elements
                    .iter()
                    .enumerate()
                    .map(|(i, e)| json!({
                        "n": i + 1,
                        "amp_delta": e.amp_delta,
                        "phase_delta": e.phase_delta,
                        "amp_y": e.amp_y,
                        "phase_y": e.phase_y,
                        "fit_residual": e.fit_residual,
                    }))
                    .collect::<Vec<_>>(),
            });
            files.push(write_json(
                &config.output.dir.join("simulate.json"),
                &value,
            )?);
        }
    }
    if config.output.svg {
        let amp: Vec<[f64; 2]> = ext
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| [(i + 1) as f64, e.amp_delta])
            .collect();
        let amp_y: Vec<[f64; 2]> = ext
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| [(i + 1) as f64, e.amp_y])
            .collect();
        let path = config.output.dir.join("simulate.svg");
        emit_snapshot_svg(
            "extracted steady amplitudes",
            "element n",
            "amplitude (m)",
            &[
                Series::new("longitudinal", amp),
                Series::new("transverse", amp_y),
            ],
            &path,
        )
        .map_err(CliError::Kernel)?;
        files.push(path);
    }
    Ok(RunReport {
        files,
        checks: vec![],
    })
}

fn run_implicit(config: &RunConfig) -> Result<RunReport, CliError> {
    let section = &config.implicit;
    let sine = InclinedSineSpec {
        c_amp: section.c_amp,
        alpha: section.alpha,
        k: section.k,
        omega: section.omega,
    };
    let spec = sine
        .to_wave_spec()
        .map_err(|e| CliError::Config(e.to_string()))?;
    if section.snapshot_points < 2 || section.snapshot_times.is_empty() {
        return Err(CliError::Config(
            "implicit.snapshot_points must be >= 2 and snapshot_times non-empty".into(),
        ));
    }

    // Field snapshots, row-continued.
    let mut field: Vec<(f64, f64, f64)> = Vec::new();
    for &t in &section.snapshot_times {
        let mut seed = 0.0;
        for i in 0..section.snapshot_points {
            let x = section.x_span * i as f64 / (section.snapshot_points - 1) as f64;
            let y = spec.eval(x, t, Some(seed)).map_err(CliError::Kernel)?;
            field.push((t, x, y));
            seed = y;
        }
    }

    let grid = FdGrid {
        x0: section.x0,
        t0: section.t0,
        nx: section.nx,
        nt: section.nt,
        hx: section.hx,
        ht: section.ht,
        seed: 0.0,
    };
    let report = pde_residual_fd(&spec, &grid).map_err(CliError::Kernel)?;

    let mut files = Vec::new();
    match config.output.format {
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = field
                .iter()
                .map(|(t, x, y)| vec![fmt_f64(*t), fmt_f64(*x), fmt_f64(*y)])
                .collect();
            files.push(write_csv(
                &config.output.dir.join("implicit.csv"),
                &["t", "x", "y"],
                &rows,
            )?);
        }
        OutputFormat::Json => {
            let value = json!({
                "spec": {
                    "c_amp": sine.c_amp,
                    "alpha": sine.alpha,
                    "k": sine.k,
                    "omega": sine.omega,
                    "contraction_bound": sine.contraction_bound(),
                },
                "field": field
                    .iter()
                    .map(|(t, x, y)| json!({"t": t, "x": x, "y": y}))
                    .collect::<Vec<_>>(),
            });
            files.push(write_json(
                &config.output.dir.join("implicit.json"),
                &value,
            )?);
        }
    }
    // The residual certification always goes out as JSON; it is the point
    // of the mode.
    let report_value = json!({
        "hx": report.hx,
        "ht": report.ht,
        "max_residual": report.max_residual,
        "normalization": report.normalization,
        "refined_max_residual": report.refined_max_residual,
        "order_estimate": report.order_estimate,
    });
    files.push(write_json(
        &config.output.dir.join("implicit_report.json"),
        &report_value,
    )?);

    if config.output.svg {
        let series: Vec<Series> = section
            .snapshot_times
            .iter()
            .map(|&t| {
                Series::new(
                    format!("t = {t:.3}"),
                    field
                        .iter()
                        .filter(|(ft, _, _)| *ft == t)
                        .map(|(_, x, y)| [*x, *y])
                        .collect(),
                )
            })
            .collect();
        let path = config.output.dir.join("implicit.svg");
        emit_snapshot_svg(
            &format!(
                "inclined sine wave: c={:.3} alpha={:.4} k={} w={}",
                section.c_amp, section.alpha, section.k, section.omega
            ),
            "x (m)",
            "y (m)",
            &series,
            &path,
        )
        .map_err(CliError::Kernel)?;
        files.push(path);
    }
    Ok(RunReport {
        files,
        checks: vec![],
    })
}

fn run_orbit(config: &RunConfig) -> Result<RunReport, CliError> {
    let section = &config.orbit;
    if section.first < 1 || section.last < section.first {
        return Err(CliError::Config(format!(
            "orbit range ({}, {}) is not a 1-based inclusive range",
            section.first, section.last
        )));
    }
    if section.samples < 16 {
        return Err(CliError::Config(format!(
            "orbit.samples = {} but orbit sampling needs at least 16 points",
            section.samples
        )));
    }
    let disp = DispersionParams::from_line(&config.line).map_err(CliError::Kernel)?;
    let lags = if disp.regime == Regime::Periodic {
        Some(
            phase_shift_along_line(&config.line, &disp, (section.first, section.last))
                .map_err(CliError::Kernel)?,
        )
    } else {
        None
    };

    let mut fits = Vec::new();
    let mut orbits = Vec::new();
    for n in section.first..=section.last {
        let orbit =
            element_orbit(&config.line, &disp, n, section.samples).map_err(CliError::Kernel)?;
        fits.push((n, fit_conic(&orbit).map_err(CliError::Kernel)?));
        orbits.push(orbit);
    }

    let mut files = Vec::new();
    match config.output.format {
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = fits
                .iter()
                .enumerate()
                .map(|(i, (n, fit))| {
                    vec![
                        n.to_string(),
                        fmt_f64(fit.center[0]),
                        fmt_f64(fit.center[1]),
                        fmt_f64(fit.semi_major),
                        fmt_f64(fit.semi_minor),
                        fmt_f64(fit.orientation),
                        fmt_f64(fit.eccentricity),
                        (fit.degenerate as u8).to_string(),
                        fmt_f64(fit.rms_residual),
                        lags.as_ref().map_or(String::new(), |l| fmt_f64(l[i])),
                    ]
                })
                .collect();
            files.push(write_csv(
                &config.output.dir.join("orbit.csv"),
                &[
                    "n",
                    "center_x",
                    "center_y",
                    "semi_major",
                    "semi_minor",
                    "orientation",
                    "eccentricity",
                    "degenerate",
                    "rms_residual",
                    "phase_lag",
                ],
                &rows,
            )?);
        }
        OutputFormat::Json => {
            let value = json!({
                "regime": disp.regime,
                "orbits": fits
                    .iter()
                    .enumerate()
                    .map(|(i, (n, fit))| json!({
                        "n": n,
                        "center": fit.center,
                        "semi_major": fit.semi_major,
                        "semi_minor": fit.semi_minor,
                        "orientation": fit.orientation,
                        "eccentricity": fit.eccentricity,
                        "degenerate": fit.degenerate,
                        "rms_residual": fit.rms_residual,
                        "phase_lag": lags.as_ref().map(|l| l[i]),
                    }))
                    .collect::<Vec<_>>(),
            });
            files.push(write_json(&config.output.dir.join("orbit.json"), &value)?);
        }
    }
    if config.output.svg {
        let series: Vec<Series> = orbits
            .iter()
            .take(6)
            .map(|o| Series::new(format!("element {}", o.n), o.points.clone()))
            .collect();
        let path = config.output.dir.join("orbit.svg");
        emit_snapshot_svg(
            &format!(
                "element orbits: beta={:.4} alpha={:.4} lag={:.4}",
                disp.beta, config.line.alpha, config.line.phase_offset
            ),
            "longitudinal displacement (m)",
            "transverse displacement (m)",
            &series,
            &path,
        )
        .map_err(CliError::Kernel)?;
        files.push(path);
    }
    Ok(RunReport {
        files,
        checks: vec![],
    })
}

fn run_verify_all(config: &RunConfig) -> Result<RunReport, CliError> {
    let checks = run_all().map_err(CliError::Kernel)?;
    let mut files = Vec::new();

    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                fmt_f64(c.metric),
                c.requirement.clone(),
                (c.passed as u8).to_string(),
            ]
        })
        .collect();
    files.push(write_csv(
        &config.output.dir.join("verify_report.csv"),
        &["name", "metric", "requirement", "passed"],
        &rows,
    )?);
    let value = json!({
        "passed": checks.iter().filter(|c| c.passed).count(),
        "failed": checks.iter().filter(|c| !c.passed).count(),
        "checks": checks,
    });
    files.push(write_json(
        &config.output.dir.join("verify_report.json"),
        &value,
    )?);
    Ok(RunReport { files, checks })
}

// -- Deterministic serialization ------------------------------------------------

/// 17 significant digits: enough for the decimal text to reparse to the
/// bit-identical f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_field(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
    let mut text = String::new();
    writeln_csv(&mut text, header.iter().map(|s| s.to_string()));
    for row in rows {
        writeln_csv(&mut text, row.iter().cloned());
    }
    std::fs::write(path, text).map_err(|source| {
        CliError::Kernel(Error::Io {
            path: path.to_path_buf(),
            source,
        })
    })?;
    Ok(path.to_path_buf())
}

fn writeln_csv(out: &mut String, fields: impl Iterator<Item = String>) {
    let line = fields.map(|f| csv_field(&f)).collect::<Vec<_>>().join(",");
    let _ = writeln!(out, "{line}");
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("json serialization is infallible");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| {
        CliError::Kernel(Error::Io {
            path: path.to_path_buf(),
            source,
        })
    })?;
    Ok(path.to_path_buf())
}
