//! The cross-oracle verification suite behind `wave-lab verify-all`.
//!
//! Every check pits two independent routes to the same numbers against each
//! other: closed forms vs the tridiagonal solve, closed forms vs time
//! integration, analytic derivatives vs finite differences, implicit vs
//! explicit evaluation. Results are data (name, metric, requirement,
//! pass/fail); printing and exit codes belong to the binary.
//!
//! All randomized checks use a fixed-seed in-crate generator, so two runs
//! of the suite produce identical reports byte for byte.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI, TAU};

use serde::Serialize;

use crate::analytic::{continuum_limit_report, forced_phasor, ContinuumParams};
use crate::error::Result;
use crate::implicit::{
    dalembert_eval, pde_residual_fd_with_speed_scale, C2Fn, FdGrid, ImplicitWaveSpec,
    InclinedSineSpec,
};
use crate::line::{DispersionParams, LineParams};
use crate::steady_state::{recurrence_residual, solve_steady_chain, Termination};
use crate::time_domain::{simulate, steady_state_extract, SimConfig};
use crate::trajectory::{element_orbit, fit_conic, phase_shift_along_line};

/// Outcome of one verification check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// The measured quantity.
    pub metric: f64,
    /// Human-readable pass condition, e.g. `<= 1e-10`.
    pub requirement: String,
    pub passed: bool,
}

impl CheckResult {
    fn le(name: &str, metric: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            metric,
            requirement: format!("<= {threshold:e}"),
            passed: metric.is_finite() && metric <= threshold,
        }
    }

    fn ge(name: &str, metric: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            metric,
            requirement: format!(">= {threshold}"),
            passed: metric.is_finite() && metric >= threshold,
        }
    }

    fn within(name: &str, metric: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.to_string(),
            metric,
            requirement: format!("in [{lo}, {hi}]"),
            passed: metric.is_finite() && metric >= lo && metric <= hi,
        }
    }
}

/// Run the full suite. Kernel failures abort with an error; check failures
/// are reported in the results.
pub fn run_all() -> Result<Vec<CheckResult>> {
    let mut results = Vec::new();
    results.push(analytic_oracle_agreement()?);
    results.push(recurrence_residuals()?);
    results.extend(critical_continuity()?);
    results.extend(time_domain_reproduction()?);
    results.push(time_domain_dt_convergence()?);
    results.push(continuum_limit_order()?);
    results.extend(implicit_residual_certification()?);
    results.push(implicit_derivative_order()?);
    results.push(implicit_degeneration()?);
    results.push(travelling_invariance()?);
    results.extend(orbit_checks()?);
    Ok(results)
}

fn line_for_beta(beta: f64, alpha: f64) -> Result<LineParams> {
    // m = s = 1 makes omega = 2 beta.
    LineParams::new(1.0, 1.0, 1.0, 1.0, alpha, 2.0 * beta)
}

fn rel_err(a: num_complex::Complex64, b: num_complex::Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn wrap_angle(phi: f64) -> f64 {
    let mut p = phi % TAU;
    if p > PI {
        p -= TAU;
    }
    if p < -PI {
        p += TAU;
    }
    p
}

/// Closed forms vs the matched tridiagonal solve over the full regime and
/// inclination grid.
fn analytic_oracle_agreement() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for &beta in &[0.3, 0.5, 0.7, 0.9, 1.1, 1.25, 2.0] {
        for &alpha in &[0.0, FRAC_PI_6, FRAC_PI_3, FRAC_PI_2] {
            let params = line_for_beta(beta, alpha)?;
            let disp = DispersionParams::from_line(&params)?;
            let solve = solve_steady_chain(&params, 200, Termination::Matched)?;
            for n in 1..=100 {
                let exact = forced_phasor(&params, &disp, n);
                let got = &solve.amplitudes[n - 1];
                worst = worst.max(rel_err(got.delta, exact.delta));
                worst = worst.max(rel_err(got.y, exact.y));
            }
        }
    }
    Ok(CheckResult::le("analytic-oracle-agreement", worst, 1e-10))
}

/// Substitute the closed-form phasors back into the driven and interior
/// equations of both axes.
fn recurrence_residuals() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for &beta in &[0.3, 0.5, 0.9, 1.0, 1.1, 1.25, 2.0] {
        let params = line_for_beta(beta, FRAC_PI_6)?.with_phase_offset(0.3)?;
        let disp = DispersionParams::from_line(&params)?;
        let pairs: Vec<_> = (1..=100)
            .map(|n| forced_phasor(&params, &disp, n))
            .collect();
        worst = worst.max(recurrence_residual(&pairs, &params));
    }
    Ok(CheckResult::le("recurrence-residuals", worst, 1e-12))
}

/// Continuity of the forced response across the cutoff.
///
/// Below cutoff the amplitude deviates from the critical one by O(eps).
/// Above cutoff the decay root has a square-root branch point,
/// `gamma_minus = 1 - sqrt(2 eps) + O(eps)`, so the deviation at element n
/// is governed by the envelope `(2n - 1) acosh(beta) + eps` — first-order
/// continuity is *not* attainable there and the envelope is what a correct
/// implementation must stay under.
fn critical_continuity() -> Result<Vec<CheckResult>> {
    let eps = 1e-5;
    let mut out = Vec::new();

    let critical = line_for_beta(1.0, FRAC_PI_3)?;
    let reference = critical.f0 * critical.alpha.cos() / (2.0 * critical.s);
    let reference_y = critical.f0 * critical.alpha.sin() / (2.0 * critical.s);

    let below = line_for_beta(1.0 - eps, FRAC_PI_3)?;
    let disp_below = DispersionParams::from_line(&below)?;
    let mut worst_below: f64 = 0.0;
    for n in 1..=10 {
        let p = forced_phasor(&below, &disp_below, n);
        worst_below = worst_below.max((p.delta.norm() / reference - 1.0).abs());
        worst_below = worst_below.max((p.y.norm() / reference_y - 1.0).abs());
    }
    out.push(CheckResult::le(
        "critical-continuity-below",
        worst_below,
        1e-4,
    ));

    let above = line_for_beta(1.0 + eps, FRAC_PI_3)?;
    let disp_above = DispersionParams::from_line(&above)?;
    let acosh = (1.0 + eps + f64::sqrt((1.0 + eps) * (1.0 + eps) - 1.0)).ln();
    let mut worst_ratio: f64 = 0.0;
    for n in 1..=10 {
        let p = forced_phasor(&above, &disp_above, n);
        let deviation = (p.delta.norm() / reference - 1.0).abs();
        let envelope = (2 * n - 1) as f64 * acosh + eps;
        worst_ratio = worst_ratio.max(deviation / envelope);
    }
    out.push(CheckResult::le(
        "critical-continuity-above-envelope",
        worst_ratio,
        1.0,
    ));
    Ok(out)
}

const SIM_ELEMENTS: usize = 300;
const SIM_ABSORBER: usize = 80;

fn sim_config(params: &LineParams, periods: f64, steps_per_period: usize) -> SimConfig {
    SimConfig {
        n_elements: SIM_ELEMENTS,
        dt: params.drive_period() / steps_per_period as f64,
        t_end: periods * params.drive_period(),
        absorber_len: SIM_ABSORBER,
        absorber_max_damping: 0.6 * params.omega,
        sample_every: (steps_per_period / 25).max(1),
    }
}

/// Profile-relative amplitude error of the extraction against the closed
/// forms: each element's deviation over the profile peak. Phases are
/// compared where the steady amplitude clears half a percent of the peak;
/// below that the lingering band-edge switch-on background (~1e-4 of the
/// peak) owns the angle.
fn extraction_errors(params: &LineParams, periods: f64, spp: usize) -> Result<(f64, f64)> {
    let disp = DispersionParams::from_line(params)?;
    let cfg = sim_config(params, periods, spp);
    let rec = simulate(params, &cfg)?;
    let period = params.drive_period();
    let ext = steady_state_extract(
        &rec,
        params.omega,
        ((periods - 30.0) * period, periods * period),
    )?;
    let peak = forced_phasor(params, &disp, 1);
    let peak_scale = peak.delta.norm().max(peak.y.norm());
    let mut amp_err: f64 = 0.0;
    let mut phase_err: f64 = 0.0;
    for n in 1..=20 {
        let exact = forced_phasor(params, &disp, n);
        let got = &ext.elements[n - 1];
        amp_err = amp_err.max((got.amp_delta - exact.delta.norm()).abs() / peak_scale);
        amp_err = amp_err.max((got.amp_y - exact.y.norm()).abs() / peak_scale);
        if exact.delta.norm() > 5e-3 * peak_scale {
            phase_err = phase_err.max(wrap_angle(got.phase_delta - exact.delta.arg()).abs());
        }
        if exact.y.norm() > 5e-3 * peak_scale {
            phase_err = phase_err.max(wrap_angle(got.phase_y - exact.y.arg()).abs());
        }
    }
    Ok((amp_err, phase_err))
}

fn time_domain_reproduction() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for &beta in &[0.5, 1.25] {
        // The drive is the in-phase force pair: a transverse phase lag
        // would additionally kick the chain's free translation mode at
        // switch-on (net impulse ~ sin(lag)), whose slow relaxation
        // pollutes the harmonic fit far beyond the steady physics under
        // test here. The lag path is exercised by the orbit checks.
        let params = line_for_beta(beta, FRAC_PI_6)?;
        let (amp_err, phase_err) = extraction_errors(&params, 200.0, 200)?;
        out.push(CheckResult::le(
            &format!("time-domain-amplitude-beta-{beta}"),
            amp_err,
            1e-2,
        ));
        out.push(CheckResult::le(
            &format!("time-domain-phase-beta-{beta}"),
            phase_err,
            0.05,
        ));
    }
    Ok(out)
}

/// Halving dt must cut the extraction's amplitude error by about four.
fn time_domain_dt_convergence() -> Result<CheckResult> {
    let params = line_for_beta(0.5, FRAC_PI_6)?;
    let (coarse, _) = extraction_errors(&params, 300.0, 64)?;
    let (fine, _) = extraction_errors(&params, 300.0, 128)?;
    Ok(CheckResult::within(
        "time-domain-dt-convergence",
        coarse / fine,
        3.0,
        5.5,
    ))
}

/// Lumped phase vs continuum phase over decreasing spacings.
fn continuum_limit_order() -> Result<CheckResult> {
    let cp = ContinuumParams {
        rho: 1.0,
        tension: 1.0,
        f0: 1.0,
        alpha: FRAC_PI_6,
        omega: 1.0,
    };
    let table = continuum_limit_report(&cp, &[1e-1, 1e-2, 1e-3], TAU)?;
    let min_order = table
        .pairwise_orders
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(CheckResult::ge("continuum-limit-order", min_order, 1.99))
}

fn acceptance_sine() -> Result<ImplicitWaveSpec> {
    InclinedSineSpec {
        c_amp: 0.5,
        alpha: FRAC_PI_3,
        k: 1.0,
        omega: 1.0,
    }
    .to_wave_spec()
}

/// Finite-difference residual of the inclined sine converges at second
/// order; the wrong-speed control does not converge at all.
fn implicit_residual_certification() -> Result<Vec<CheckResult>> {
    let spec = acceptance_sine()?;
    // ht = 2 hx keeps the two truncation terms from cancelling (k = w here).
    let mut residuals = Vec::new();
    for &h in &[2e-3, 1e-3, 5e-4] {
        let grid = FdGrid {
            x0: 0.0,
            t0: 0.0,
            nx: (TAU / h) as usize + 1,
            nt: 5,
            hx: h,
            ht: 2.0 * h,
            seed: 0.0,
        };
        let report = pde_residual_fd_with_speed_scale(&spec, &grid, 1.0)?;
        residuals.push((report.max_residual, report.normalization));
    }
    let mut min_order = f64::INFINITY;
    for w in residuals.windows(2) {
        min_order = min_order.min((w[0].0 / w[1].0).log2());
    }
    let mut out = vec![CheckResult::ge("implicit-residual-order", min_order, 1.95)];

    let control_grid = FdGrid {
        x0: 0.0,
        t0: 0.0,
        nx: (TAU / 5e-4) as usize + 1,
        nt: 5,
        hx: 5e-4,
        ht: 1e-3,
        seed: 0.0,
    };
    let control = pde_residual_fd_with_speed_scale(&spec, &control_grid, 1.1)?;
    out.push(CheckResult::ge(
        "implicit-residual-negative-control",
        control.max_residual / control.normalization,
        1e-2,
    ));
    Ok(out)
}

/// Analytic derivatives vs central differences at random valid points.
fn implicit_derivative_order() -> Result<CheckResult> {
    let spec = acceptance_sine()?;
    let mut rng = SplitMix64::new(0x5eed_0001);
    let cot = 1.0 / FRAC_PI_3.tan();
    let mut min_order = f64::INFINITY;
    let mut checked = 0;
    while checked < 100 {
        let x = rng.uniform(-4.0, 4.0);
        let t = rng.uniform(-4.0, 4.0);
        let y = spec.eval(x, t, Some(0.0))?;
        let a = spec.phase(x, t, y);
        if (0.5 * a.cos() * cot).abs() > 0.9 {
            continue;
        }
        let exact = spec.derivatives(x, t, y)?;
        let fd = |h: f64| -> Result<[f64; 4]> {
            let e = |dx: f64, dt: f64| spec.eval(x + dx, t + dt, Some(y));
            Ok([
                (e(h, 0.0)? - e(-h, 0.0)?) / (2.0 * h),
                (e(0.0, h)? - e(0.0, -h)?) / (2.0 * h),
                (e(h, 0.0)? - 2.0 * y + e(-h, 0.0)?) / (h * h),
                (e(0.0, h)? - 2.0 * y + e(0.0, -h)?) / (h * h),
            ])
        };
        let coarse = fd(1e-3)?;
        let fine = fd(5e-4)?;
        let exact_arr = [exact.dy_dx, exact.dy_dt, exact.d2y_dx2, exact.d2y_dt2];
        for idx in 0..4 {
            let e1 = (coarse[idx] - exact_arr[idx]).abs();
            let e2 = (fine[idx] - exact_arr[idx]).abs();
            // Below ~1e-6 the truncation error drowns in the h^-2-amplified
            // round-off of the solved values and carries no order signal.
            if e1 > 2e-7 {
                min_order = min_order.min((e1 / e2).log2());
            }
        }
        checked += 1;
    }
    Ok(CheckResult::ge("implicit-derivative-order", min_order, 1.9))
}

/// With psi = 0 the implicit evaluator must agree with the explicit
/// d'Alembert form pointwise.
fn implicit_degeneration() -> Result<CheckResult> {
    let spec = ImplicitWaveSpec::new(C2Fn::scaled_sin(0.9), C2Fn::zero(), 1.7, 2.3, 1.2)?
        .with_counter_wave(
            C2Fn::new(|u| 0.3 * u.cos(), |u| -0.3 * u.sin(), |u| -0.3 * u.cos()),
            C2Fn::zero(),
        )?;
    let phi1 = C2Fn::scaled_sin(0.9);
    let phi2 = C2Fn::new(|u| 0.3 * u.cos(), |u| -0.3 * u.sin(), |u| -0.3 * u.cos());
    let mut rng = SplitMix64::new(0x5eed_0002);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let x = rng.uniform(-8.0, 8.0);
        let t = rng.uniform(-8.0, 8.0);
        let implicit = spec.eval(x, t, Some(0.0))?;
        let explicit = dalembert_eval(&phi1, &phi2, 1.7, 2.3, x, t);
        worst = worst.max((implicit - explicit).abs());
    }
    Ok(CheckResult::le("implicit-degeneration", worst, 1e-12))
}

/// Shifting x by delta and t by k delta / w leaves the phase, and hence the
/// solution, untouched.
fn travelling_invariance() -> Result<CheckResult> {
    let spec = acceptance_sine()?;
    let mut rng = SplitMix64::new(0x5eed_0003);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = rng.uniform(-5.0, 5.0);
        let t = rng.uniform(-5.0, 5.0);
        let delta = rng.uniform(-10.0, 10.0);
        let y0 = spec.eval(x, t, Some(0.0))?;
        let y1 = spec.eval(x + delta, t + spec.k * delta / spec.omega, Some(y0))?;
        worst = worst.max((y1 - y0).abs());
    }
    Ok(CheckResult::le("travelling-invariance", worst, 1e-10))
}

fn orbit_checks() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    // In-phase orbits degenerate to segments inclined by alpha.
    let mut worst_orientation: f64 = 0.0;
    for &beta in &[0.5, 1.0, 1.25] {
        for &alpha in &[0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
            let params = line_for_beta(beta, alpha)?;
            let disp = DispersionParams::from_line(&params)?;
            for n in 1..=5 {
                let fit = fit_conic(&element_orbit(&params, &disp, n, 256)?)?;
                if !fit.degenerate {
                    worst_orientation = f64::INFINITY;
                }
                worst_orientation = worst_orientation.max((fit.orientation - alpha).abs());
            }
        }
    }
    out.push(CheckResult::le(
        "orbit-degenerate-orientation",
        worst_orientation,
        1e-6,
    ));

    // Quadrature orbits are genuine ellipses centered on the rest point.
    let params = line_for_beta(0.5, FRAC_PI_4)?.with_phase_offset(FRAC_PI_2)?;
    let disp = DispersionParams::from_line(&params)?;
    let mut worst_fit: f64 = 0.0;
    let mut worst_center: f64 = 0.0;
    for n in 1..=5 {
        let fit = fit_conic(&element_orbit(&params, &disp, n, 256)?)?;
        worst_fit = worst_fit.max(fit.rms_residual / fit.semi_major);
        worst_center = worst_center.max(fit.center[0].hypot(fit.center[1]) / fit.semi_major);
    }
    out.push(CheckResult::le("orbit-quadrature-fit", worst_fit, 1e-8));
    out.push(CheckResult::le("orbit-center-at-rest", worst_center, 1e-9));

    // Orbital phase steps by exactly 2 tau per element below cutoff.
    let params = line_for_beta(0.5, FRAC_PI_6)?;
    let disp = DispersionParams::from_line(&params)?;
    let lags = phase_shift_along_line(&params, &disp, (1, 12))?;
    let mut worst_step: f64 = 0.0;
    for w in lags.windows(2) {
        let step = (w[1] - w[0]).rem_euclid(TAU);
        worst_step = worst_step.max((step - 2.0 * disp.tau).abs());
    }
    out.push(CheckResult::le("orbit-lag-step", worst_step, 1e-9));

    // Above cutoff the orbit amplitude decays by gamma_minus^2 per element.
    let params = line_for_beta(1.25, FRAC_PI_6)?;
    let disp = DispersionParams::from_line(&params)?;
    let g2 = disp.gamma_minus * disp.gamma_minus;
    let mut worst_ratio: f64 = 0.0;
    let mut prev = fit_conic(&element_orbit(&params, &disp, 1, 256)?)?;
    for n in 2..=8 {
        let fit = fit_conic(&element_orbit(&params, &disp, n, 256)?)?;
        worst_ratio = worst_ratio.max((fit.semi_major / prev.semi_major - g2).abs());
        prev = fit;
    }
    out.push(CheckResult::le("orbit-aperiodic-ratio", worst_ratio, 1e-10));

    Ok(out)
}

/// Minimal deterministic generator (splitmix64). Keeping it in-crate pins
/// the verify reports byte for byte across toolchain and dependency
/// upgrades.
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let unit = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        lo + (hi - lo) * unit
    }
}
