//! Acceptance suite: one test per verification criterion, each printing a
//! `[criterion N] PASS/FAIL` line with the measured metric (run with
//! `cargo test --test acceptance -- --nocapture` to see the lines).
//!
//! Criterion 3's above-cutoff half asserts first-order continuity of the
//! forced amplitudes across the cutoff. The decay root
//! `gamma_minus = beta - sqrt(beta^2 - 1)` has a square-root branch point at
//! `beta = 1`, so the deviation at element n is
//! `1 - gamma^{2n-1}/beta ~ (2n-1) sqrt(2 eps)` — about 8.1e-2 at
//! `eps = 1e-5`, n = 10, three orders of magnitude above the 1e-4 bound
//! asked for. The test states the bound faithfully and is expected to fail;
//! the message carries the measured value and the governing law.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI, TAU};

use num_complex::Complex64;
use rand::prelude::*;

use wave_lab::analytic::{continuum_limit_report, forced_phasor, ContinuumParams};
use wave_lab::implicit::{
    dalembert_eval, pde_residual_fd_with_speed_scale, C2Fn, FdGrid, ImplicitWaveSpec,
    InclinedSineSpec,
};
use wave_lab::line::{DispersionParams, LineParams};
use wave_lab::steady_state::{recurrence_residual, solve_steady_chain, Termination};
use wave_lab::time_domain::{simulate, steady_state_extract, SimConfig};
use wave_lab::trajectory::{element_orbit, fit_conic, phase_shift_along_line};

fn line_for_beta(beta: f64, alpha: f64) -> LineParams {
    LineParams::new(1.0, 1.0, 1.0, 1.0, alpha, 2.0 * beta).unwrap()
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
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

fn report(criterion: &str, passed: bool, detail: &str) {
    println!(
        "[criterion {criterion}] {} {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
}

/// 1. Closed forms vs the matched tridiagonal solve: max relative error
///    over the full beta x alpha grid, elements 1..100, below 1e-10.
#[test]
fn criterion_01_analytic_oracle_equivalence() {
    let mut worst: f64 = 0.0;
    for &beta in &[0.3, 0.5, 0.7, 0.9, 1.1, 1.25, 2.0] {
        for &alpha in &[0.0, FRAC_PI_6, FRAC_PI_3, FRAC_PI_2] {
            let params = line_for_beta(beta, alpha);
            let disp = DispersionParams::from_line(&params).unwrap();
            let solve = solve_steady_chain(&params, 200, Termination::Matched).unwrap();
            for n in 1..=100 {
                let exact = forced_phasor(&params, &disp, n);
                let got = &solve.amplitudes[n - 1];
                worst = worst.max(rel_err(got.delta, exact.delta));
                worst = worst.max(rel_err(got.y, exact.y));
            }
        }
    }
    let passed = worst < 1e-10;
    report(
        "1",
        passed,
        &format!("max relative error {worst:.3e} (< 1e-10)"),
    );
    assert!(passed, "analytic-oracle equivalence: {worst:.3e} >= 1e-10");
}

/// 2. The closed-form phasors satisfy every driven and interior equation
///    with normalized residual below 1e-12 in all three regimes.
#[test]
fn criterion_02_recurrence_residuals() {
    let mut worst: f64 = 0.0;
    for &beta in &[0.5, 1.0, 1.25] {
        let params = line_for_beta(beta, FRAC_PI_6)
            .with_phase_offset(0.3)
            .unwrap();
        let disp = DispersionParams::from_line(&params).unwrap();
        let pairs: Vec<_> = (1..=100)
            .map(|n| forced_phasor(&params, &disp, n))
            .collect();
        worst = worst.max(recurrence_residual(&pairs, &params));
    }
    let passed = worst < 1e-12;
    report(
        "2",
        passed,
        &format!("max normalized residual {worst:.3e} (< 1e-12)"),
    );
    assert!(passed, "recurrence residual {worst:.3e} >= 1e-12");
}

/// 3. Continuity across the cutoff at beta = 1 +/- 1e-5 against the
///    critical amplitude F0 cos(alpha) / (2s), tolerance 1e-4 relative.
#[test]
fn criterion_03_critical_continuity() {
    let eps = 1e-5;
    let alpha = FRAC_PI_3;
    let critical = line_for_beta(1.0, alpha);
    let ref_delta = critical.f0 * alpha.cos() / (2.0 * critical.s);
    let ref_y = critical.f0 * alpha.sin() / (2.0 * critical.s);

    let mut worst_below: f64 = 0.0;
    let below = line_for_beta(1.0 - eps, alpha);
    let disp_below = DispersionParams::from_line(&below).unwrap();
    for n in 1..=10 {
        let p = forced_phasor(&below, &disp_below, n);
        worst_below = worst_below.max((p.delta.norm() / ref_delta - 1.0).abs());
        worst_below = worst_below.max((p.y.norm() / ref_y - 1.0).abs());
    }

    let mut worst_above: f64 = 0.0;
    let above = line_for_beta(1.0 + eps, alpha);
    let disp_above = DispersionParams::from_line(&above).unwrap();
    for n in 1..=10 {
        let p = forced_phasor(&above, &disp_above, n);
        worst_above = worst_above.max((p.delta.norm() / ref_delta - 1.0).abs());
        worst_above = worst_above.max((p.y.norm() / ref_y - 1.0).abs());
    }

    let passed = worst_below <= 1e-4 && worst_above <= 1e-4;
    report(
        "3",
        passed,
        &format!(
            "max relative deviation below cutoff {worst_below:.3e}, above cutoff {worst_above:.3e} (<= 1e-4)"
        ),
    );
    assert!(
        worst_below <= 1e-4,
        "below-cutoff deviation {worst_below:.3e} > 1e-4"
    );
    // Expected failure: gamma_minus(1 + eps) = 1 - sqrt(2 eps) + O(eps), so
    // the amplitude at element n deviates by ~ (2n - 1) sqrt(2 eps): about
    // 8.1e-2 at n = 10, eps = 1e-5. First-order (O(eps)) continuity across
    // the cutoff does not exist on the evanescent side.
    assert!(
        worst_above <= 1e-4,
        "above-cutoff deviation {worst_above:.3e} > 1e-4: the decay root has a \
         square-root branch point at the cutoff, so the attainable bound at \
         eps = 1e-5, n <= 10 is (2n-1) sqrt(2 eps) ~ 8.5e-2, not 1e-4"
    );
}

const SIM_ELEMENTS: usize = 300;
const SIM_ABSORBER: usize = 80;

fn extraction_errors(params: &LineParams, periods: f64, spp: usize) -> (f64, f64) {
    let disp = DispersionParams::from_line(params).unwrap();
    let cfg = SimConfig {
        n_elements: SIM_ELEMENTS,
        dt: params.drive_period() / spp as f64,
        t_end: periods * params.drive_period(),
        absorber_len: SIM_ABSORBER,
        absorber_max_damping: 0.6 * params.omega,
        sample_every: (spp / 25).max(1),
    };
    let rec = simulate(params, &cfg).unwrap();
    let period = params.drive_period();
    let ext = steady_state_extract(
        &rec,
        params.omega,
        ((periods - 30.0) * period, periods * period),
    )
    .unwrap();
    let peak = forced_phasor(params, &disp, 1);
    let peak_scale = peak.delta.norm().max(peak.y.norm());
    let mut amp_err: f64 = 0.0;
    let mut phase_err: f64 = 0.0;
    for n in 1..=20 {
        let exact = forced_phasor(params, &disp, n);
        let got = &ext.elements[n - 1];
        amp_err = amp_err.max((got.amp_delta - exact.delta.norm()).abs() / peak_scale);
        amp_err = amp_err.max((got.amp_y - exact.y.norm()).abs() / peak_scale);
        // Phase is meaningful while the steady amplitude clears half a
        // percent of the profile peak; below that the lingering band-edge
        // switch-on background (~1e-4 of the peak) owns the angle.
        if exact.delta.norm() > 5e-3 * peak_scale {
            phase_err = phase_err.max(wrap_angle(got.phase_delta - exact.delta.arg()).abs());
        }
        if exact.y.norm() > 5e-3 * peak_scale {
            phase_err = phase_err.max(wrap_angle(got.phase_y - exact.y.arg()).abs());
        }
    }
    (amp_err, phase_err)
}

/// 4. Time-domain reproduction: after 200 drive periods the extracted
///    amplitude profile matches the closed forms within 1% (relative to
///    the profile peak) and phases within 0.05 rad on elements 1..20;
///    halving dt improves the amplitude error by about four.
#[test]
fn criterion_04_time_domain_reproduction() {
    let mut all_pass = true;
    for &beta in &[0.5, 1.25] {
        let params = line_for_beta(beta, FRAC_PI_6);
        let (amp_err, phase_err) = extraction_errors(&params, 200.0, 200);
        let pass = amp_err < 1e-2 && phase_err < 0.05;
        all_pass &= pass;
        report(
            "4",
            pass,
            &format!(
                "beta = {beta}: amplitude error {amp_err:.3e} (< 1e-2), phase error {phase_err:.3e} (< 0.05)"
            ),
        );
        assert!(
            pass,
            "beta {beta}: amp {amp_err:.3e}, phase {phase_err:.3e}"
        );
    }

    let params = line_for_beta(0.5, FRAC_PI_6);
    let (coarse, _) = extraction_errors(&params, 300.0, 64);
    let (fine, _) = extraction_errors(&params, 300.0, 128);
    let ratio = coarse / fine;
    let pass = (3.0..=5.5).contains(&ratio);
    all_pass &= pass;
    report(
        "4",
        pass,
        &format!("dt halving: amplitude error {coarse:.3e} -> {fine:.3e}, ratio {ratio:.2} (~4)"),
    );
    assert!(all_pass, "dt convergence ratio {ratio}");
}

/// 5. Lumped phase converges to the continuum phase at observed order >= 2
///    over spacings {1e-1, 1e-2, 1e-3}.
#[test]
fn criterion_05_continuum_limit() {
    let cp = ContinuumParams {
        rho: 1.0,
        tension: 1.0,
        f0: 1.0,
        alpha: FRAC_PI_6,
        omega: 1.0,
    };
    let table = continuum_limit_report(&cp, &[1e-1, 1e-2, 1e-3], TAU).unwrap();
    let min_order = table
        .pairwise_orders
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let decreasing = table
        .rows
        .windows(2)
        .all(|w| w[1].max_error < w[0].max_error);
    // 1.99 absorbs the +-0.003 jitter from the element grid quantizing the
    // comparison span differently at each spacing.
    let passed = min_order >= 1.99 && decreasing;
    report(
        "5",
        passed,
        &format!(
            "errors {:?}, observed orders {:?} (>= 2)",
            table.rows.iter().map(|r| r.max_error).collect::<Vec<_>>(),
            table.pairwise_orders
        ),
    );
    assert!(passed, "continuum orders {:?}", table.pairwise_orders);
}

fn acceptance_sine() -> ImplicitWaveSpec {
    InclinedSineSpec {
        c_amp: 0.5,
        alpha: FRAC_PI_3,
        k: 1.0,
        omega: 1.0,
    }
    .to_wave_spec()
    .unwrap()
}

/// 6. The finite-difference residual of the inclined sine converges to
///    zero at observed order >= 2 over h in {2e-3, 1e-3, 5e-4}; the
///    wrong-speed control does not converge.
#[test]
fn criterion_06_implicit_certification() {
    let spec = acceptance_sine();
    // ht = 2 hx: along hx = c ht the truncation terms of the two central
    // differences cancel identically (k = omega here), which would hide
    // the real convergence order.
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
        let rep = pde_residual_fd_with_speed_scale(&spec, &grid, 1.0).unwrap();
        residuals.push(rep.max_residual / rep.normalization);
    }
    let orders: Vec<f64> = residuals.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);

    let control_grid = FdGrid {
        x0: 0.0,
        t0: 0.0,
        nx: (TAU / 5e-4) as usize + 1,
        nt: 5,
        hx: 5e-4,
        ht: 1e-3,
        seed: 0.0,
    };
    let control = pde_residual_fd_with_speed_scale(&spec, &control_grid, 1.1).unwrap();
    let control_residual = control.max_residual / control.normalization;

    let passed = min_order >= 1.95 && control_residual > 1e-2;
    report(
        "6",
        passed,
        &format!(
            "normalized residuals {residuals:?}, orders {orders:?} (>= 2); \
             wrong-speed control residual {control_residual:.3e} (must stay > 1e-2)"
        ),
    );
    assert!(passed, "orders {orders:?}, control {control_residual:.3e}");
}

/// 7. Analytic first and second derivatives match central finite
///    differences with observed order >= 2 at 100 random valid points.
#[test]
fn criterion_07_derivative_formulas() {
    let spec = acceptance_sine();
    let cot = 1.0 / FRAC_PI_3.tan();
    let mut rng = StdRng::seed_from_u64(2024);
    let mut min_order = f64::INFINITY;
    let mut checked = 0;
    let mut measured = 0;
    while checked < 100 {
        let x = rng.random_range(-4.0..4.0);
        let t = rng.random_range(-4.0..4.0);
        let y = spec.eval(x, t, Some(0.0)).unwrap();
        let a = spec.phase(x, t, y);
        if (0.5 * a.cos() * cot).abs() > 0.9 {
            continue;
        }
        let exact = spec.derivatives(x, t, y).unwrap();
        let fd = |h: f64| -> [f64; 4] {
            let e = |dx: f64, dt: f64| spec.eval(x + dx, t + dt, Some(y)).unwrap();
            [
                (e(h, 0.0) - e(-h, 0.0)) / (2.0 * h),
                (e(0.0, h) - e(0.0, -h)) / (2.0 * h),
                (e(h, 0.0) - 2.0 * y + e(-h, 0.0)) / (h * h),
                (e(0.0, h) - 2.0 * y + e(0.0, -h)) / (h * h),
            ]
        };
        let coarse = fd(1e-3);
        let fine = fd(5e-4);
        let exact_arr = [exact.dy_dx, exact.dy_dt, exact.d2y_dx2, exact.d2y_dt2];
        for idx in 0..4 {
            let e1 = (coarse[idx] - exact_arr[idx]).abs();
            let e2 = (fine[idx] - exact_arr[idx]).abs();
            // Below ~2e-7 the truncation error drowns in the h^-2-amplified
            // round-off of the solved values and carries no order signal;
            // those points already match to finite-difference precision.
            if e1 > 2e-7 {
                min_order = min_order.min((e1 / e2).log2());
                measured += 1;
            } else {
                assert!(e2 < 1e-6, "already at the floor but fine error {e2:.3e}");
            }
        }
        checked += 1;
    }
    let passed = min_order >= 1.9 && measured >= 40;
    report(
        "7",
        passed,
        &format!("min observed order {min_order:.3} over {measured} resolvable components (>= 2)"),
    );
    assert!(passed, "derivative order {min_order} ({measured} measured)");
}

/// 8. With psi = 0 the implicit evaluator equals the d'Alembert form to
///    1e-12 at 1000 random points.
#[test]
fn criterion_08_degeneration() {
    let spec = ImplicitWaveSpec::new(C2Fn::scaled_sin(0.9), C2Fn::zero(), 1.7, 2.3, 1.2)
        .unwrap()
        .with_counter_wave(
            C2Fn::new(|u| 0.3 * u.cos(), |u| -0.3 * u.sin(), |u| -0.3 * u.cos()),
            C2Fn::zero(),
        )
        .unwrap();
    let phi1 = C2Fn::scaled_sin(0.9);
    let phi2 = C2Fn::new(|u| 0.3 * u.cos(), |u| -0.3 * u.sin(), |u| -0.3 * u.cos());
    let mut rng = StdRng::seed_from_u64(4096);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let x = rng.random_range(-8.0..8.0);
        let t = rng.random_range(-8.0..8.0);
        let implicit = spec.eval(x, t, Some(0.0)).unwrap();
        let explicit = dalembert_eval(&phi1, &phi2, 1.7, 2.3, x, t);
        worst = worst.max((implicit - explicit).abs());
    }
    let passed = worst < 1e-12;
    report(
        "8",
        passed,
        &format!("max |implicit - explicit| = {worst:.3e} (< 1e-12)"),
    );
    assert!(passed, "degeneration deviation {worst:.3e}");
}

/// 9. eval(x + d, t + k d / w) == eval(x, t) to 1e-10 at 100 random
///    (x, t, d) triples.
#[test]
fn criterion_09_travelling_invariance() {
    let spec = acceptance_sine();
    let mut rng = StdRng::seed_from_u64(517);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = rng.random_range(-5.0..5.0);
        let t = rng.random_range(-5.0..5.0);
        let delta = rng.random_range(-10.0..10.0);
        let y0 = spec.eval(x, t, Some(0.0)).unwrap();
        let y1 = spec
            .eval(x + delta, t + spec.k * delta / spec.omega, Some(y0))
            .unwrap();
        worst = worst.max((y1 - y0).abs());
    }
    let passed = worst < 1e-10;
    report(
        "9",
        passed,
        &format!("max shift deviation {worst:.3e} (< 1e-10)"),
    );
    assert!(passed, "travelling invariance deviation {worst:.3e}");
}

/// 10. Orbit geometry: in-phase orbits degenerate with orientation alpha
///     (1e-6 rad); quadrature orbits fit an ellipse with residual below
///     1e-8 of the major axis and center at the rest point to 1e-9;
///     consecutive orbital lags step by 2 tau to 1e-9; aperiodic orbit
///     amplitudes decay by gamma_minus^2 to 1e-10.
#[test]
fn criterion_10_orbits() {
    // In-phase: degenerate at alpha.
    let mut worst_orientation: f64 = 0.0;
    for &beta in &[0.5, 1.0, 1.25] {
        for &alpha in &[0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
            let params = line_for_beta(beta, alpha);
            let disp = DispersionParams::from_line(&params).unwrap();
            for n in 1..=5 {
                let fit = fit_conic(&element_orbit(&params, &disp, n, 256).unwrap()).unwrap();
                assert!(
                    fit.degenerate,
                    "beta {beta}, alpha {alpha}, n {n}: not degenerate"
                );
                worst_orientation = worst_orientation.max((fit.orientation - alpha).abs());
            }
        }
    }
    let pass_orientation = worst_orientation < 1e-6;
    report(
        "10",
        pass_orientation,
        &format!("degenerate orientation error {worst_orientation:.3e} (< 1e-6 rad)"),
    );

    // Quadrature: proper ellipses centered on the rest point.
    let params = line_for_beta(0.5, FRAC_PI_4)
        .with_phase_offset(FRAC_PI_2)
        .unwrap();
    let disp = DispersionParams::from_line(&params).unwrap();
    let mut worst_fit: f64 = 0.0;
    let mut worst_center: f64 = 0.0;
    for n in 1..=5 {
        let fit = fit_conic(&element_orbit(&params, &disp, n, 256).unwrap()).unwrap();
        worst_fit = worst_fit.max(fit.rms_residual / fit.semi_major);
        worst_center = worst_center.max(fit.center[0].hypot(fit.center[1]) / fit.semi_major);
    }
    let pass_quadrature = worst_fit < 1e-8 && worst_center < 1e-9;
    report(
        "10",
        pass_quadrature,
        &format!(
            "quadrature fit residual {worst_fit:.3e} (< 1e-8), center offset {worst_center:.3e} (< 1e-9)"
        ),
    );

    // Orbital phase lag steps by 2 tau below cutoff.
    let params = line_for_beta(0.5, FRAC_PI_6);
    let disp = DispersionParams::from_line(&params).unwrap();
    let lags = phase_shift_along_line(&params, &disp, (1, 12)).unwrap();
    let mut worst_step: f64 = 0.0;
    for w in lags.windows(2) {
        let step = (w[1] - w[0]).rem_euclid(TAU);
        worst_step = worst_step.max((step - 2.0 * disp.tau).abs());
    }
    let pass_lag = worst_step < 1e-9;
    report(
        "10",
        pass_lag,
        &format!("lag step error {worst_step:.3e} (< 1e-9)"),
    );

    // Aperiodic decay of the orbit amplitude.
    let params = line_for_beta(1.25, FRAC_PI_6);
    let disp = DispersionParams::from_line(&params).unwrap();
    let g2 = disp.gamma_minus * disp.gamma_minus;
    let mut worst_ratio: f64 = 0.0;
    let mut prev = fit_conic(&element_orbit(&params, &disp, 1, 256).unwrap()).unwrap();
    for n in 2..=8 {
        let fit = fit_conic(&element_orbit(&params, &disp, n, 256).unwrap()).unwrap();
        worst_ratio = worst_ratio.max((fit.semi_major / prev.semi_major - g2).abs());
        prev = fit;
    }
    let pass_ratio = worst_ratio < 1e-10;
    report(
        "10",
        pass_ratio,
        &format!("aperiodic amplitude ratio error {worst_ratio:.3e} (< 1e-10)"),
    );

    assert!(pass_orientation, "orientation {worst_orientation:.3e}");
    assert!(
        pass_quadrature,
        "fit {worst_fit:.3e}, center {worst_center:.3e}"
    );
    assert!(pass_lag, "lag step {worst_step:.3e}");
    assert!(pass_ratio, "ratio {worst_ratio:.3e}");
}

/// 11. Two `verify-all` runs with the same config produce byte-identical
///     CSV/JSON reports and exit 0.
#[test]
fn criterion_11_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_wave-lab");
    let base = std::env::temp_dir().join(format!("wave-lab-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out_dir = base.join(format!("run{run}"));
        let status = std::process::Command::new(bin)
            .args(["verify-all", "--out"])
            .arg(&out_dir)
            .output()
            .expect("binary runs");
        assert!(
            status.status.success(),
            "verify-all exited with {:?}:\n{}",
            status.status.code(),
            String::from_utf8_lossy(&status.stdout)
        );
        let csv = std::fs::read(out_dir.join("verify_report.csv")).unwrap();
        let json = std::fs::read(out_dir.join("verify_report.json")).unwrap();
        outputs.push((csv, json));
    }
    let identical = outputs[0] == outputs[1];
    report(
        "11",
        identical,
        "verify-all reports byte-identical across runs, exit 0",
    );
    assert!(identical, "verify-all outputs differ between runs");
    let _ = std::fs::remove_dir_all(&base);
}
