//! Time-domain oracle: direct integration of the coupled chain equations.
//!
//! The finite chain starts from rest and is driven at element 1 by the force
//! pair `(F0 cos(alpha) cos(wt), F0 sin(alpha) cos(wt - phase_offset))`. A
//! trailing absorber layer with quadratically ramped velocity damping soaks
//! up the outgoing wave, emulating the semi-infinite line. The integrator is
//! fixed-step kick-drift-kick (velocity Verlet): second order, symplectic
//! where undamped, and cheap enough to run hundreds of drive periods in
//! milliseconds.
//!
//! [`steady_state_extract`] turns a late window of the record into
//! per-element amplitude/phase pairs by least-squares fitting
//! `A cos(wt) + B sin(wt)`, which is what gets compared against the
//! closed-form solutions and the tridiagonal oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::line::LineParams;

/// Integration configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Chain length including the absorber, >= 3.
    pub n_elements: usize,
    /// Time step (s); must stay below a tenth of the cutoff-stability limit
    /// `2 / omega_cutoff`.
    pub dt: f64,
    /// End time (s).
    pub t_end: f64,
    /// Number of damped trailing elements, < n_elements / 2.
    pub absorber_len: usize,
    /// Peak damping rate (1/s) at the far end of the absorber; the rate
    /// ramps quadratically from zero across the layer.
    pub absorber_max_damping: f64,
    /// Record every k-th step (k >= 1).
    pub sample_every: usize,
}

impl SimConfig {
    /// Configuration sized in drive periods: `steps_per_period` steps each,
    /// with a default absorber occupying up to 60 trailing elements.
    pub fn for_periods(
        params: &LineParams,
        n_elements: usize,
        periods: f64,
        steps_per_period: usize,
    ) -> Self {
        let period = params.drive_period();
        let absorber_len = (n_elements / 2).saturating_sub(1).min(60);
        Self {
            n_elements,
            dt: period / steps_per_period as f64,
            t_end: periods * period,
            absorber_len,
            absorber_max_damping: 0.6 * params.omega,
            sample_every: (steps_per_period / 25).max(1),
        }
    }

    pub fn validate(&self, params: &LineParams) -> Result<()> {
        if self.n_elements < 3 {
            return Err(Error::InvalidParameter(format!(
                "simulation needs at least 3 elements, got {}",
                self.n_elements
            )));
        }
        let dt_limit = 0.1 * (2.0 / params.omega_cutoff());
        if !(self.dt > 0.0 && self.dt < dt_limit) {
            return Err(Error::InvalidParameter(format!(
                "dt = {} violates the stability headroom dt < {:.6e}",
                self.dt, dt_limit
            )));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be > 0, got {}",
                self.t_end
            )));
        }
        if self.absorber_len >= self.n_elements / 2 {
            return Err(Error::InvalidParameter(format!(
                "absorber_len = {} must stay below n_elements / 2 = {}",
                self.absorber_len,
                self.n_elements / 2
            )));
        }
        if !(self.absorber_max_damping >= 0.0 && self.absorber_max_damping.is_finite()) {
            return Err(Error::InvalidParameter(
                "absorber_max_damping must be finite and >= 0".into(),
            ));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidParameter("sample_every must be >= 1".into()));
        }
        Ok(())
    }
}

/// Full mechanical state of the chain at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub delta: Vec<f64>,
    pub y: Vec<f64>,
    pub vel_delta: Vec<f64>,
    pub vel_y: Vec<f64>,
}

impl ChainState {
    pub fn at_rest(n_elements: usize) -> Self {
        Self {
            delta: vec![0.0; n_elements],
            y: vec![0.0; n_elements],
            vel_delta: vec![0.0; n_elements],
            vel_y: vec![0.0; n_elements],
        }
    }

    fn max_abs(&self) -> f64 {
        self.delta
            .iter()
            .chain(&self.y)
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn is_finite(&self) -> bool {
        self.delta
            .iter()
            .chain(&self.y)
            .chain(&self.vel_delta)
            .chain(&self.vel_y)
            .all(|v| v.is_finite())
    }
}

/// Time-stamped chain trajectories, sampled at a uniform stride.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRecord {
    pub times: Vec<f64>,
    /// `delta[sample][element]`, likewise for the other fields.
    pub delta: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
    pub vel_delta: Vec<Vec<f64>>,
    pub vel_y: Vec<Vec<f64>>,
}

impl SimulationRecord {
    pub fn n_elements(&self) -> usize {
        self.delta.first().map_or(0, Vec::len)
    }

    pub fn n_samples(&self) -> usize {
        self.times.len()
    }
}

/// Integrate the driven chain from rest.
pub fn simulate(params: &LineParams, cfg: &SimConfig) -> Result<SimulationRecord> {
    simulate_from(params, cfg, ChainState::at_rest(cfg.n_elements))
}

/// Integrate the driven chain from an arbitrary initial state.
pub fn simulate_from(
    params: &LineParams,
    cfg: &SimConfig,
    initial: ChainState,
) -> Result<SimulationRecord> {
    params.validate()?;
    cfg.validate(params)?;
    let n = cfg.n_elements;
    if initial.delta.len() != n
        || initial.y.len() != n
        || initial.vel_delta.len() != n
        || initial.vel_y.len() != n
    {
        return Err(Error::InvalidArgument(format!(
            "initial state has wrong length (expected {n} elements)"
        )));
    }

    // Quadratic damping ramp across the trailing absorber layer.
    let mut damping = vec![0.0_f64; n];
    if cfg.absorber_len > 0 {
        let start = n - cfg.absorber_len;
        for j in 0..cfg.absorber_len {
            let u = (j + 1) as f64 / cfg.absorber_len as f64;
            damping[start + j] = cfg.absorber_max_damping * u * u;
        }
    }

    let blowup_scale = (params.f0 / params.s).max(initial.max_abs());
    let blowup_limit = if blowup_scale > 0.0 {
        1e6 * blowup_scale
    } else {
        f64::INFINITY
    };

    let drive_x = params.f0 * params.alpha.cos();
    let drive_y = params.f0 * params.alpha.sin();
    let omega = params.omega;
    let lag = params.phase_offset;
    let inv_m = 1.0 / params.m;
    let s = params.s;
    let dt = cfg.dt;
    let half_dt = 0.5 * dt;
    let n_steps = (cfg.t_end / dt).round() as usize;

    let mut state = initial;
    let mut acc_x = vec![0.0_f64; n];
    let mut acc_y = vec![0.0_f64; n];

    // Elastic + drive + damping acceleration for one axis.
    let accel = |pos: &[f64], vel: &[f64], drive: f64, damping: &[f64], out: &mut [f64]| {
        out[0] = (drive + s * (pos[1] - pos[0])) * inv_m - damping[0] * vel[0];
        for i in 1..n - 1 {
            out[i] = s * (pos[i + 1] + pos[i - 1] - 2.0 * pos[i]) * inv_m - damping[i] * vel[i];
        }
        out[n - 1] = s * (pos[n - 2] - pos[n - 1]) * inv_m - damping[n - 1] * vel[n - 1];
    };

    let estimated = n_steps / cfg.sample_every + 2;
    let mut record = SimulationRecord {
        times: Vec::with_capacity(estimated),
        delta: Vec::with_capacity(estimated),
        y: Vec::with_capacity(estimated),
        vel_delta: Vec::with_capacity(estimated),
        vel_y: Vec::with_capacity(estimated),
    };
    record.times.push(0.0);
    record.delta.push(state.delta.clone());
    record.y.push(state.y.clone());
    record.vel_delta.push(state.vel_delta.clone());
    record.vel_y.push(state.vel_y.clone());

    let fx = |t: f64| drive_x * (omega * t).cos();
    let fy = |t: f64| drive_y * (omega * t - lag).cos();

    accel(
        &state.delta,
        &state.vel_delta,
        fx(0.0),
        &damping,
        &mut acc_x,
    );
    accel(&state.y, &state.vel_y, fy(0.0), &damping, &mut acc_y);

    for step in 1..=n_steps {
        let t_next = step as f64 * dt;

        // Kick + drift.
        for i in 0..n {
            state.vel_delta[i] += half_dt * acc_x[i];
            state.vel_y[i] += half_dt * acc_y[i];
            state.delta[i] += dt * state.vel_delta[i];
            state.y[i] += dt * state.vel_y[i];
        }
        // Second kick with accelerations at the new positions (damping is
        // evaluated on the half-step velocities).
        accel(
            &state.delta,
            &state.vel_delta,
            fx(t_next),
            &damping,
            &mut acc_x,
        );
        accel(&state.y, &state.vel_y, fy(t_next), &damping, &mut acc_y);
        for i in 0..n {
            state.vel_delta[i] += half_dt * acc_x[i];
            state.vel_y[i] += half_dt * acc_y[i];
        }
        // Refresh the damping contribution with the settled velocities so
        // the next first kick sees a consistent state.
        accel(
            &state.delta,
            &state.vel_delta,
            fx(t_next),
            &damping,
            &mut acc_x,
        );
        accel(&state.y, &state.vel_y, fy(t_next), &damping, &mut acc_y);

        let magnitude = state.max_abs();
        if !state.is_finite() || magnitude > blowup_limit {
            return Err(Error::Unstable {
                step,
                time: t_next,
                magnitude,
                limit: blowup_limit,
            });
        }
        if step % cfg.sample_every == 0 {
            record.times.push(t_next);
            record.delta.push(state.delta.clone());
            record.y.push(state.y.clone());
            record.vel_delta.push(state.vel_delta.clone());
            record.vel_y.push(state.vel_y.clone());
        }
    }
    Ok(record)
}

/// Per-element steady-state harmonics extracted from a record window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementHarmonics {
    /// Longitudinal amplitude (m).
    pub amp_delta: f64,
    /// Longitudinal phase (rad): displacement = amp * cos(wt + phase).
    pub phase_delta: f64,
    /// Transverse amplitude (m).
    pub amp_y: f64,
    /// Transverse phase (rad).
    pub phase_y: f64,
    /// RMS misfit of the harmonic model over the window, relative to the
    /// larger of the two amplitudes.
    pub fit_residual: f64,
}

/// Harmonic extraction across the whole chain.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicExtraction {
    pub elements: Vec<ElementHarmonics>,
    /// The window actually used (s).
    pub window: (f64, f64),
}

/// Least-squares fit of `A cos(wt) + B sin(wt)` per element and axis over
/// `window`, which must lie inside the record and span at least five full
/// periods. Amplitude is `sqrt(A^2 + B^2)` and phase `atan2(-B, A)`, so the
/// fitted motion is `amp * cos(wt + phase)` — directly comparable to the
/// argument of a steady phasor.
pub fn steady_state_extract(
    rec: &SimulationRecord,
    omega: f64,
    window: (f64, f64),
) -> Result<HarmonicExtraction> {
    let (t0, t1) = window;
    if rec.times.is_empty() {
        return Err(Error::InvalidArgument("record is empty".into()));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "omega must be > 0, got {omega}"
        )));
    }
    let eps = 1e-9 * (1.0 + t1.abs());
    if t0 < rec.times[0] - eps || t1 > rec.times[rec.times.len() - 1] + eps || t1 <= t0 {
        return Err(Error::InvalidArgument(format!(
            "window [{t0}, {t1}] does not lie inside the record [{}, {}]",
            rec.times[0],
            rec.times[rec.times.len() - 1]
        )));
    }
    let min_span = 5.0 * std::f64::consts::TAU / omega;
    if t1 - t0 < min_span * (1.0 - 1e-9) {
        return Err(Error::InvalidArgument(format!(
            "window spans {:.6} s but at least five periods ({:.6} s) are required",
            t1 - t0,
            min_span
        )));
    }

    let idx: Vec<usize> = (0..rec.times.len())
        .filter(|&i| rec.times[i] >= t0 - eps && rec.times[i] <= t1 + eps)
        .collect();
    if idx.len() < 8 {
        return Err(Error::InvalidArgument(format!(
            "window holds only {} samples; need at least 8",
            idx.len()
        )));
    }

    let cos_t: Vec<f64> = idx.iter().map(|&i| (omega * rec.times[i]).cos()).collect();
    let sin_t: Vec<f64> = idx.iter().map(|&i| (omega * rec.times[i]).sin()).collect();
    let m = idx.len() as f64;
    let scc: f64 = cos_t.iter().map(|c| c * c).sum();
    let scs: f64 = cos_t.iter().zip(&sin_t).map(|(c, s)| c * s).sum();
    let sss: f64 = sin_t.iter().map(|s| s * s).sum();
    let det = scc * sss - scs * scs;
    if det.abs() < 1e-9 * (scc.max(sss) * scc.max(sss)) {
        return Err(Error::InvalidArgument(
            "harmonic design matrix is singular over this window".into(),
        ));
    }

    let fit_axis = |series: &dyn Fn(usize) -> f64| -> (f64, f64, f64) {
        let mut scf = 0.0;
        let mut ssf = 0.0;
        for (k, &i) in idx.iter().enumerate() {
            let v = series(i);
            scf += cos_t[k] * v;
            ssf += sin_t[k] * v;
        }
        let a = (sss * scf - scs * ssf) / det;
        let b = (scc * ssf - scs * scf) / det;
        let mut misfit = 0.0;
        for (k, &i) in idx.iter().enumerate() {
            let r = series(i) - a * cos_t[k] - b * sin_t[k];
            misfit += r * r;
        }
        (a.hypot(b), (-b).atan2(a), (misfit / m).sqrt())
    };

    let n = rec.n_elements();
    let mut elements = Vec::with_capacity(n);
    for e in 0..n {
        let (amp_d, phase_d, rms_d) = fit_axis(&|i| rec.delta[i][e]);
        let (amp_y, phase_y, rms_y) = fit_axis(&|i| rec.y[i][e]);
        let scale = amp_d.max(amp_y);
        let fit_residual = if scale > 0.0 {
            rms_d.max(rms_y) / scale
        } else {
            0.0
        };
        elements.push(ElementHarmonics {
            amp_delta: amp_d,
            phase_delta: phase_d,
            amp_y,
            phase_y,
            fit_residual,
        });
    }
    Ok(HarmonicExtraction {
        elements,
        window: (t0, t1),
    })
}

/// Total mechanical energy (kinetic + spring potential) per record sample,
/// absorber region included.
pub fn energy_series(rec: &SimulationRecord, params: &LineParams) -> Vec<f64> {
    let n = rec.n_elements();
    (0..rec.n_samples())
        .map(|k| {
            let mut kinetic = 0.0;
            for i in 0..n {
                kinetic +=
                    rec.vel_delta[k][i] * rec.vel_delta[k][i] + rec.vel_y[k][i] * rec.vel_y[k][i];
            }
            let mut potential = 0.0;
            for i in 0..n - 1 {
                let dd = rec.delta[k][i + 1] - rec.delta[k][i];
                let dy = rec.y[k][i + 1] - rec.y[k][i];
                potential += dd * dd + dy * dy;
            }
            0.5 * params.m * kinetic + 0.5 * params.s * potential
        })
        .collect()
}
