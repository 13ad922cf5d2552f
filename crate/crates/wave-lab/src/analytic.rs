//! Closed-form steady solutions of the driven chain.
//!
//! All phasors follow the convention that the physical displacement at time
//! `t` is `Re(phasor * e^{i omega t})`. The forced response of element `n`
//! (1-based, element 1 carries the drive) is, per regime:
//!
//! ```text
//! periodic   (beta < 1):  -i F0 cos(alpha) / (omega sqrt(s m)) * e^{-i (2n-1) tau}
//! aperiodic  (beta > 1):  (-1)^n F0 cos(alpha) / (omega sqrt(s m)) * gamma_minus^{2n-1}
//! critical   (beta = 1):  (-1)^n F0 cos(alpha) / (2 s)
//! ```
//!
//! with `sin(alpha)` in place of `cos(alpha)` for the transverse component,
//! which additionally carries the drive's transverse phase lag. The unforced
//! (free-vibration) mode shapes and the continuum limit of the chain live
//! here as well.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::line::{DispersionParams, LineParams, Regime};

/// Complex displacement phasor pair of one chain element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasorPair {
    /// Element index, 1-based.
    pub n: usize,
    /// Longitudinal displacement phasor (m).
    pub delta: Complex64,
    /// Transverse displacement phasor (m).
    pub y: Complex64,
}

impl PhasorPair {
    /// Physical displacement pair at time `t`: `Re(phasor e^{i omega t})`.
    pub fn at_time(&self, omega: f64, t: f64) -> (f64, f64) {
        let rot = Complex64::from_polar(1.0, omega * t);
        ((self.delta * rot).re, (self.y * rot).re)
    }
}

/// Steady forced displacement phasors of element `n`.
///
/// The regime stored in `disp` selects the branch; the transverse component
/// is the longitudinal one scaled by `tan(alpha)` and rotated by the
/// transverse drive lag.
pub fn forced_phasor(params: &LineParams, disp: &DispersionParams, n: usize) -> PhasorPair {
    debug_assert!(n >= 1, "element indices are 1-based");
    let common = match disp.regime {
        Regime::Periodic => {
            let amp = params.f0 / (params.omega * (params.s * params.m).sqrt());
            -Complex64::i() * amp * Complex64::from_polar(1.0, -((2 * n - 1) as f64) * disp.tau)
        }
        Regime::Aperiodic => {
            let amp = params.f0 / (params.omega * (params.s * params.m).sqrt());
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            Complex64::new(sign * amp * disp.gamma_minus.powi(2 * n as i32 - 1), 0.0)
        }
        Regime::Critical => {
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            Complex64::new(sign * params.f0 / (2.0 * params.s), 0.0)
        }
    };
    PhasorPair {
        n,
        delta: common * params.alpha.cos(),
        y: common * params.alpha.sin() * Complex64::from_polar(1.0, -params.phase_offset),
    }
}

/// One row of a real-displacement snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub n: usize,
    /// Longitudinal displacement (m).
    pub delta: f64,
    /// Transverse displacement (m).
    pub y: f64,
}

/// Real displacement profile of elements `1..=n_max` at time `t`.
pub fn forced_profile(
    params: &LineParams,
    disp: &DispersionParams,
    n_max: usize,
    t: f64,
) -> Vec<ProfilePoint> {
    (1..=n_max)
        .map(|n| {
            let (delta, y) = forced_phasor(params, disp, n).at_time(params.omega, t);
            ProfilePoint { n, delta, y }
        })
        .collect()
}

/// Prescription of a free-vibration mode: the displacement amplitude pair of
/// one reference element fixes the whole shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeShapeSpec {
    /// Index of the element whose amplitude is prescribed (1-based).
    pub k_ref: usize,
    /// Longitudinal amplitude at `k_ref` (m).
    pub x_k: f64,
    /// Transverse amplitude at `k_ref` (m).
    pub y_k: f64,
}

/// Unforced mode shape below cutoff:
/// `Delta_i = X_k cos((2i-1) tau) / cos((2k-1) tau)`, same for `y_i`.
///
/// Only defined in the periodic regime; errors when the prescription is
/// singular, i.e. the reference element sits on a node of the cosine shape.
pub fn free_mode_shape(
    spec: &ModeShapeSpec,
    disp: &DispersionParams,
    i_max: usize,
) -> Result<Vec<PhasorPair>> {
    if disp.regime != Regime::Periodic {
        return Err(Error::UnsupportedRegime(format!(
            "free mode shapes require beta < 1, got beta = {}",
            disp.beta
        )));
    }
    if spec.k_ref < 1 {
        return Err(Error::InvalidArgument(
            "reference element index must be >= 1".into(),
        ));
    }
    let denom = (((2 * spec.k_ref - 1) as f64) * disp.tau).cos();
    if denom.abs() < 1e-12 {
        return Err(Error::SingularModeShape {
            k_ref: spec.k_ref,
            magnitude: denom.abs(),
        });
    }
    Ok((1..=i_max)
        .map(|i| {
            let ratio = (((2 * i - 1) as f64) * disp.tau).cos() / denom;
            PhasorPair {
                n: i,
                delta: Complex64::new(spec.x_k * ratio, 0.0),
                y: Complex64::new(spec.y_k * ratio, 0.0),
            }
        })
        .collect())
}

/// Distributed-parameters (continuum) limit of the chain: linear density
/// `rho = m / a`, tension `T = s a`, wave speed `c = sqrt(T / rho)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumParams {
    /// Linear density (kg/m), > 0.
    pub rho: f64,
    /// Tension (N), > 0.
    pub tension: f64,
    /// Drive amplitude (N).
    pub f0: f64,
    /// Drive inclination (rad).
    pub alpha: f64,
    /// Angular drive frequency (rad/s), > 0.
    pub omega: f64,
}

impl ContinuumParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "density rho must be > 0, got {}",
                self.rho
            )));
        }
        if !(self.tension.is_finite() && self.tension > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tension must be > 0, got {}",
                self.tension
            )));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "drive frequency omega must be > 0, got {}",
                self.omega
            )));
        }
        Ok(())
    }

    /// Wave speed `sqrt(T / rho)` (m/s).
    pub fn wave_speed(&self) -> f64 {
        (self.tension / self.rho).sqrt()
    }

    /// Displacement amplitude `F0 / (omega sqrt(T rho))` of the continuum
    /// wave (m), before the `cos(alpha)` / `sin(alpha)` projection.
    pub fn amplitude(&self) -> f64 {
        self.f0 / (self.omega * (self.tension * self.rho).sqrt())
    }

    /// Complex displacement phasor pair of the material point at rest
    /// position `x0`.
    pub fn phasor_at(&self, x0: f64) -> (Complex64, Complex64) {
        let phase = -self.omega * x0 / self.wave_speed();
        let common = -Complex64::i() * self.amplitude() * Complex64::from_polar(1.0, phase);
        (common * self.alpha.cos(), common * self.alpha.sin())
    }
}

/// Parametric position of the material point at rest position `x0 >= 0`:
/// `(x0 + longitudinal displacement, transverse displacement)` at time `t`.
pub fn continuum_displacement(cp: &ContinuumParams, x0: f64, t: f64) -> (f64, f64) {
    // Re[-i e^{i phi}] = sin(phi)
    let phi = cp.omega * (t - x0 / cp.wave_speed());
    let amp = cp.amplitude();
    (
        x0 + amp * cp.alpha.cos() * phi.sin(),
        amp * cp.alpha.sin() * phi.sin(),
    )
}

/// One spacing level of the lumped-to-continuum comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    /// Element spacing (m).
    pub a: f64,
    /// Max unit-phasor deviation `|e^{-i (2n-1) tau} - e^{-i omega x0 / c}|`
    /// over all element rest positions `x0 = (n - 1/2) a <= x_max`,
    /// relative to the (equal) amplitude of the two waves.
    pub max_error: f64,
}

/// Result of a lumped-to-continuum grid refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Order estimates from consecutive spacing pairs.
    pub pairwise_orders: Vec<f64>,
    /// Least-squares slope of `ln(error)` vs `ln(a)`.
    pub fitted_order: f64,
}

/// Compare the lumped steady wave against its continuum limit over a
/// sequence of decreasing spacings.
///
/// For each spacing the chain is rebuilt with `m = rho a`, `s = T / a`, and
/// the phase `(2n - 1) tau` of element `n` is compared with the continuum
/// phase `omega x0 / c` at the element's rest position `x0 = (n - 1/2) a`
/// (the driven end applies the force half a spacing before the first mass).
/// The per-spacing error is the worst unit-phasor deviation over all
/// elements with `x0 <= x_max`; the phase mismatch shrinks as `a^2`.
pub fn continuum_limit_report(
    cp: &ContinuumParams,
    a_values: &[f64],
    x_max: f64,
) -> Result<ConvergenceTable> {
    cp.validate()?;
    if a_values.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one spacing value is required".into(),
        ));
    }
    if a_values.windows(2).any(|w| w[1] >= w[0]) || a_values.iter().any(|&a| a <= 0.0) {
        return Err(Error::InvalidArgument(
            "spacing values must be positive and strictly decreasing".into(),
        ));
    }
    if !(x_max.is_finite() && x_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "comparison span x_max must be > 0, got {x_max}"
        )));
    }

    let c = cp.wave_speed();
    let mut rows = Vec::with_capacity(a_values.len());
    for &a in a_values {
        let line = LineParams::new(cp.rho * a, cp.tension / a, a, cp.f0, cp.alpha, cp.omega)?;
        let disp = DispersionParams::from_line(&line)?;
        if disp.regime != Regime::Periodic {
            return Err(Error::InvalidParameter(format!(
                "spacing a = {a} puts the lumped chain at or above cutoff (beta = {}); \
                 refine until beta < 1",
                disp.beta
            )));
        }
        let n_count = ((x_max / a + 0.5).floor() as usize).max(1);
        let mut worst: f64 = 0.0;
        for n in 1..=n_count {
            let x0 = (n as f64 - 0.5) * a;
            let lumped = Complex64::from_polar(1.0, -((2 * n - 1) as f64) * disp.tau);
            let continuum = Complex64::from_polar(1.0, -cp.omega * x0 / c);
            worst = worst.max((lumped - continuum).norm());
        }
        rows.push(ConvergenceRow {
            a,
            max_error: worst,
        });
    }

    let pairwise_orders = rows
        .windows(2)
        .map(|w| (w[0].max_error / w[1].max_error).ln() / (w[0].a / w[1].a).ln())
        .collect();
    let fitted_order = fit_log_slope(
        &rows.iter().map(|r| r.a).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.max_error).collect::<Vec<_>>(),
    );
    Ok(ConvergenceTable {
        rows,
        pairwise_orders,
        fitted_order,
    })
}

/// Least-squares slope of `ln(y)` against `ln(x)`.
pub(crate) fn fit_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.max(1e-300).ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
