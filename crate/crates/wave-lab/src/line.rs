//! Physical description of the lumped line and its derived regime parameters.
//!
//! The line is a semi-infinite chain of identical point masses `m` coupled by
//! springs of stiffness `s` and spacing `a`, driven at its first element by a
//! harmonic force of amplitude `F0` inclined by angle `alpha` to the chain
//! axis. Everything downstream is controlled by the dimensionless frequency
//! ratio
//!
//! ```text
//! beta = (omega / 2) * sqrt(m / s) = omega / omega_cutoff
//! ```
//!
//! where `omega_cutoff = 2 sqrt(s / m)` is the highest frequency the chain
//! propagates. Below cutoff (`beta < 1`) the steady response is a travelling
//! wave with phase step `tau = asin(beta)` per half element; above cutoff
//! (`beta > 1`) it is an evanescent, sign-alternating profile governed by the
//! roots `gamma = beta -/+ sqrt(beta^2 - 1)` of `gamma^2 - 2 beta gamma + 1 = 0`;
//! at cutoff both descriptions coincide.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default half-width of the band around `beta = 1` classified as critical.
pub const DEFAULT_CLASSIFICATION_TOL: f64 = 1e-9;

/// Physical parameters of the driven chain.
///
/// Units are SI throughout: kg, N/m, m, N, rad, rad/s. The `Default` value
/// is the unit demo chain (`m = s = a = F0 = 1`) driven at half its cutoff
/// with a 30-degree inclination; fields missing from a config file fall
/// back to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LineParams {
    /// Mass per element (kg), > 0.
    pub m: f64,
    /// Spring stiffness (N/m), > 0.
    pub s: f64,
    /// Inter-element spacing (m), > 0.
    pub a: f64,
    /// Drive force amplitude (N), >= 0.
    pub f0: f64,
    /// Drive inclination to the chain axis (rad), in [0, pi/2].
    pub alpha: f64,
    /// Angular drive frequency (rad/s), > 0.
    pub omega: f64,
    /// Phase lag of the transverse drive component relative to the
    /// longitudinal one (rad). Zero reproduces a drive whose two force
    /// projections oscillate in phase; nonzero values open the element
    /// orbits from straight segments into proper ellipses.
    #[serde(default)]
    pub phase_offset: f64,
}

impl Default for LineParams {
    fn default() -> Self {
        Self {
            m: 1.0,
            s: 1.0,
            a: 1.0,
            f0: 1.0,
            alpha: std::f64::consts::FRAC_PI_6,
            omega: 1.0,
            phase_offset: 0.0,
        }
    }
}

impl LineParams {
    /// Build a parameter set with in-phase force projections
    /// (`phase_offset = 0`) and validate it.
    pub fn new(m: f64, s: f64, a: f64, f0: f64, alpha: f64, omega: f64) -> Result<Self> {
        let params = Self {
            m,
            s,
            a,
            f0,
            alpha,
            omega,
            phase_offset: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Same parameters with a transverse phase lag.
    pub fn with_phase_offset(mut self, phase_offset: f64) -> Result<Self> {
        self.phase_offset = phase_offset;
        self.validate()?;
        Ok(self)
    }

    /// Check every domain invariant; the message names the violated one.
    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, msg: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter(msg.to_string()))
            }
        }
        check(
            self.m.is_finite() && self.m > 0.0,
            &format!("mass m must be > 0, got {}", self.m),
        )?;
        check(
            self.s.is_finite() && self.s > 0.0,
            &format!("stiffness s must be > 0, got {}", self.s),
        )?;
        check(
            self.a.is_finite() && self.a > 0.0,
            &format!("spacing a must be > 0, got {}", self.a),
        )?;
        check(
            self.f0.is_finite() && self.f0 >= 0.0,
            &format!("force amplitude f0 must be >= 0, got {}", self.f0),
        )?;
        check(
            self.alpha.is_finite() && (0.0..=std::f64::consts::FRAC_PI_2).contains(&self.alpha),
            &format!(
                "inclination alpha must lie in [0, pi/2], got {}",
                self.alpha
            ),
        )?;
        check(
            self.omega.is_finite() && self.omega > 0.0,
            &format!("drive frequency omega must be > 0, got {}", self.omega),
        )?;
        check(self.phase_offset.is_finite(), "phase_offset must be finite")?;
        Ok(())
    }

    /// Cutoff frequency `2 sqrt(s / m)` of the chain (rad/s).
    pub fn omega_cutoff(&self) -> f64 {
        2.0 * (self.s / self.m).sqrt()
    }

    /// Drive period `2 pi / omega` (s).
    pub fn drive_period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }

    /// Static displacement scale `f0 / s` (m).
    pub fn static_scale(&self) -> f64 {
        self.f0 / self.s
    }
}

/// Drive regime relative to the chain cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `beta < 1`: propagating steady wave.
    Periodic,
    /// `beta = 1` within the classification tolerance.
    Critical,
    /// `beta > 1`: evanescent, sign-alternating response.
    Aperiodic,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Periodic => write!(f, "periodic"),
            Regime::Critical => write!(f, "critical"),
            Regime::Aperiodic => write!(f, "aperiodic"),
        }
    }
}

/// Classify a frequency ratio against the cutoff.
///
/// `Critical` wins inside the band `|beta - 1| <= tol`; outside it the sign
/// of `beta - 1` decides.
pub fn classify_regime(beta: f64, tol: f64) -> Result<Regime> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "frequency ratio beta must be >= 0, got {beta}"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "classification tolerance must be > 0, got {tol}"
        )));
    }
    if (beta - 1.0).abs() <= tol {
        Ok(Regime::Critical)
    } else if beta < 1.0 {
        Ok(Regime::Periodic)
    } else {
        Ok(Regime::Aperiodic)
    }
}

/// Derived regime quantities of a driven chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionParams {
    /// Frequency ratio `omega / omega_cutoff`.
    pub beta: f64,
    /// Phase step per half element (rad): `asin(beta)` below cutoff,
    /// saturating at `pi/2` from the critical point on.
    pub tau: f64,
    /// Magnitude of the decaying amplitude root. Below cutoff the two roots
    /// of `gamma^2 - 2 beta gamma + 1 = 0` are complex with unit magnitude
    /// and 1.0 is stored; at and above cutoff this is `beta - sqrt(beta^2 - 1)`.
    pub gamma_minus: f64,
    /// Magnitude of the growing root, `beta + sqrt(beta^2 - 1)` above cutoff.
    pub gamma_plus: f64,
    /// Regime classification.
    pub regime: Regime,
}

impl DispersionParams {
    /// Derive the regime parameters of `params` with the default
    /// classification tolerance.
    pub fn from_line(params: &LineParams) -> Result<Self> {
        Self::from_line_with_tol(params, DEFAULT_CLASSIFICATION_TOL)
    }

    /// Derive the regime parameters with an explicit classification
    /// tolerance for the critical band.
    pub fn from_line_with_tol(params: &LineParams, classification_tol: f64) -> Result<Self> {
        params.validate()?;
        let beta = 0.5 * params.omega * (params.m / params.s).sqrt();
        Self::from_beta(beta, classification_tol)
    }

    /// Derive the regime parameters directly from a frequency ratio.
    pub fn from_beta(beta: f64, classification_tol: f64) -> Result<Self> {
        let regime = classify_regime(beta, classification_tol)?;
        let tau = if beta < 1.0 {
            beta.asin()
        } else {
            std::f64::consts::FRAC_PI_2
        };
        // max(.., 0) guards beta marginally below 1 inside the critical band.
        let root = (beta * beta - 1.0).max(0.0).sqrt();
        let (gamma_minus, gamma_plus) = if beta >= 1.0 {
            (beta - root, beta + root)
        } else {
            // Complex-conjugate roots on the unit circle: store magnitudes.
            (1.0, 1.0)
        };
        Ok(Self {
            beta,
            tau,
            gamma_minus,
            gamma_plus,
            regime,
        })
    }

    /// Complex amplitude ratio `A_{n+1} / A_n` of the outgoing steady
    /// solution: `e^{-2 i tau}` below cutoff, `-gamma_minus^2` from the
    /// critical point on. This is the relation a matched termination imposes
    /// on the last element of a finite solve.
    pub fn outgoing_step(&self) -> Complex64 {
        match self.regime {
            Regime::Periodic => Complex64::from_polar(1.0, -2.0 * self.tau),
            Regime::Critical | Regime::Aperiodic => {
                Complex64::new(-self.gamma_minus * self.gamma_minus, 0.0)
            }
        }
    }
}
