//! # wave-lab
//!
//! A verification-grade numerical laboratory for waves driven on a
//! one-dimensional mass-spring line by a harmonic force inclined to the line
//! axis, plus an evaluator for implicit-function solutions of the 1-D wave
//! equation.
//!
//! The crate is built around *redundant routes to the same numbers*: every
//! closed-form result has at least one independent oracle that re-derives it
//! (a direct linear solve, a time-domain integration, a finite-difference
//! residual), and the agreement between routes is what the test suite and
//! the `verify-all` CLI mode certify.
//!
//! ## Modules
//!
//! - [`line`] — chain parameters and the derived regime quantities
//!   (frequency ratio, phase step, evanescent decay roots).
//! - [`analytic`] — closed-form steady solutions in all three drive regimes,
//!   free-vibration mode shapes, and the continuum limit.
//! - [`steady_state`] — independent oracle: exact complex tridiagonal solve
//!   of a finite chain with a matched (non-reflecting) termination.
//! - [`time_domain`] — second oracle: symplectic time integration with an
//!   absorbing boundary layer and least-squares harmonic extraction.
//! - [`implicit`] — implicit-function solutions `y = phi(kx -/+ wt + psi(y))`
//!   of the wave equation: evaluation, analytic derivatives, and
//!   finite-difference residual certification.
//! - [`trajectory`] — element orbits in the displacement plane and conic
//!   fitting with degeneracy detection.
//! - [`svg`] — dependency-free SVG snapshot figures.
//! - [`cli`] — run configuration, CSV/JSON emission, and the `verify-all`
//!   check suite behind the `wave-lab` binary.
//!
//! ## Quick start
//!
//! ```
//! use wave_lab::{DispersionParams, LineParams, Regime};
//! use wave_lab::analytic::forced_phasor;
//!
//! // A chain driven at half its cutoff frequency, force inclined by 30 deg.
//! let params = LineParams::new(1.0, 1.0, 1.0, 1.0, 0.5235987755982988, 1.0).unwrap();
//! let disp = DispersionParams::from_line(&params).unwrap();
//! assert_eq!(disp.regime, Regime::Periodic);
//! assert!((disp.beta - 0.5).abs() < 1e-15);
//!
//! // Steady displacement phasors of the third element.
//! let phasors = forced_phasor(&params, &disp, 3);
//! assert!((phasors.y.norm() / phasors.delta.norm() - 0.5774).abs() < 1e-3);
//! ```
//!
//! Runnable walkthroughs for every capability live in `examples/`; see the
//! README for the list.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod implicit;
pub mod line;
pub mod steady_state;
pub mod svg;
pub mod time_domain;
pub mod trajectory;
pub mod verify;

pub use analytic::{PhasorPair, ProfilePoint};
pub use error::{Error, Result};
pub use line::{classify_regime, DispersionParams, LineParams, Regime};
pub use steady_state::{solve_steady_chain, SteadySolution, Termination};
