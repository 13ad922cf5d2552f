//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by the wave-lab kernels and the reporting layer.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter violates its domain (non-positive mass,
    /// inclination outside [0, pi/2], ...). The message names the invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A non-physical argument is out of range (empty list, window too
    /// short, too few samples, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The mode-shape prescription divides by cos((2k-1) tau) ~ 0.
    #[error(
        "singular mode-shape prescription: |cos((2k-1) tau)| = {magnitude:.3e} at k = {k_ref}"
    )]
    SingularModeShape { k_ref: usize, magnitude: f64 },

    /// The finite steady-state system has a vanishing pivot, i.e. the
    /// free/fixed finite line resonates at the drive frequency.
    #[error("singular steady-state system: vanishing pivot at row {row}")]
    SingularSystem { row: usize },

    /// Time integration blew up; the offending step is reported.
    #[error(
        "time integration unstable at step {step} (t = {time:.6}): \
         max |state| = {magnitude:.3e} exceeds {limit:.3e}"
    )]
    Unstable {
        step: usize,
        time: f64,
        magnitude: f64,
        limit: f64,
    },

    /// The implicit-wave solve exhausted its iteration budget.
    #[error("implicit solve did not converge at (x, t) = ({x:.6}, {t:.6})")]
    NonConvergence { x: f64, t: f64 },

    /// Several roots live in the bracket and no seed selects a branch.
    #[error(
        "ambiguous branch: {count} roots bracketed at (x, t) = ({x:.6}, {t:.6}) and no seed given"
    )]
    AmbiguousBranch { x: f64, t: f64, count: usize },

    /// The implicit-derivative denominator 1 - psi'(y) phi'(A) vanished:
    /// the wave is overturning and the derivatives blow up.
    #[error("gradient catastrophe: 1 - psi'(y) phi'(A) = {denominator:.3e} at y = {y:.6}")]
    GradientCatastrophe { y: f64, denominator: f64 },

    /// A user-supplied derivative evaluator disagrees with finite
    /// differences of its function on the validation grid.
    #[error(
        "derivative evaluator mismatch for {name} at argument {at:.6}: \
         |analytic - finite difference| = {deviation:.3e}"
    )]
    DerivativeMismatch {
        name: &'static str,
        at: f64,
        deviation: f64,
    },

    /// The requested operation is undefined in the current drive regime.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// File output failed.
    #[error("failed to write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
