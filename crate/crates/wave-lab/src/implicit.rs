//! Implicit-function solutions of the 1-D wave equation.
//!
//! The classical explicit travelling-wave solution
//! `y = phi1(kx - wt) + phi2(kx + wt)` generalizes to profiles whose phase
//! depends on the unknown displacement itself:
//!
//! ```text
//! y(x, t) = phi1(kx - wt + psi1(y)) + phi2(kx + wt + psi2(y))
//! ```
//!
//! with twice-differentiable deformation functions `psi`. Each evaluation is
//! a scalar root-finding problem; as long as `|psi'(y) phi'(A)| < 1` the
//! fixed point is unique and the solution single-valued. Crossing that bound
//! is the overturning (gradient-catastrophe) regime: the profile becomes
//! multivalued and the derivatives below blow up.
//!
//! For a single deformed branch `y = phi(A)`, `A = kx - wt + psi(y)`,
//! implicit differentiation gives, with `D = 1 - psi'(y) phi'(A)`:
//!
//! ```text
//! dy/dx   =  k phi' / D          dy/dt   = -w phi' / D
//! d2y/dx2 =  k^2 [phi'' + psi'' (phi')^3] / D^3
//! d2y/dt2 =  w^2 [phi'' + psi'' (phi')^3] / D^3
//! ```
//!
//! so `d2y/dx2 - (k^2/w^2) d2y/dt2 = 0` holds identically wherever the
//! branch is single-valued — these profiles solve the wave equation. The
//! [`pde_residual_fd`] certifier re-derives that claim numerically from
//! sampled values alone, with no analytic derivatives in the loop.

use crate::error::{Error, Result};

/// A scalar function bundled with caller-supplied first and second
/// derivative evaluators.
///
/// Construction sites validate the evaluators against central finite
/// differences on a sample grid, so a mistyped derivative fails fast instead
/// of silently corrupting every downstream certification.
pub struct C2Fn {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    df: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    d2f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl C2Fn {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Box::new(f),
            df: Box::new(df),
            d2f: Box::new(d2f),
        }
    }

    /// The zero function (no deformation, no counter-wave).
    pub fn zero() -> Self {
        Self::new(|_| 0.0, |_| 0.0, |_| 0.0)
    }

    /// `u -> amp * sin(u)`.
    pub fn scaled_sin(amp: f64) -> Self {
        Self::new(
            move |u| amp * u.sin(),
            move |u| amp * u.cos(),
            move |u| -amp * u.sin(),
        )
    }

    /// `u -> slope * u`.
    pub fn linear(slope: f64) -> Self {
        Self::new(move |u| slope * u, move |_| slope, |_| 0.0)
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub fn deriv(&self, u: f64) -> f64 {
        (self.df)(u)
    }

    pub fn deriv2(&self, u: f64) -> f64 {
        (self.d2f)(u)
    }

    /// Check `df` and `d2f` against central differences of `f` over
    /// `samples` points of `range`. The tolerance absorbs the O(h^2)
    /// truncation of the differences for smooth functions of moderate
    /// third derivative.
    fn validate(&self, name: &'static str, range: (f64, f64), samples: usize) -> Result<()> {
        let h = 1e-5 * (1.0 + range.1.abs().max(range.0.abs()));
        let scale = |v: f64| v.abs().max(1.0);
        for i in 0..samples {
            let u = range.0 + (range.1 - range.0) * i as f64 / (samples - 1) as f64;
            let fd1 = (self.eval(u + h) - self.eval(u - h)) / (2.0 * h);
            let dev1 = (self.deriv(u) - fd1).abs();
            if dev1 > 1e-4 * scale(fd1) {
                return Err(Error::DerivativeMismatch {
                    name,
                    at: u,
                    deviation: dev1,
                });
            }
            let fd2 = (self.deriv(u + h) - self.deriv(u - h)) / (2.0 * h);
            let dev2 = (self.deriv2(u) - fd2).abs();
            if dev2 > 1e-4 * scale(fd2) {
                return Err(Error::DerivativeMismatch {
                    name,
                    at: u,
                    deviation: dev2,
                });
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for C2Fn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("C2Fn").finish_non_exhaustive()
    }
}

/// All four partial derivatives of the implicit solution at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveDerivatives {
    pub dy_dx: f64,
    pub dy_dt: f64,
    pub d2y_dx2: f64,
    pub d2y_dt2: f64,
}

/// One implicit travelling-wave solution: a forward-deformed branch and an
/// optional counter-propagating one.
pub struct ImplicitWaveSpec {
    phi1: C2Fn,
    psi1: C2Fn,
    second: Option<(C2Fn, C2Fn)>,
    /// Wave number (rad/m), > 0.
    pub k: f64,
    /// Angular frequency (rad/s), > 0.
    pub omega: f64,
    /// Bound on `|phi1| + |phi2|`; brackets every root search.
    pub amplitude_bound: f64,
}

impl ImplicitWaveSpec {
    /// Single forward branch `y = phi1(kx - wt + psi1(y))`.
    ///
    /// `amplitude_bound` must dominate `sup |phi1|`. The derivative
    /// evaluators of both functions are validated on construction.
    pub fn new(phi1: C2Fn, psi1: C2Fn, k: f64, omega: f64, amplitude_bound: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "wave number k must be > 0, got {k}"
            )));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "frequency omega must be > 0, got {omega}"
            )));
        }
        if !(amplitude_bound >= 0.0 && amplitude_bound.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "amplitude bound must be >= 0, got {amplitude_bound}"
            )));
        }
        let b = amplitude_bound.max(1.0);
        phi1.validate("phi1", (-12.6, 12.6), 65)?;
        psi1.validate("psi1", (-b, b), 65)?;
        Ok(Self {
            phi1,
            psi1,
            second: None,
            k,
            omega,
            amplitude_bound,
        })
    }

    /// Add a counter-propagating branch `phi2(kx + wt + psi2(y))`.
    /// `amplitude_bound` must now dominate `sup |phi1| + sup |phi2|`.
    pub fn with_counter_wave(mut self, phi2: C2Fn, psi2: C2Fn) -> Result<Self> {
        let b = self.amplitude_bound.max(1.0);
        phi2.validate("phi2", (-12.6, 12.6), 65)?;
        psi2.validate("psi2", (-b, b), 65)?;
        self.second = Some((phi2, psi2));
        Ok(self)
    }

    /// Propagation speed `omega / k`.
    pub fn speed(&self) -> f64 {
        self.omega / self.k
    }

    /// Phase `A(x, t, y) = kx - wt + psi1(y)` of the forward branch as a
    /// field over the `(x, y)` plane at time `t`.
    pub fn phase(&self, x: f64, t: f64, y: f64) -> f64 {
        self.k * x - self.omega * t + self.psi1.eval(y)
    }

    fn has_counter_wave(&self) -> bool {
        self.second.is_some()
    }

    /// Right-hand side `phi1(base1 + psi1(y)) + phi2(base2 + psi2(y))`.
    fn rhs(&self, base1: f64, base2: f64, y: f64) -> f64 {
        let mut v = self.phi1.eval(base1 + self.psi1.eval(y));
        if let Some((phi2, psi2)) = &self.second {
            v += phi2.eval(base2 + psi2.eval(y));
        }
        v
    }

    /// `d rhs / dy`.
    fn rhs_dy(&self, base1: f64, base2: f64, y: f64) -> f64 {
        let mut v = self.phi1.deriv(base1 + self.psi1.eval(y)) * self.psi1.deriv(y);
        if let Some((phi2, psi2)) = &self.second {
            v += phi2.deriv(base2 + psi2.eval(y)) * psi2.deriv(y);
        }
        v
    }

    /// Evaluate the implicit solution at `(x, t)`.
    ///
    /// The returned `y` satisfies `y = rhs(y)` to an absolute tolerance well
    /// below 1e-12. With a seed, the branch closest to the seed is selected
    /// (continuation); without one, the bracket is scanned and more than one
    /// root raises [`Error::AmbiguousBranch`].
    pub fn eval(&self, x: f64, t: f64, seed: Option<f64>) -> Result<f64> {
        let base1 = self.k * x - self.omega * t;
        let base2 = self.k * x + self.omega * t;
        let bound = self.amplitude_bound + 1e-9 * (1.0 + self.amplitude_bound);
        let residual = |y: f64| y - self.rhs(base1, base2, y);
        let accept = 1e-12 * (1.0 + self.amplitude_bound);

        // Without a seed there is no branch to continue from: scan the whole
        // bracket so coexisting roots are detected rather than silently
        // resolved.
        let Some(seed) = seed else {
            let roots = self.scan_roots(base1, base2, bound);
            return match roots.len() {
                0 => Err(Error::NonConvergence { x, t }),
                1 => Ok(self.polish(base1, base2, roots[0], bound)),
                count => Err(Error::AmbiguousBranch { x, t, count }),
            };
        };

        // Fast path: Newton from the seed, clamped to the bracket. Polished
        // down to the ulp-level fixed point so that finite differences of
        // the solution are not limited by solver tolerance.
        let y = self.polish(base1, base2, seed.clamp(-bound, bound), bound);
        if residual(y).abs() <= accept {
            return Ok(y);
        }

        // Robust path: scan the bracket for sign changes and polish each by
        // bisection. phi is bounded by amplitude_bound, so residual(y) has
        // opposite signs at the bracket ends and at least one root exists.
        let roots = self.scan_roots(base1, base2, bound);
        if roots.is_empty() {
            return Err(Error::NonConvergence { x, t });
        }
        let nearest = roots
            .iter()
            .copied()
            .min_by(|a, b| (a - seed).abs().partial_cmp(&(b - seed).abs()).unwrap())
            .unwrap();
        Ok(self.polish(base1, base2, nearest, bound))
    }

    /// Newton iteration driven to the floating-point fixed point: stop only
    /// when the residual hits zero, the iterate stops moving, or the
    /// residual stalls at its round-off floor.
    fn polish(&self, base1: f64, base2: f64, start: f64, bound: f64) -> f64 {
        let mut y = start;
        let mut best = (f64::INFINITY, start);
        let mut prev_abs = f64::INFINITY;
        let mut stalls = 0;
        for _ in 0..60 {
            let r = y - self.rhs(base1, base2, y);
            let abs = r.abs();
            if abs < best.0 {
                best = (abs, y);
            }
            if abs == 0.0 {
                return y;
            }
            if abs >= prev_abs {
                stalls += 1;
                if stalls >= 2 {
                    break;
                }
            } else {
                stalls = 0;
            }
            prev_abs = abs;
            let d = 1.0 - self.rhs_dy(base1, base2, y);
            if d.abs() < 1e-12 {
                break;
            }
            let next = (y - r / d).clamp(-bound, bound);
            if next == y {
                break;
            }
            y = next;
        }
        best.1
    }

    fn scan_roots(&self, base1: f64, base2: f64, bound: f64) -> Vec<f64> {
        const CELLS: usize = 4096;
        let residual = |y: f64| y - self.rhs(base1, base2, y);
        let mut roots = Vec::new();
        let mut prev_y = -bound;
        let mut prev_r = residual(prev_y);
        for i in 1..=CELLS {
            let cur_y = -bound + 2.0 * bound * i as f64 / CELLS as f64;
            let cur_r = residual(cur_y);
            if prev_r == 0.0 {
                roots.push(prev_y);
            } else if prev_r * cur_r < 0.0 {
                // Bisect the sign change down to a machine-width interval.
                let (mut lo, mut hi) = (prev_y, cur_y);
                let mut rlo = prev_r;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid == lo || mid == hi {
                        break;
                    }
                    let rm = residual(mid);
                    if rm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if rlo * rm < 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        rlo = rm;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev_y = cur_y;
            prev_r = cur_r;
        }
        if prev_r == 0.0 {
            roots.push(prev_y);
        }
        roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (1.0 + bound));
        roots
    }

    /// Analytic partial derivatives of the single-branch implicit solution
    /// at a point where `y = eval(x, t)` already holds.
    ///
    /// Requires a spec without a counter-propagating branch (the two
    /// branches couple through `y` and no closed derivative form applies to
    /// their sum). Errors with [`Error::GradientCatastrophe`] where the
    /// denominator `1 - psi'(y) phi'(A)` vanishes.
    pub fn derivatives(&self, x: f64, t: f64, y: f64) -> Result<WaveDerivatives> {
        if self.has_counter_wave() {
            return Err(Error::InvalidArgument(
                "analytic derivatives apply to a single deformed branch; \
                 this spec carries a counter-propagating one"
                    .into(),
            ));
        }
        let a = self.k * x - self.omega * t + self.psi1.eval(y);
        let dphi = self.phi1.deriv(a);
        let d2phi = self.phi1.deriv2(a);
        let dpsi = self.psi1.deriv(y);
        let d2psi = self.psi1.deriv2(y);
        let denom = 1.0 - dpsi * dphi;
        if denom.abs() < 1e-12 * (1.0 + (dpsi * dphi).abs()) {
            return Err(Error::GradientCatastrophe {
                y,
                denominator: denom,
            });
        }
        let bracket = d2phi + d2psi * dphi * dphi * dphi;
        let cube = denom * denom * denom;
        Ok(WaveDerivatives {
            dy_dx: self.k * dphi / denom,
            dy_dt: -self.omega * dphi / denom,
            d2y_dx2: self.k * self.k * bracket / cube,
            d2y_dt2: self.omega * self.omega * bracket / cube,
        })
    }

    /// Supremum estimate of `|psi1'(y) phi1'(A)|` (plus the counter-wave
    /// analog) by dense sampling: `y` over `y_range`, `A` over several full
    /// phase turns. A value < 1 certifies a unique fixed point for every
    /// `(x, t)` whose solution stays inside `y_range`.
    pub fn contraction_bound(&self, y_range: (f64, f64)) -> f64 {
        const Y_SAMPLES: usize = 2001;
        const A_SAMPLES: usize = 4001;
        let a_span = 4.0 * std::f64::consts::TAU;
        let max_over = |psi: &C2Fn, phi: &C2Fn| -> f64 {
            let mut max_dpsi: f64 = 0.0;
            for i in 0..Y_SAMPLES {
                let y = y_range.0 + (y_range.1 - y_range.0) * i as f64 / (Y_SAMPLES - 1) as f64;
                max_dpsi = max_dpsi.max(psi.deriv(y).abs());
            }
            let mut max_dphi: f64 = 0.0;
            for i in 0..A_SAMPLES {
                let a = -a_span + 2.0 * a_span * i as f64 / (A_SAMPLES - 1) as f64;
                max_dphi = max_dphi.max(phi.deriv(a).abs());
            }
            max_dpsi * max_dphi
        };
        let mut bound = max_over(&self.psi1, &self.phi1);
        if let Some((phi2, psi2)) = &self.second {
            bound += max_over(psi2, phi2);
        }
        bound
    }
}

impl std::fmt::Debug for ImplicitWaveSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImplicitWaveSpec")
            .field("k", &self.k)
            .field("omega", &self.omega)
            .field("amplitude_bound", &self.amplitude_bound)
            .field("counter_wave", &self.has_counter_wave())
            .finish_non_exhaustive()
    }
}

/// The progressive inclined sine wave: `y = c sin(kx - wt + y cot(alpha))`.
///
/// The deformation shears the sinusoid so that lines of constant phase in
/// the `(x, y)` plane tilt with `alpha`; at `alpha = pi/2` the deformation
/// vanishes and the wave is the plain explicit sine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InclinedSineSpec {
    /// Amplitude (m).
    pub c_amp: f64,
    /// Inclination angle (rad), in (0, pi/2].
    pub alpha: f64,
    /// Wave number (rad/m).
    pub k: f64,
    /// Angular frequency (rad/s).
    pub omega: f64,
}

impl InclinedSineSpec {
    /// Exact contraction bound `|c_amp cot(alpha)|` of this spec: the sine
    /// slope never exceeds one, the deformation slope is `cot(alpha)`.
    /// At or above 1 the wave overturns and becomes multivalued.
    pub fn contraction_bound(&self) -> f64 {
        (self.c_amp / self.alpha.tan()).abs()
    }

    /// Lower the inclined sine into a general implicit-wave description.
    pub fn to_wave_spec(&self) -> Result<ImplicitWaveSpec> {
        if !(self.alpha > 0.0 && self.alpha <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidParameter(format!(
                "inclination alpha must lie in (0, pi/2], got {}",
                self.alpha
            )));
        }
        if !self.c_amp.is_finite() {
            return Err(Error::InvalidParameter("amplitude must be finite".into()));
        }
        let cot = 1.0 / self.alpha.tan();
        ImplicitWaveSpec::new(
            C2Fn::scaled_sin(self.c_amp),
            C2Fn::linear(cot),
            self.k,
            self.omega,
            self.c_amp.abs(),
        )
    }
}

/// Explicit d'Alembert evaluation `phi1(kx - wt) + phi2(kx + wt)`.
pub fn dalembert_eval(phi1: &C2Fn, phi2: &C2Fn, k: f64, omega: f64, x: f64, t: f64) -> f64 {
    phi1.eval(k * x - omega * t) + phi2.eval(k * x + omega * t)
}

/// Rectangular evaluation grid for the finite-difference certifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGrid {
    pub x0: f64,
    pub t0: f64,
    /// Node counts, both >= 3.
    pub nx: usize,
    pub nt: usize,
    /// Grid spacings. Keep `hx != c * ht`: along `hx = c ht` the leading
    /// truncation terms of the two second differences cancel identically
    /// and the reported residual collapses to round-off noise instead of
    /// showing its real convergence order.
    pub hx: f64,
    pub ht: f64,
    /// Seed for the first node; continuation carries it across the grid.
    pub seed: f64,
}

/// Finite-difference residual of the wave equation over two nested grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub hx: f64,
    pub ht: f64,
    /// Max |d2y/dx2 - (k^2/w^2) d2y/dt2| over interior nodes.
    pub max_residual: f64,
    /// Max second-derivative magnitude over the grid; divide the residual
    /// by this to make it dimensionless.
    pub normalization: f64,
    /// Same residual on the half-spacing grid over the same extent.
    pub refined_max_residual: f64,
    /// log2(max_residual / refined_max_residual): ~2 for a genuine solution.
    pub order_estimate: f64,
}

/// Certify a spec against the wave equation by straight substitution of
/// sampled values into second-order central differences.
pub fn pde_residual_fd(spec: &ImplicitWaveSpec, grid: &FdGrid) -> Result<ResidualReport> {
    pde_residual_fd_with_speed_scale(spec, grid, 1.0)
}

/// Same certification with the squared slowness `k^2/w^2` scaled by
/// `speed_scale` — a deliberately wrong scale is the negative control: its
/// residual must *not* converge to zero.
pub fn pde_residual_fd_with_speed_scale(
    spec: &ImplicitWaveSpec,
    grid: &FdGrid,
    speed_scale: f64,
) -> Result<ResidualReport> {
    if grid.nx < 3 || grid.nt < 3 {
        return Err(Error::InvalidArgument(format!(
            "residual grid needs nx, nt >= 3, got {} x {}",
            grid.nx, grid.nt
        )));
    }
    if !(grid.hx > 0.0 && grid.ht > 0.0) {
        return Err(Error::InvalidArgument("grid spacings must be > 0".into()));
    }
    let coarse = residual_on_grid(spec, grid, speed_scale)?;
    let fine_grid = FdGrid {
        nx: 2 * grid.nx - 1,
        nt: 2 * grid.nt - 1,
        hx: 0.5 * grid.hx,
        ht: 0.5 * grid.ht,
        ..*grid
    };
    let fine = residual_on_grid(spec, &fine_grid, speed_scale)?;
    Ok(ResidualReport {
        hx: grid.hx,
        ht: grid.ht,
        max_residual: coarse.0,
        normalization: coarse.1,
        refined_max_residual: fine.0,
        order_estimate: (coarse.0 / fine.0).log2(),
    })
}

fn residual_on_grid(
    spec: &ImplicitWaveSpec,
    grid: &FdGrid,
    speed_scale: f64,
) -> Result<(f64, f64)> {
    let mut values = vec![vec![0.0_f64; grid.nx]; grid.nt];
    let mut row_seed = grid.seed;
    for (j, row) in values.iter_mut().enumerate() {
        let t = grid.t0 + j as f64 * grid.ht;
        let mut seed = row_seed;
        for (i, value) in row.iter_mut().enumerate() {
            let x = grid.x0 + i as f64 * grid.hx;
            let y = spec.eval(x, t, Some(seed))?;
            *value = y;
            seed = y;
            if i == 0 {
                row_seed = y;
            }
        }
    }
    let slowness = speed_scale * spec.k * spec.k / (spec.omega * spec.omega);
    let inv_hx2 = 1.0 / (grid.hx * grid.hx);
    let inv_ht2 = 1.0 / (grid.ht * grid.ht);
    let mut max_residual: f64 = 0.0;
    let mut normalization: f64 = 0.0;
    for j in 1..grid.nt - 1 {
        for i in 1..grid.nx - 1 {
            let d2x = (values[j][i - 1] - 2.0 * values[j][i] + values[j][i + 1]) * inv_hx2;
            let d2t = (values[j - 1][i] - 2.0 * values[j][i] + values[j + 1][i]) * inv_ht2;
            max_residual = max_residual.max((d2x - slowness * d2t).abs());
            normalization = normalization.max(d2x.abs().max((slowness * d2t).abs()));
        }
    }
    Ok((max_residual, normalization))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn inclined(c_amp: f64, alpha: f64) -> ImplicitWaveSpec {
        InclinedSineSpec {
            c_amp,
            alpha,
            k: 1.0,
            omega: 1.0,
        }
        .to_wave_spec()
        .unwrap()
    }

    /// Brute-force oracle: locate the solution by bisection sweep alone,
    /// never touching the Newton path under test.
    fn bisection_oracle(spec: &ImplicitWaveSpec, x: f64, t: f64) -> f64 {
        let base1 = spec.k * x - spec.omega * t;
        let base2 = spec.k * x + spec.omega * t;
        let bound = spec.amplitude_bound + 1e-6;
        let f = |y: f64| y - spec_rhs(spec, base1, base2, y);
        let (mut lo, mut hi) = (-bound, bound);
        let mut flo = f(lo);
        assert!(flo < 0.0 && f(hi) > 0.0, "bracket must straddle the root");
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            let fm = f(mid);
            if fm == 0.0 {
                return mid;
            }
            if flo * fm < 0.0 {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        0.5 * (lo + hi)
    }

    fn spec_rhs(spec: &ImplicitWaveSpec, base1: f64, base2: f64, y: f64) -> f64 {
        spec.rhs(base1, base2, y)
    }

    #[test]
    fn right_angle_inclination_is_the_explicit_sine() {
        let spec = inclined(0.7, FRAC_PI_2);
        for (x, t) in [(0.0, 0.0), (1.2, 0.5), (-3.0, 2.2)] {
            let y = spec.eval(x, t, Some(0.0)).unwrap();
            assert_relative_eq!(y, 0.7 * (x - t).sin(), epsilon = 1e-13);
        }
    }

    #[test]
    fn origin_root_is_zero() {
        let spec = inclined(0.5, FRAC_PI_3);
        assert_eq!(spec.eval(0.0, 0.0, Some(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn newton_path_matches_bisection_oracle() {
        let spec = inclined(0.5, FRAC_PI_3);
        let mut worst: f64 = 0.0;
        for i in 0..40 {
            for j in 0..10 {
                let x = -2.0 + 0.17 * i as f64;
                let t = 0.09 * j as f64;
                let got = spec.eval(x, t, Some(0.0)).unwrap();
                let oracle = bisection_oracle(&spec, x, t);
                worst = worst.max((got - oracle).abs());
            }
        }
        assert!(
            worst < 1e-10,
            "worst deviation from bisection oracle {worst:.3e}"
        );
    }

    #[test]
    fn residual_after_eval_is_tiny() {
        let spec = inclined(0.5, FRAC_PI_3);
        for i in 0..100 {
            let x = -5.0 + 0.1 * i as f64;
            let y = spec.eval(x, 0.3, Some(0.0)).unwrap();
            let r = y - spec_rhs(&spec, spec.k * x - spec.omega * 0.3, 0.0, y);
            assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn travelling_invariance_shifts_leave_values_unchanged() {
        let spec = inclined(0.5, FRAC_PI_3);
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let x = rng.random_range(-5.0..5.0);
            let t = rng.random_range(-5.0..5.0);
            let delta = rng.random_range(-10.0..10.0);
            let y0 = spec.eval(x, t, Some(0.0)).unwrap();
            let y1 = spec
                .eval(x + delta, t + spec.k * delta / spec.omega, Some(y0))
                .unwrap();
            assert!(
                (y1 - y0).abs() < 1e-10,
                "invariance violated by {:.3e}",
                y1 - y0
            );
        }
    }

    #[test]
    fn derivatives_match_finite_differences_at_second_order() {
        let spec = inclined(0.5, FRAC_PI_3);
        let mut rng = StdRng::seed_from_u64(23);
        let mut checked = 0;
        while checked < 100 {
            let x = rng.random_range(-4.0..4.0);
            let t = rng.random_range(-4.0..4.0);
            let y = spec.eval(x, t, Some(0.0)).unwrap();
            let a = spec.k * x - spec.omega * t + y / FRAC_PI_3.tan();
            if (0.5 * a.cos() / FRAC_PI_3.tan()).abs() > 0.9 {
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
                // The order is measurable only while the truncation error
                // clears the h^-2-amplified round-off of the solved values.
                if e1 > 2e-7 {
                    let order = (e1 / e2).log2();
                    assert!(
                        order > 1.9,
                        "component {idx}: order {order:.2} at ({x}, {t})"
                    );
                } else {
                    assert!(e2 < 1e-6, "component {idx}: fd error {e2:.3e}");
                }
            }
            checked += 1;
        }
    }

    #[test]
    fn second_derivative_ratio_is_squared_slowness() {
        let spec = InclinedSineSpec {
            c_amp: 0.4,
            alpha: FRAC_PI_3,
            k: 2.0,
            omega: 3.0,
        }
        .to_wave_spec()
        .unwrap();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..50 {
            let x = rng.random_range(-3.0..3.0);
            let t = rng.random_range(-3.0..3.0);
            let y = spec.eval(x, t, Some(0.0)).unwrap();
            let d = spec.derivatives(x, t, y).unwrap();
            if d.d2y_dt2.abs() > 1e-12 {
                assert_relative_eq!(
                    d.d2y_dx2 / d.d2y_dt2,
                    (2.0 * 2.0) / (3.0 * 3.0),
                    max_relative = 1e-9
                );
            }
        }
    }

    #[test]
    fn undeformed_derivatives_reduce_to_chain_rule() {
        let spec =
            ImplicitWaveSpec::new(C2Fn::scaled_sin(0.8), C2Fn::zero(), 1.3, 0.9, 0.8).unwrap();
        let (x, t) = (0.4, 1.1);
        let y = spec.eval(x, t, Some(0.0)).unwrap();
        let d = spec.derivatives(x, t, y).unwrap();
        let a = 1.3 * x - 0.9 * t;
        assert_relative_eq!(d.dy_dx, 1.3 * 0.8 * a.cos(), max_relative = 1e-12);
        assert_relative_eq!(d.dy_dt, -0.9 * 0.8 * a.cos(), max_relative = 1e-12);
        assert_relative_eq!(d.d2y_dx2, -1.3 * 1.3 * 0.8 * a.sin(), max_relative = 1e-10);
        assert_relative_eq!(d.d2y_dt2, -0.9 * 0.9 * 0.8 * a.sin(), max_relative = 1e-10);
    }

    #[test]
    fn contraction_bound_matches_the_closed_form() {
        let spec = InclinedSineSpec {
            c_amp: 0.5,
            alpha: FRAC_PI_3,
            k: 1.0,
            omega: 1.0,
        };
        let expect = 0.5 / FRAC_PI_3.tan();
        assert_relative_eq!(spec.contraction_bound(), expect, max_relative = 1e-12);
        let sampled = spec.to_wave_spec().unwrap().contraction_bound((-0.5, 0.5));
        assert_relative_eq!(sampled, expect, max_relative = 1e-6);
        // alpha = pi/2: no deformation at all.
        let straight = InclinedSineSpec {
            c_amp: 0.5,
            alpha: FRAC_PI_2,
            k: 1.0,
            omega: 1.0,
        };
        assert!(straight.contraction_bound() < 1e-16);
    }

    #[test]
    fn overturned_wave_is_flagged_multivalued() {
        let spec = InclinedSineSpec {
            c_amp: 2.0,
            alpha: FRAC_PI_4,
            k: 1.0,
            omega: 1.0,
        };
        assert!(spec.contraction_bound() > 1.0);
        let wave = spec.to_wave_spec().unwrap();
        // Seedless evaluation must refuse to pick a branch where several
        // roots coexist. Scan a few phases to find a multivalued point.
        let mut ambiguous = 0;
        for i in 0..32 {
            let x = i as f64 * PI / 16.0;
            match wave.eval(x, 0.0, None) {
                Err(Error::AmbiguousBranch { count, .. }) => {
                    assert!(count > 1);
                    ambiguous += 1;
                }
                Ok(_) => {}
                Err(other) => panic!("unexpected error {other:?}"),
            }
        }
        assert!(
            ambiguous > 0,
            "no multivalued point found for an overturned wave"
        );
    }

    #[test]
    fn degenerates_to_dalembert_without_deformation() {
        // amplitude bound covers sup |phi1| + sup |phi2| = 0.9 + 0.3.
        let spec = ImplicitWaveSpec::new(C2Fn::scaled_sin(0.9), C2Fn::zero(), 1.7, 2.3, 1.2)
            .unwrap()
            .with_counter_wave(
                C2Fn::new(|u| 0.3 * u.cos(), |u| -0.3 * u.sin(), |u| -0.3 * u.cos()),
                C2Fn::zero(),
            )
            .unwrap();
        let phi1 = C2Fn::scaled_sin(0.9);
        let phi2 = C2Fn::new(|u| 0.3 * u.cos(), |u| -0.3 * u.sin(), |u| -0.3 * u.cos());
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..1000 {
            let x = rng.random_range(-8.0..8.0);
            let t = rng.random_range(-8.0..8.0);
            let implicit = spec.eval(x, t, Some(0.0)).unwrap();
            let explicit = dalembert_eval(&phi1, &phi2, 1.7, 2.3, x, t);
            assert!((implicit - explicit).abs() < 1e-12);
        }
    }

    #[test]
    fn standing_wave_identity() {
        let half_sin = || C2Fn::scaled_sin(0.5);
        let (k, omega) = (1.0, 1.0);
        for i in 0..20 {
            for j in 0..20 {
                let x = -3.0 + 0.31 * i as f64;
                let t = -3.0 + 0.33 * j as f64;
                let v = dalembert_eval(&half_sin(), &half_sin(), k, omega, x, t);
                assert_relative_eq!(v, (k * x).sin() * (omega * t).cos(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn forward_wave_vanishes_on_the_characteristic() {
        let phi1 = C2Fn::scaled_sin(1.0);
        let phi2 = C2Fn::zero();
        for v in [0.0, 0.7, -2.0] {
            // kx = wt along the characteristic through the origin.
            assert_eq!(dalembert_eval(&phi1, &phi2, 2.0, 2.0, v, v), 0.0);
        }
    }

    #[test]
    fn fd_residual_converges_at_second_order() {
        let spec = inclined(0.5, FRAC_PI_3);
        let grid = FdGrid {
            x0: 0.0,
            t0: 0.0,
            nx: 201,
            nt: 9,
            hx: 2e-3,
            ht: 4e-3,
            seed: 0.0,
        };
        let report = pde_residual_fd(&spec, &grid).unwrap();
        assert!(report.max_residual / report.normalization < 1e-4);
        assert!(
            (report.order_estimate - 2.0).abs() < 0.1,
            "order {:.3}",
            report.order_estimate
        );
    }

    #[test]
    fn undeformed_sine_residual_sits_at_the_noise_floor() {
        // With psi = 0, k = w and hx = ht, every truncation term of the two
        // second differences cancels: only round-off remains.
        let spec =
            ImplicitWaveSpec::new(C2Fn::scaled_sin(1.0), C2Fn::zero(), 1.0, 1.0, 1.0).unwrap();
        let grid = FdGrid {
            x0: 0.0,
            t0: 0.0,
            nx: 101,
            nt: 5,
            hx: 1e-3,
            ht: 1e-3,
            seed: 0.0,
        };
        let report = pde_residual_fd(&spec, &grid).unwrap();
        assert!(
            report.max_residual / report.normalization < 1e-8,
            "residual {:.3e} vs normalization {:.3e}",
            report.max_residual,
            report.normalization
        );
    }

    #[test]
    fn wrong_speed_control_does_not_converge() {
        let spec = inclined(0.5, FRAC_PI_3);
        let grid = FdGrid {
            x0: 0.0,
            t0: 0.0,
            nx: 201,
            nt: 9,
            hx: 2e-3,
            ht: 4e-3,
            seed: 0.0,
        };
        let control = pde_residual_fd_with_speed_scale(&spec, &grid, 1.1).unwrap();
        // The residual stalls at the 10% speed mismatch instead of shrinking.
        assert!(control.max_residual / control.normalization > 1e-2);
        assert!(
            control.order_estimate.abs() < 0.2,
            "order {:.3}",
            control.order_estimate
        );
    }

    #[test]
    fn derivative_validation_catches_wrong_evaluators() {
        let bad = C2Fn::new(|u| u.sin(), |u| 1.1 * u.cos(), |u| -u.sin());
        match ImplicitWaveSpec::new(bad, C2Fn::zero(), 1.0, 1.0, 1.0) {
            Err(Error::DerivativeMismatch { name: "phi1", .. }) => {}
            other => panic!("expected derivative mismatch, got {other:?}"),
        }
    }

    #[test]
    fn level_sets_of_constant_phase_tilt_with_alpha() {
        // Trace the A(x, y) = 0 level line of the phase field near y = 0 by
        // solving for x at each y with bisection on the public phase(), then
        // fit its slope: the lines of constant phase tilt with magnitude
        // k tan(alpha) in the (x, y) plane.
        let alpha = FRAC_PI_3;
        let spec = InclinedSineSpec {
            c_amp: 0.5,
            alpha,
            k: 1.0,
            omega: 1.0,
        }
        .to_wave_spec()
        .unwrap();
        let solve_x = |y: f64| -> f64 {
            let (mut lo, mut hi) = (-2.0_f64, 2.0_f64);
            assert!(spec.phase(lo, 0.0, y) < 0.0 && spec.phase(hi, 0.0, y) > 0.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if spec.phase(mid, 0.0, y) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let ys: Vec<f64> = (-20..=20).map(|i| 1e-3 * i as f64).collect();
        let xs: Vec<f64> = ys.iter().map(|&y| solve_x(y)).collect();
        let n = ys.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = xs.iter().map(|a| (a - mx) * (a - mx)).sum();
        let slope = sxy / sxx;
        assert!(
            (slope.abs() - spec.k * alpha.tan()).abs() < 1e-3,
            "slope magnitude {} vs k tan(alpha) {}",
            slope.abs(),
            spec.k * alpha.tan()
        );
    }
}
