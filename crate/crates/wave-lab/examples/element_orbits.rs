//! Element trajectories in the displacement plane and their conic fits.
//!
//! With in-phase force projections every orbit collapses to a straight
//! segment tilted by alpha; a transverse phase lag opens the segments into
//! ellipses (a circle at alpha = 45 deg, lag = 90 deg). Along the chain the
//! orbits repeat with a fixed phase delay of 2 tau per element.
//!
//! Run with: cargo run --example element_orbits

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use wave_lab::svg::{emit_snapshot_svg, Series};
use wave_lab::trajectory::{element_orbit, fit_conic, phase_shift_along_line};
use wave_lab::{DispersionParams, LineParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = LineParams::new(1.0, 1.0, 1.0, 1.0, FRAC_PI_4, 1.0)?;
    let disp = DispersionParams::from_line(&base)?;

    println!("conic fits of the first element's orbit vs transverse phase lag:");
    println!(
        "{:>8} {:>12} {:>12} {:>14} {:>12}",
        "lag", "semi-major", "semi-minor", "eccentricity", "degenerate"
    );
    let mut series = Vec::new();
    for k in 0..=4 {
        let lag = FRAC_PI_2 * k as f64 / 4.0;
        let params = base.with_phase_offset(lag)?;
        let orbit = element_orbit(&params, &disp, 1, 256)?;
        let fit = fit_conic(&orbit)?;
        println!(
            "{:>8.4} {:>12.6} {:>12.6} {:>14.6} {:>12}",
            lag, fit.semi_major, fit.semi_minor, fit.eccentricity, fit.degenerate
        );
        series.push(Series::new(format!("lag = {lag:.2}"), orbit.points));
    }
    let path = std::path::Path::new("element_orbits.svg");
    emit_snapshot_svg(
        "orbit of element 1 opening with the transverse phase lag (alpha = 45 deg)",
        "longitudinal displacement (m)",
        "transverse displacement (m)",
        &series,
        path,
    )?;
    println!("wrote {}", path.display());

    // Orbit-to-orbit phase delay along the chain.
    let lags = phase_shift_along_line(&base, &disp, (1, 8))?;
    println!(
        "\norbital phase lag per element (steps of 2 tau = {:.6}):",
        2.0 * disp.tau
    );
    for (i, lag) in lags.iter().enumerate() {
        println!("  element {:>2}: {:.6}", i + 1, lag);
    }

    // Above cutoff the orbit shape is element-independent; only its size
    // decays, by gamma_minus^2 per element.
    let evanescent = LineParams::new(1.0, 1.0, 1.0, 1.0, FRAC_PI_4, 2.5)?;
    let disp = DispersionParams::from_line(&evanescent)?;
    println!(
        "\nevanescent orbits (beta = 1.25, gamma-^2 = {:.4}):",
        disp.gamma_minus.powi(2)
    );
    let mut prev: Option<f64> = None;
    for n in 1..=6 {
        let fit = fit_conic(&element_orbit(&evanescent, &disp, n, 256)?)?;
        let ratio = prev.map_or(String::new(), |p| format!("{:.6}", fit.semi_major / p));
        println!(
            "  element {n}: semi-major {:.6e}  orientation {:.4}  ratio {ratio}",
            fit.semi_major, fit.orientation
        );
        prev = Some(fit.semi_major);
    }
    Ok(())
}
