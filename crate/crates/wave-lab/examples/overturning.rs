//! Push the deformation past the solvability bound and watch the implicit
//! wave overturn: multiple branches coexist and the derivatives blow up.
//!
//! Run with: cargo run --example overturning

use std::f64::consts::FRAC_PI_4;

use wave_lab::implicit::InclinedSineSpec;
use wave_lab::Error;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for c_amp in [0.3, 0.9, 2.0] {
        let sine = InclinedSineSpec {
            c_amp,
            alpha: FRAC_PI_4,
            k: 1.0,
            omega: 1.0,
        };
        println!(
            "c = {c_amp}: contraction bound {:.3} -> {}",
            sine.contraction_bound(),
            if sine.contraction_bound() < 1.0 {
                "single-valued"
            } else {
                "overturning"
            }
        );
    }

    // At c = 2 the profile is multivalued: a seedless evaluation refuses to
    // pick a branch, while seeds select and follow one.
    let wave = InclinedSineSpec {
        c_amp: 2.0,
        alpha: FRAC_PI_4,
        k: 1.0,
        omega: 1.0,
    }
    .to_wave_spec()?;
    let mut branches = 0;
    for i in 0..64 {
        let x = i as f64 * 0.2;
        if let Err(Error::AmbiguousBranch { count, .. }) = wave.eval(x, 0.0, None) {
            if branches == 0 {
                println!("\nfirst multivalued point at x = {x:.2}: {count} coexisting branches");
            }
            branches = branches.max(count);
        }
    }
    println!("max coexisting branches along the scan: {branches}");

    // Seeded continuation walks one branch until the fold, where the
    // derivative denominator collapses.
    let mut seed = 0.0;
    let mut last_denominator = f64::INFINITY;
    for i in 0..=320 {
        let x = i as f64 * 0.01;
        let y = wave.eval(x, 0.0, Some(seed))?;
        seed = y;
        match wave.derivatives(x, 0.0, y) {
            Ok(d) => {
                let slope = d.dy_dx;
                if slope.abs() > 50.0 && last_denominator > 50.0 {
                    println!("slope exceeds 50 near x = {x:.2}: approaching the fold");
                    last_denominator = slope.abs();
                }
            }
            Err(Error::GradientCatastrophe { y, denominator }) => {
                println!("gradient catastrophe at x = {x:.2}, y = {y:.4} (denominator {denominator:.1e})");
                break;
            }
            Err(other) => return Err(other.into()),
        }
    }
    Ok(())
}
