//! Sweep the drive frequency across the chain cutoff and print the derived
//! regime parameters.
//!
//! Run with: cargo run --example dispersion_regimes

use wave_lab::{DispersionParams, LineParams};

fn main() -> Result<(), wave_lab::Error> {
    // Unit chain: m = s = a = 1, cutoff at omega = 2.
    println!("unit chain, cutoff frequency 2 rad/s");
    println!(
        "{:>8} {:>8} {:>10} {:>12} {:>12}  regime",
        "omega", "beta", "tau", "gamma-", "gamma+"
    );
    for omega in [0.2, 0.6, 1.0, 1.4, 1.8, 1.99, 2.0, 2.01, 2.2, 2.5, 3.0, 4.0] {
        let params = LineParams::new(1.0, 1.0, 1.0, 1.0, 0.0, omega)?;
        let disp = DispersionParams::from_line(&params)?;
        println!(
            "{:>8.3} {:>8.4} {:>10.6} {:>12.6} {:>12.6}  {}",
            omega, disp.beta, disp.tau, disp.gamma_minus, disp.gamma_plus, disp.regime
        );
    }

    // The two evanescent roots always multiply to one; below cutoff the
    // phase step is asin(beta).
    let params = LineParams::new(1.0, 1.0, 1.0, 1.0, 0.0, 2.5)?;
    let disp = DispersionParams::from_line(&params)?;
    println!(
        "\nabove cutoff: gamma- * gamma+ = {:.16} (roots of g^2 - 2 beta g + 1)",
        disp.gamma_minus * disp.gamma_plus
    );
    println!(
        "per-element decay of the evanescent profile: gamma-^2 = {:.6}",
        disp.gamma_minus * disp.gamma_minus
    );
    Ok(())
}
