//! Unforced vibration shapes of the chain below cutoff.
//!
//! The shape is fixed by prescribing one element's amplitude pair; every
//! element then follows the half-integer cosine profile, which satisfies
//! the unforced end equation automatically.
//!
//! Run with: cargo run --example free_modes

use wave_lab::analytic::{free_mode_shape, ModeShapeSpec};
use wave_lab::{DispersionParams, LineParams};

fn main() -> Result<(), wave_lab::Error> {
    let params = LineParams::new(1.0, 1.0, 1.0, 0.0, 0.0, 1.0)?;
    let disp = DispersionParams::from_line(&params)?;
    println!("beta = {}, tau = {:.6} rad", disp.beta, disp.tau);

    let spec = ModeShapeSpec {
        k_ref: 1,
        x_k: 1.0,
        y_k: 0.25,
    };
    let shape = free_mode_shape(&spec, &disp, 12)?;
    println!("{:>4} {:>12} {:>12}", "i", "delta", "y");
    for p in &shape {
        println!("{:>4} {:>12.6} {:>12.6}", p.n, p.delta.re, p.y.re);
    }

    // Certify by substitution: the interior recurrence and the unforced
    // end equation must hold to round-off.
    let m = params.m;
    let s = params.s;
    let w2 = params.omega * params.omega;
    let shape = free_mode_shape(&spec, &disp, 200)?;
    let mut worst = (-m * w2 * shape[0].delta - s * (shape[1].delta - shape[0].delta)).norm();
    for i in 1..shape.len() - 1 {
        let r = -m * w2 * shape[i].delta
            - s * (shape[i + 1].delta + shape[i - 1].delta - 2.0 * shape[i].delta);
        worst = worst.max(r.norm());
    }
    println!("\nmax equation residual over 200 elements: {worst:.3e}");

    // A reference element on a node of the shape cannot prescribe it.
    let singular = ModeShapeSpec {
        k_ref: 2,
        x_k: 1.0,
        y_k: 0.0,
    };
    println!(
        "prescribing at a node: {}",
        free_mode_shape(&singular, &disp, 5).unwrap_err()
    );
    Ok(())
}
