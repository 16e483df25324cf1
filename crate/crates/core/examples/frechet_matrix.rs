//! The mode-wise linearization M(ρ, k) at the concentric configuration: its
//! determinant across the critical radius, and why k = 0, 1 never bifurcate.
//!
//! ```bash
//! cargo run --example frechet_matrix
//! ```

use twophase::linearization::{critical_radius_closed_form, det_m, frechet_matrix, mode_coefficients};

fn main() -> twophase::Result<()> {
    let (dim, sigma_c) = (2, 2.0);

    let m = frechet_matrix(dim, sigma_c, 0.5, 2)?;
    println!("M(0.5, 2) = [[{:.6}, {:.6}], [{:.6}, {:.6}]], det = {:.6}", m.a, m.b, m.c, m.d, m.det());
    let coeffs = mode_coefficients(dim, sigma_c, 0.5, 2)?;
    println!("boundary residuals of the mode solution: {:?}", coeffs.boundary_residuals());

    let r_star = critical_radius_closed_form(dim, 2)?;
    println!("\ndet M(R, 2) near R* = {r_star:.12}:");
    for factor in [0.99, 0.999, 1.0, 1.001, 1.01] {
        let r = r_star * factor;
        println!("  R = {r:.12}  det = {:+.6e}", det_m(dim, sigma_c, r, 2)?);
    }

    println!("\nlow modes keep one sign on (0, 1):");
    for k in [0, 1] {
        let samples: Vec<f64> = (1..100).map(|i| det_m(dim, sigma_c, i as f64 / 100.0, k)).collect::<Result<_, _>>()?;
        let (lo, hi) = samples.iter().fold((f64::MAX, f64::MIN), |(l, h), &d| (l.min(d), h.max(d)));
        println!("  k = {k}: det M ranges over [{lo:.4e}, {hi:.4e}]");
    }
    Ok(())
}
