//! The shifted-ball counterexample: a domain whose inner phase is radial about
//! εe₁ while neither boundary is a sphere.
//!
//! ```bash
//! cargo run --example counterexample
//! ```

use twophase::counterexample::{build_counterexample, level_radius, CKConfig};
use twophase::harmonics::AngularQuadrature;

fn main() -> twophase::Result<()> {
    let config = CKConfig::resolve(2, 2.0, 1.0, None, Some(0.1), Some(1.0))?;
    let domain = build_counterexample(&config, &AngularQuadrature::zonal(2, 64)?)?;
    let sol = &domain.solution;
    println!("a0 = {}, a1 = {}, b1 = {}", sol.a0, sol.a1, sol.b1);
    println!("admissible gap for gamma: ({:.6}, {:.6})", domain.gap.max_inner, domain.gap.min_outer);

    for (name, theta) in [("0", 0.0), ("pi/2", std::f64::consts::FRAC_PI_2), ("pi", std::f64::consts::PI)] {
        println!("r({name}) = {:.9}", level_radius(sol, &config, config.gamma, theta)?);
    }
    println!("axial defect about the origin:  {:+.6}", domain.axial_defect_origin);
    println!("axial defect about eps e1:      {:+.6}", domain.axial_defect_shifted);
    println!("outer flux standard deviation:  {:.6}", domain.outer_flux_std);
    println!("interior |grad u| spread:       {:.2e}", domain.interior_gradient_std);
    println!(
        "ball about origin: {}, ball about eps e1: {}",
        domain.is_ball_about_origin(),
        domain.is_ball_about_shifted_center()
    );

    // automatic choice of the offset and the level
    let auto = CKConfig::resolve(2, 2.0, 1.0, None, None, None)?;
    println!("\nauto: epsilon = {}, gamma = {:.6}", auto.epsilon, auto.gamma);
    Ok(())
}
