//! Critical radii R*(k) where det M(·, k) vanishes, with the kernel direction
//! (β, γ) and the transversality value det ∂_R M at the root.
//!
//! ```bash
//! cargo run --example critical_radii
//! ```

use twophase::linearization::{critical_radius, det_dr_closed_form, kernel_vector, RootMethod};

fn main() -> twophase::Result<()> {
    let sigma_c = 2.0;
    println!("{:>3} {:>3} {:>20} {:>10} {:>10} {:>8} {:>14}", "N", "k", "R*", "beta", "gamma", "|diff|", "det dR M");
    for dim in [2, 3, 4] {
        for k in 2..=6 {
            let closed = critical_radius(dim, k, RootMethod::ClosedForm, sigma_c)?.r_star;
            let bisected = critical_radius(dim, k, RootMethod::RootFound, sigma_c)?.r_star;
            let (beta, gamma) = kernel_vector(dim, sigma_c, k)?;
            println!(
                "{dim:>3} {k:>3} {closed:>20.16} {beta:>10.6} {gamma:>10.6} {:>8.1e} {:>14.6e}",
                (closed - bisected).abs(),
                det_dr_closed_form(dim, sigma_c, closed, k)
            );
        }
    }

    // the root does not move with the conductivity
    for sigma_c in [0.3, 7.0] {
        let r = critical_radius(3, 2, RootMethod::RootFound, sigma_c)?.r_star;
        println!("sigma_c = {sigma_c}: R*(2, N=3) = {r:.16}");
    }
    Ok(())
}
