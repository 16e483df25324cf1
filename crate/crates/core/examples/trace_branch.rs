//! Follow the symmetry-breaking branch out of R*(2) and certify its endpoint.
//!
//! ```bash
//! cargo run --release --example trace_branch
//! ```

use twophase::branch::{branch_collapse, trace_branch, verify_branch_point, BranchProblem, BranchSettings};

fn main() -> twophase::Result<()> {
    let (dim, sigma_c, k_star) = (2, 2.0, 2);
    let settings = BranchSettings::for_mode(k_star);
    let diagram = trace_branch(dim, sigma_c, k_star, 0.02, 10, settings)?;

    println!("R*({k_star}) = {:.12}", diagram.r_star);
    if let Some(t) = diagram.tangent {
        println!("tangent at t = {}: xi/eta = {:.8}, gamma/beta = {:.8}", t.t, t.observed_ratio, t.kernel_ratio);
    }
    println!("{:>8} {:>16} {:>12} {:>12} {:>10} {:>4}", "t", "rho", "xi_2", "xi_4", "residual", "it");
    for p in &diagram.points {
        println!(
            "{:>8.4} {:>16.12} {:>12.4e} {:>12.4e} {:>10.2e} {:>4}",
            p.t, p.rho, p.xi_hat[2], p.xi_hat[4], p.residual_norm, p.newton_iters
        );
    }

    let problem = BranchProblem::new(dim, sigma_c, k_star, settings)?;
    let cert = verify_branch_point(&problem, diagram.last())?;
    println!("\ncertificate at t = {}: {cert:#?}", diagram.last().t);

    // pinning a mode that has no critical radius gets nowhere
    for k in [0, 1] {
        let d = branch_collapse(dim, sigma_c, k, 1e-2, 0.6)?;
        println!("pinning mode {k}: {:?}", d.outcome);
    }
    Ok(())
}
