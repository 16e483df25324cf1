//! The integral identity behind the rigidity argument: closed forms on offset
//! balls, then the full balance on the counterexample.
//!
//! ```bash
//! cargo run --example identities
//! ```

use twophase::counterexample::{build_counterexample, translate_to_identity_frame, CKConfig};
use twophase::harmonics::AngularQuadrature;
use twophase::identities::{
    grad_xi_iii_closed, term_ii_closed, term_ii_quadrature, term_iii_closed, term_iii_quadrature, OffsetBallConfig,
};

fn main() -> twophase::Result<()> {
    let quad = AngularQuadrature::zonal(3, 32)?;
    for z in [0.0, 0.1, 0.3] {
        let cfg = OffsetBallConfig::new(3, 2.0, z, 1.5)?;
        let pts = cfg.surface(&quad)?.geometry();
        let u = cfg.interior_values(&pts);
        println!(
            "z = {z}: II = {:.10e} (quadrature {:.10e}), III(xi=1) = {:.10e} (quadrature {:.10e}), grad III = {:.6e}",
            term_ii_closed(&cfg),
            term_ii_quadrature(&pts, 3, 2.0, 1.5 * 1.5),
            term_iii_closed(&cfg, 1.0),
            term_iii_quadrature(&pts, &u, 3, 2.0, 1.0)?,
            grad_xi_iii_closed(&cfg),
        );
    }

    let config = CKConfig::resolve(2, 2.0, 1.0, None, Some(0.1), Some(1.0))?;
    println!("\n{:>6} {:>4} {:>14} {:>14} {:>14} {:>14} {:>10}", "order", "xi", "deficit", "I", "II", "III", "rel.res");
    for order in [4, 8, 16, 64] {
        let quad = AngularQuadrature::zonal(2, order)?;
        let frame = translate_to_identity_frame(&build_counterexample(&config, &quad)?, &quad)?;
        for xi in [0.0, 1.0] {
            let r = frame.verify(xi, 32)?;
            println!(
                "{order:>6} {xi:>4} {:>14.8e} {:>14.8e} {:>14.8e} {:>14.8e} {:>10.2e}",
                r.deficit, r.term_i, r.term_ii, r.term_iii, r.relative_residual
            );
        }
    }
    Ok(())
}
