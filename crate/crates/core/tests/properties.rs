//! Invariants checked on random inputs against oracles written out here.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use twophase::annulus::{evaluate_map, PerturbedAnnulus, SolverSettings};
use twophase::counterexample::{exterior_cauchy_solution, CKConfig};
use twophase::harmonics::{direction, eigenvalue, ZonalBasis};
use twophase::identities::{grad_xi_iii_closed, term_iii_closed, OffsetBallConfig};
use twophase::linearization::{critical_radius_closed_form, det_m, det_m_closed_form, frechet_matrix, kernel_vector};
use twophase::radial::{radial_solution, PhaseConfig};

fn legendre(k: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if k == 0 {
        return p0;
    }
    for n in 1..k {
        let n = n as f64;
        let p2 = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn sigma_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![0.1f64..0.95, 1.05f64..10.0]
}

proptest! {
    #[test]
    fn circle_harmonics_are_orthonormal(k in 0usize..16, j in 0usize..16) {
        let basis = ZonalBasis::new(2, 16).unwrap();
        // the trapezoid rule on 64 equispaced points is exact for trigonometric degree < 64
        let n = 64;
        let h = 2.0 * PI / n as f64;
        // cosines are even, so reflect (π, 2π) back onto [0, π]
        let reflected: f64 = (0..n).map(|i| {
            let t = i as f64 * h;
            let t = if t > PI { 2.0 * PI - t } else { t };
            h * basis.eval(k, t).unwrap() * basis.eval(j, t).unwrap()
        }).sum();
        let expected = if k == j { 1.0 } else { 0.0 };
        prop_assert!((reflected - expected).abs() < 1e-12);
    }

    #[test]
    fn sphere_harmonics_are_normalized_legendre(k in 0usize..20, theta in 0.0f64..PI) {
        let basis = ZonalBasis::new(3, 20).unwrap();
        let expected = ((2 * k + 1) as f64 / (4.0 * PI)).sqrt() * legendre(k, theta.cos());
        prop_assert!((basis.eval(k, theta).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn laplace_beltrami_by_finite_differences(dim in 2usize..4, k in 0usize..10, theta in 0.3f64..2.8) {
        let basis = ZonalBasis::new(dim, 10).unwrap();
        let h = 1e-4;
        let y = |t: f64| basis.eval(k, t).unwrap();
        let d1 = (y(theta + h) - y(theta - h)) / (2.0 * h);
        let d2 = (y(theta + h) - 2.0 * y(theta) + y(theta - h)) / (h * h);
        let lb = d2 + (dim as f64 - 2.0) * theta.cos() / theta.sin() * d1;
        let lambda = eigenvalue(k, dim);
        prop_assert!((lb + lambda * y(theta)).abs() <= 1e-5 * (1.0 + lambda));
    }

    #[test]
    fn determinant_matches_factored_form(dim in 2usize..5, k in 2usize..10, r in 0.05f64..0.95, sigma in sigma_strategy()) {
        let d = det_m(dim, sigma, r, k).unwrap();
        let closed = det_m_closed_form(dim, sigma, r, k).unwrap();
        prop_assert!((d - closed).abs() <= 1e-10 * d.abs().max(1e-12));
    }

    #[test]
    fn determinant_changes_sign_at_critical_radius(dim in 2usize..5, k in 2usize..9, sigma in sigma_strategy()) {
        let r = critical_radius_closed_form(dim, k).unwrap();
        let (lo, hi) = (det_m(dim, sigma, r * (1.0 - 1e-6), k).unwrap(), det_m(dim, sigma, r * (1.0 + 1e-6), k).unwrap());
        prop_assert!(lo * hi < 0.0);
    }

    #[test]
    fn kernel_vector_is_unit_null_direction(dim in 2usize..5, k in 2usize..9, sigma in sigma_strategy()) {
        let (beta, gamma) = kernel_vector(dim, sigma, k).unwrap();
        let m = frechet_matrix(dim, sigma, critical_radius_closed_form(dim, k).unwrap(), k).unwrap();
        let scale = m.a.abs().max(m.b.abs()).max(m.c.abs()).max(m.d.abs());
        prop_assert!((m.a * beta + m.b * gamma).abs() <= 1e-10 * scale);
        prop_assert!((m.c * beta + m.d * gamma).abs() <= 1e-10 * scale);
        assert_relative_eq!(beta.hypot(gamma), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn radial_solution_is_negative_with_matching_interface(dim in 2usize..5, sigma in 0.1f64..10.0, rho in 0.05f64..0.95) {
        let sol = radial_solution(&PhaseConfig::new(dim, sigma, rho).unwrap());
        let h = 1e-7;
        prop_assert!((sol.inner_value(rho) - sol.outer_value(rho)).abs() < 1e-14);
        let inner_flux = sigma * (sol.inner_value(rho) - sol.inner_value(rho - h)) / h;
        let outer_flux = (sol.outer_value(rho + h) - sol.outer_value(rho)) / h;
        prop_assert!((inner_flux - outer_flux).abs() < 1e-5);
        prop_assert!(sol.value(1.0).abs() < 1e-14);
        for i in 0..100 {
            prop_assert!(sol.value(i as f64 / 100.0) < 0.0);
        }
    }

    #[test]
    fn term_iii_is_linear_in_xi(dim in 2usize..4, sigma in sigma_strategy(), z in -0.5f64..0.5, xi in -2.0f64..2.0) {
        let cfg = OffsetBallConfig::new(dim, sigma, z, 1.0 + z.abs() + 0.1).unwrap();
        let linear = xi * grad_xi_iii_closed(&cfg);
        prop_assert!((term_iii_closed(&cfg, xi) - linear).abs() <= 1e-14 * linear.abs().max(1.0));
    }

    #[test]
    fn cauchy_solution_satisfies_transmission(sigma in sigma_strategy(), eps in 0.0f64..0.2, a in 0.0f64..PI) {
        use twophase::field::ZonalField;
        let cfg = CKConfig::new(2, sigma, 1.0, eps, 2.0, 0.0).unwrap();
        let sol = exterior_cauchy_solution(&cfg);
        let x = direction(a);
        let (f, grad_f) = sol.interior(x);
        let outer = sol.sample(x);
        prop_assert!((f - outer.value).abs() < 1e-13);
        prop_assert!((sigma * grad_f.dot(&x) - outer.gradient.dot(&x)).abs() < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trivial_annulus_solves_the_overdetermined_problem(dim in 2usize..4, sigma in sigma_strategy(), rho in 0.2f64..0.9) {
        let settings = SolverSettings::for_degree(4);
        let domain = PerturbedAnnulus::trivial(dim, rho, 4).unwrap();
        let (sol, res) = evaluate_map(&domain, sigma, settings).unwrap();
        prop_assert!(res.modal_norm() <= 1e-12 && res.sup_norm() <= 1e-12);
        let exact = radial_solution(&PhaseConfig::new(dim, sigma, rho).unwrap());
        for r in [rho + 0.01, 0.5 * (rho + 1.0), 0.99] {
            use twophase::field::ZonalField;
            prop_assert!((sol.sample(direction(0.7) * r).value - exact.value(r)).abs() < 1e-12);
        }
    }
}
