mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use tto_core::disk_geometry::*;
use tto_core::Tolerances;

/// `2 atanh |z - w| / |1 - conj(w) z|` written out as a log ratio.
fn rho_oracle(z: Complex64, w: Complex64) -> f64 {
    let p = (z - w).norm() / (Complex64::new(1.0, 0.0) - w.conj() * z).norm();
    ((1.0 + p) / (1.0 - p)).ln()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mobius_maps_are_unimodular_on_the_circle(psi in mobius(0.95), t in unimodular()) {
        prop_assert!((psi.eval(t).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mobius_inverse_and_composition(psi in mobius(0.9), chi in mobius(0.9), z in disk_point(0.9)) {
        prop_assert!((psi.inverse().eval(psi.eval(z)) - z).norm() < 1e-10);
        prop_assert!((mobius_compose(&psi, &chi).eval(z) - psi.eval(chi.eval(z))).norm() < 1e-10);
    }

    #[test]
    fn blaschke_products_are_unimodular_and_match_the_product(
        b in blaschke(1..=6, 0.9),
        t in unimodular(),
        z in disk_point(0.95),
    ) {
        prop_assert!((b.eval(t).norm() - 1.0).abs() < 1e-12);
        prop_assert!((b.eval(z) - blaschke_direct(&b, z)).norm() < 1e-12);
        prop_assert!(b.eval(z).norm() < 1.0);
    }

    #[test]
    fn derivative_matches_a_difference_quotient(b in blaschke(1..=5, 0.8), z in disk_point(0.8)) {
        let h = 1e-6;
        let fd = (blaschke_direct(&b, z + h) - blaschke_direct(&b, z - h)) / (2.0 * h);
        let (_, d) = b.eval_with_derivative(z);
        prop_assert!((d - fd).norm() < 1e-6 * (1.0 + d.norm()));
    }

    #[test]
    fn hyperbolic_distance_is_a_mobius_invariant_metric(
        z in disk_point(0.9),
        w in disk_point(0.9),
        v in disk_point(0.9),
        psi in mobius(0.8),
    ) {
        let d = hyperbolic_distance(z, w);
        prop_assert!((d - rho_oracle(z, w)).abs() < 1e-9 * (1.0 + d));
        prop_assert!(hyperbolic_distance(z, z) == 0.0);
        prop_assert!((d - hyperbolic_distance(w, z)).abs() < 1e-12 * (1.0 + d));
        prop_assert!(d <= hyperbolic_distance(z, v) + hyperbolic_distance(v, w) + 1e-9);
        prop_assert!((hyperbolic_distance(psi.eval(z), psi.eval(w)) - d).abs() < 1e-8 * (1.0 + d));
    }

    #[test]
    fn schwarz_pick_invariant_transforms_under_automorphisms(
        b in blaschke(1..=4, 0.7),
        pre in mobius(0.5),
        post in mobius(0.5),
        lam in disk_point(0.6),
    ) {
        let tol = Tolerances::default();
        let composed = blaschke_compose(&b, Some(&pre), Some(&post), &tol).unwrap();
        let lhs = schwarz_pick_invariant(&composed, lam);
        let rhs = schwarz_pick_invariant(&b, pre.eval(lam));
        prop_assert!((lhs - rhs).abs() < 1e-8 * (1.0 + rhs));
        prop_assert!(rhs <= 1.0 + 1e-12);
    }

    #[test]
    fn level_sets_round_trip(b in blaschke(1..=6, 0.8), w in disk_point(0.9)) {
        let tol = Tolerances::default();
        let roots = level_set(&b, w, &tol).unwrap();
        prop_assert_eq!(roots.len(), b.order());
        for z in roots {
            prop_assert!(z.norm() < 1.0);
            prop_assert!((blaschke_direct(&b, z) - w).norm() < 1e-8);
        }
    }

    #[test]
    fn boundary_level_sets_lie_on_the_circle(b in blaschke(1..=6, 0.8), w in unimodular()) {
        let roots = level_set(&b, w, &Tolerances::default()).unwrap();
        prop_assert_eq!(roots.len(), b.order());
        for z in roots {
            prop_assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_points_are_zeros_of_the_derivative(b in blaschke(2..=6, 0.8)) {
        let pts = critical_points(&b, &Tolerances::default()).unwrap();
        prop_assert_eq!(pts.len(), b.order() - 1);
        for z in pts {
            let (_, d) = b.eval_with_derivative(z);
            prop_assert!(d.norm() < 1e-7);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn orbit_decision_recovers_random_compositions(
        b in blaschke(1..=5, 0.7),
        pre in mobius(0.5),
        post in mobius(0.5),
    ) {
        let tol = Tolerances::default();
        let target = blaschke_compose(&b, Some(&pre), Some(&post), &tol).unwrap();
        let (p, q) = decide_orbit(&target, &b, &tol).unwrap().expect("orbit member");
        let cert = Certificate::new(p, q, false);
        prop_assert!(cert.residual(&target, &b) < 1e-8);
    }

    #[test]
    fn independent_products_are_not_in_one_orbit(
        a in blaschke(3..=3, 0.7),
        b in blaschke(3..=3, 0.7),
    ) {
        let tol = Tolerances::default();
        let ca = critical_points(&a, &tol).unwrap();
        let cb = critical_points(&b, &tol).unwrap();
        // for order 3 the orbit is fixed by the distance between the two critical points
        let gap = (hyperbolic_distance(ca[0], ca[1]) - hyperbolic_distance(cb[0], cb[1])).abs();
        prop_assume!(gap > 1e-3);
        prop_assert!(decide_orbit(&a, &b, &tol).unwrap().is_none());
    }
}
