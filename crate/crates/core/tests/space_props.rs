mod common;

use std::collections::BTreeMap;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use tto_core::linalg::{fro, inner, CMatrix};
use tto_core::model_space::ModelSpace;
use tto_core::tto::{compressed_shift, csym_defect, tto_from_symbol, tto_membership, Symbol};
use tto_core::Tolerances;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn symbol(coeffs: &[Complex64]) -> Symbol {
    let d = (coeffs.len() / 2) as i32;
    Symbol::new(
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| (k as i32 - d, c))
            .collect::<BTreeMap<_, _>>(),
    )
}

/// `<A f, g>` by a fine trapezoidal rule on the circle, using only point
/// evaluation of `f`, `g` and the symbol.
fn compressed_form(
    space: &ModelSpace,
    phi: &Symbol,
    f: &tto_core::linalg::CVector,
    g: &tto_core::linalg::CVector,
) -> Complex64 {
    let m = 4096;
    (0..m)
        .map(|k| {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / m as f64);
            phi.eval(z) * space.eval_fn(f, z) * space.eval_fn(g, z).conj()
        })
        .sum::<Complex64>()
        / m as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernels_match_the_closed_form(
        b in blaschke(1..=6, 0.8),
        lam in disk_point(0.9),
        z in disk_point(0.9),
        f in vector(6),
    ) {
        let n = b.order();
        let space = ModelSpace::new(b.clone(), None).unwrap();
        let k = space.kernel(lam).unwrap();
        let direct = (ONE - blaschke_direct(&b, lam).conj() * blaschke_direct(&b, z)) / (ONE - lam.conj() * z);
        prop_assert!((space.eval_fn(&k, z) - direct).norm() < 1e-9);

        let f = f.rows(0, n).into_owned();
        prop_assert!((space.inner_product(&f, &k).unwrap() - space.eval_fn(&f, lam)).norm() < 1e-9);

        let expected = (1.0 - blaschke_direct(&b, lam).norm_sqr()) / (1.0 - lam.norm_sqr());
        prop_assert!((k.norm_squared() - expected).abs() < 1e-9);
    }

    #[test]
    fn conjugation_is_an_antiunitary_involution(
        b in blaschke(1..=6, 0.8),
        lam in disk_point(0.9),
        z in disk_point(0.9),
        f in vector(6),
        g in vector(6),
    ) {
        let n = b.order();
        let space = ModelSpace::new(b.clone(), None).unwrap();
        let ck = space.conjugate(&space.kernel(lam).unwrap()).unwrap();
        let direct = if (z - lam).norm() > 1e-6 {
            (blaschke_direct(&b, z) - blaschke_direct(&b, lam)) / (z - lam)
        } else {
            b.eval_with_derivative(lam).1
        };
        prop_assert!((space.eval_fn(&ck, z) - direct).norm() < 1e-8);

        let f = f.rows(0, n).into_owned();
        let g = g.rows(0, n).into_owned();
        let cf = space.conjugate(&f).unwrap();
        let cg = space.conjugate(&g).unwrap();
        prop_assert!((space.conjugate(&cf).unwrap() - &f).norm() < 1e-10);
        prop_assert!((inner(&cf, &cg) - inner(&g, &f)).norm() < 1e-10);
    }

    #[test]
    fn normalized_clark_kernels_are_orthonormal(b in blaschke_at_origin(1..=6, 0.8), alpha in unimodular()) {
        let tol = Tolerances::default();
        let space = ModelSpace::new(b, None).unwrap();
        let clark = space.clark_system(alpha, &tol).unwrap();
        let cols: Vec<_> = clark.points.iter().map(|&z| space.normalized_kernel(z).unwrap()).collect();
        let v = CMatrix::from_columns(&cols);
        let n = space.dim();
        prop_assert!(fro(&(v.adjoint() * v - CMatrix::identity(n, n))) < 1e-9);
        let total: f64 = clark.weights.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tto_matrices_match_the_compressed_form(
        b in blaschke(1..=4, 0.7),
        coeffs in prop::collection::vec(complex(), 5),
        f in vector(4),
        g in vector(4),
    ) {
        let n = b.order();
        let space = ModelSpace::new(b, None).unwrap();
        let phi = symbol(&coeffs);
        let a = tto_from_symbol(&space, &phi).matrix;
        let f = f.rows(0, n).into_owned();
        let g = g.rows(0, n).into_owned();
        let lhs = inner(&(&a * &f), &g);
        prop_assert!((lhs - compressed_form(&space, &phi, &f, &g)).norm() < 1e-9);
    }

    #[test]
    fn symbol_to_operator_is_linear_and_respects_adjoints(
        b in blaschke(1..=6, 0.8),
        p in prop::collection::vec(complex(), 7),
        q in prop::collection::vec(complex(), 7),
        s in complex(),
    ) {
        let space = ModelSpace::new(b, None).unwrap();
        let (p, q) = (symbol(&p), symbol(&q));
        let ap = tto_from_symbol(&space, &p).matrix;
        let aq = tto_from_symbol(&space, &q).matrix;
        let sum = tto_from_symbol(&space, &p.scale(s).add(&q)).matrix;
        prop_assert!(fro(&(sum - (&ap * s + &aq))) < 1e-10);
        let adj = tto_from_symbol(&space, &p.conj()).matrix;
        prop_assert!(fro(&(adj - ap.adjoint())) < 1e-10);
    }

    #[test]
    fn ttos_are_complex_symmetric_members(b in blaschke(1..=6, 0.8), p in prop::collection::vec(complex(), 7)) {
        let tol = Tolerances::default();
        let space = ModelSpace::new(b, None).unwrap();
        let a = tto_from_symbol(&space, &symbol(&p)).matrix;
        prop_assert!(csym_defect(&space, &a) < 1e-10);
        prop_assert!(tto_membership(&space, &a, &tol).unwrap() < 1e-8);
    }

    #[test]
    fn compressed_shift_is_the_symbol_z(b in blaschke(1..=6, 0.8)) {
        let space = ModelSpace::new(b, None).unwrap();
        let az = compressed_shift(&space).matrix;
        let direct = tto_from_symbol(&space, &Symbol::monomial(1, ONE)).matrix;
        prop_assert!(fro(&(az - direct)) < 1e-12);
    }
}
