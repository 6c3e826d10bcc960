use nalgebra::{Matrix2x3, Vector2, Vector3};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, TAU};

use super::Realization;
use crate::config::Tolerances;
use crate::disk_geometry::BlaschkeProduct;
use crate::error::{invalid, numerical, Result};
use crate::linalg::{condition_number, schur, CMatrix, CVector};
use crate::model_space::{takagi_factor, ModelSpace};
use crate::tto::{tto_basis, Operator};

/// `[[a, -conj(b)], [b, conj(a)]]` with `a = cos(theta) e^{i p}`,
/// `b = sin(theta) e^{i q}`.
fn su2(x: &Vector3<f64>) -> CMatrix {
    let a = Complex64::from_polar(x[0].cos(), x[1]);
    let b = Complex64::from_polar(x[0].sin(), x[2]);
    CMatrix::from_row_slice(2, 2, &[a, -b.conj(), b, a.conj()])
}

fn asymmetry(r: &CMatrix, x: &Vector3<f64>) -> Vector2<f64> {
    let v = su2(x);
    let s = &v * r * v.adjoint();
    let d = s[(0, 1)] - s[(1, 0)];
    Vector2::new(d.re, d.im)
}

/// Unitary `U` and complex symmetric `S = U T U*`.
///
/// After a Schur step, searches the unitary group for a zero of
/// `S_12 - S_21`: a fixed 16^3 grid seeds a Gauss–Newton refinement.
pub fn symmetrize_2x2(t: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    if t.shape() != (2, 2) {
        return invalid("symmetrize_2x2 needs a 2x2 matrix");
    }
    let scale = t.norm().max(1.0);
    if (t[(0, 1)] - t[(1, 0)]).norm() <= 1e-14 * scale {
        return Ok((t.clone(), CMatrix::identity(2, 2)));
    }
    let (q, r) = schur(t)?;
    let cost = |x: &Vector3<f64>| asymmetry(&r, x).norm_squared();

    let steps = 16;
    let mut best = Vector3::zeros();
    let mut best_cost = f64::INFINITY;
    for i in 0..steps {
        for j in 0..steps {
            for k in 0..steps {
                let x = Vector3::new(
                    FRAC_PI_2 * (i as f64 + 0.5) / steps as f64,
                    TAU * j as f64 / steps as f64,
                    TAU * k as f64 / steps as f64,
                );
                let c = cost(&x);
                if c < best_cost {
                    best_cost = c;
                    best = x;
                }
            }
        }
    }

    let mut x = best;
    for _ in 0..100 {
        let f = asymmetry(&r, &x);
        if f.norm() < 1e-15 * scale {
            break;
        }
        let h = 1e-7;
        let mut jac = Matrix2x3::zeros();
        for p in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[p] += h;
            xm[p] -= h;
            let col = (asymmetry(&r, &xp) - asymmetry(&r, &xm)) / (2.0 * h);
            jac.set_column(p, &col);
        }
        // minimum-norm Gauss–Newton step for 2 equations in 3 unknowns
        let jjt = jac * jac.transpose();
        let Some(inv) = (jjt + nalgebra::Matrix2::identity() * 1e-14 * scale * scale).try_inverse()
        else {
            break;
        };
        let step = jac.transpose() * (inv * f);
        let mut trial = x - step;
        let mut damping = 1.0;
        while asymmetry(&r, &trial).norm() > f.norm() && damping > 1e-6 {
            damping *= 0.5;
            trial = x - step * damping;
        }
        if asymmetry(&r, &trial).norm() >= f.norm() {
            break;
        }
        x = trial;
    }

    let v = su2(&x);
    let u = &v * q.adjoint();
    let s = &u * t * u.adjoint();
    let defect = (s[(0, 1)] - s[(1, 0)]).norm();
    if defect > 1e-8 * scale {
        return numerical(format!("could not symmetrize (asymmetry {defect:e})"));
    }
    let avg = (s[(0, 1)] + s[(1, 0)]) * 0.5;
    let mut s = s;
    s[(0, 1)] = avg;
    s[(1, 0)] = avg;
    Ok((s, u))
}

/// Finds `A` in `T_B` unitarily equivalent to the 2x2 matrix `T`.
///
/// In a C-real orthonormal basis every TTO is complex symmetric, and the
/// three-dimensional `T_B` fills out the symmetric 2x2 matrices, so `A` is
/// the TTO whose matrix in that basis equals the symmetrization of `T`.
pub fn realize_2x2(
    t: &CMatrix,
    b: &BlaschkeProduct,
    quad: Option<usize>,
    tol: &Tolerances,
) -> Result<Realization> {
    if b.order() != 2 {
        return invalid("realize_2x2 needs a Blaschke product of order 2");
    }
    if t.shape() != (2, 2) {
        return invalid("realize_2x2 needs a 2x2 matrix");
    }
    let (s, u) = symmetrize_2x2(t)?;
    let space = ModelSpace::new(b.clone(), quad)?;
    let w = takagi_factor(&space.conjugation_matrix())?;

    let mut last = f64::INFINITY;
    for radius in [tol.basis_radius, 0.6] {
        let local = Tolerances {
            basis_radius: radius,
            ..*tol
        };
        let basis = tto_basis(&space, &local)?;
        let sym: Vec<CMatrix> = basis.iter().map(|op| w.adjoint() * op * &w).collect();
        let system = CMatrix::from_fn(3, 3, |row, col| {
            let (i, j) = [(0, 0), (0, 1), (1, 1)][row];
            sym[col][(i, j)]
        });
        let rhs = CVector::from_vec(vec![s[(0, 0)], s[(0, 1)], s[(1, 1)]]);
        let cond = condition_number(&system);
        last = cond;
        if cond > 1e10 {
            continue;
        }
        let Some(coef) = system.lu().solve(&rhs) else {
            continue;
        };
        let a = basis
            .iter()
            .zip(coef.iter())
            .fold(CMatrix::zeros(2, 2), |acc, (op, &c)| acc + op * c);
        let witness = &w * &u;
        return Ok(Realization::unitary(
            b.clone(),
            Operator::new(a, None),
            witness,
            t,
        ));
    }
    numerical(format!(
        "coefficient system is singular (condition {last:e})"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{
        c, eigenvalues, fro, singular_values, sort_lex, unitarity_defect, ONE, ZERO,
    };
    use crate::tto::tto_membership;

    fn m2(v: [Complex64; 4]) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &v)
    }

    #[test]
    fn symmetric_input_is_kept() {
        let t = m2([ONE, c(0.0, 2.0), c(0.0, 2.0), c(3.0, 0.0)]);
        let (s, u) = symmetrize_2x2(&t).unwrap();
        assert_eq!(s, t);
        assert_eq!(u, CMatrix::identity(2, 2));
    }

    #[test]
    fn jordan_cell_is_symmetrized() {
        let t = m2([ZERO, ONE, ZERO, ZERO]);
        let (s, u) = symmetrize_2x2(&t).unwrap();
        assert!((s[(0, 1)] - s[(1, 0)]).norm() < 1e-9);
        assert!(unitarity_defect(&u) < 1e-12);
        let sv = singular_values(&s);
        assert!((sv[0] - 1.0).abs() < 1e-9 && sv[1] < 1e-9);
    }

    #[test]
    fn normal_input_keeps_spectrum() {
        let q = m2([c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0)]);
        let d = m2([c(2.0, 1.0), ZERO, ZERO, c(-1.0, 0.5)]);
        let t = &q * d * q.adjoint();
        let (s, _) = symmetrize_2x2(&t).unwrap();
        let mut a = eigenvalues(&s).unwrap();
        let mut b = eigenvalues(&t).unwrap();
        sort_lex(&mut a);
        sort_lex(&mut b);
        assert!((a[0] - b[0]).norm() < 1e-9 && (a[1] - b[1]).norm() < 1e-9);
    }

    #[test]
    fn identity_realizes_identity() {
        let t = CMatrix::identity(2, 2);
        let b = BlaschkeProduct::monomial(2).unwrap();
        let r = realize_2x2(&t, &b, None, &Tolerances::default()).unwrap();
        assert!(fro(&(&r.operator.matrix - &t)) < 1e-10);
    }

    #[test]
    fn jordan_cell_in_z_squared() {
        let tol = Tolerances::default();
        let t = m2([ZERO, ONE, ZERO, ZERO]);
        let b = BlaschkeProduct::monomial(2).unwrap();
        let r = realize_2x2(&t, &b, None, &tol).unwrap();
        assert!(r.residual < 1e-8);
        let a = &r.operator.matrix;
        // 2x2 Toeplitz: constant diagonal
        assert!((a[(0, 0)] - a[(1, 1)]).norm() < 1e-9);
        let space = ModelSpace::new(b, None).unwrap();
        assert!(tto_membership(&space, a, &tol).unwrap() < 1e-9);
    }

    #[test]
    fn generic_matrix_keeps_eigenvalues() {
        let tol = Tolerances::default();
        let t = m2([c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.1), c(1.1, 0.4)]);
        let b = BlaschkeProduct::from_zeros(vec![c(0.3, 0.0), c(0.0, -0.4)]).unwrap();
        let r = realize_2x2(&t, &b, None, &tol).unwrap();
        let mut ea = eigenvalues(&r.operator.matrix).unwrap();
        let mut et = eigenvalues(&t).unwrap();
        sort_lex(&mut ea);
        sort_lex(&mut et);
        assert!((ea[0] - et[0]).norm() < 1e-8 && (ea[1] - et[1]).norm() < 1e-8);
        assert!(r.residual < 1e-8);
    }
}
