use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Realization;
use crate::config::Tolerances;
use crate::disk_geometry::BlaschkeProduct;
use crate::error::{invalid, numerical, Result};
use crate::json::cplx_vec;
use crate::linalg::{arg_positive, CMatrix, CVector};
use crate::model_space::ModelSpace;
use crate::tto::Operator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalRealization {
    #[serde(flatten)]
    pub realization: Realization,
    /// Ascending coefficients of `p` with `operator = p(U_alpha)`.
    #[serde(with = "cplx_vec")]
    pub polynomial: Vec<Complex64>,
    /// Eigenvalues in the order matched to the Clark points.
    #[serde(with = "cplx_vec")]
    pub eigenvalues: Vec<Complex64>,
    #[serde(with = "cplx_vec")]
    pub clark_points: Vec<Complex64>,
}

/// Descending modulus, then argument in `[0, 2pi)`.
fn sort_spectrum(eigs: &mut [Complex64]) {
    eigs.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(arg_positive(*a).total_cmp(&arg_positive(*b)))
    });
}

/// Coefficients of the interpolating polynomial through `(x_j, y_j)`.
fn lagrange(x: &[Complex64], y: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = x.len();
    let v = CMatrix::from_fn(n, n, |i, j| x[i].powi(j as i32));
    match v.lu().solve(&CVector::from_column_slice(y)) {
        Some(c) => Ok(c.iter().copied().collect()),
        None => numerical("interpolation nodes are not distinct"),
    }
}

/// Realizes the diagonal matrix with the given eigenvalues as `p(U_alpha)`
/// on `K_theta`, for `theta(0) = 0`.
pub fn realize_normal(
    eigs: &[Complex64],
    theta: &BlaschkeProduct,
    alpha: Complex64,
    quad: Option<usize>,
    tol: &Tolerances,
) -> Result<NormalRealization> {
    if eigs.len() != theta.order() {
        return invalid(format!(
            "{} eigenvalues given for a space of dimension {}",
            eigs.len(),
            theta.order()
        ));
    }
    if eigs.iter().any(|z| !z.is_finite()) {
        return invalid("eigenvalues must be finite");
    }
    let space = ModelSpace::new(theta.clone(), quad)?;
    let clark = space.clark_system(alpha, tol)?;
    let mut mu = eigs.to_vec();
    sort_spectrum(&mut mu);
    let kernels: Vec<CVector> = clark
        .points
        .iter()
        .map(|&z| space.normalized_kernel(z))
        .collect::<Result<_>>()?;
    let w = CMatrix::from_columns(&kernels);
    let d = CMatrix::from_diagonal(&CVector::from_column_slice(&mu));
    let a = &w * &d * w.adjoint();
    let polynomial = lagrange(&clark.points, &mu)?;
    Ok(NormalRealization {
        realization: Realization::unitary(theta.clone(), Operator::new(a, None), w, &d),
        polynomial,
        eigenvalues: mu,
        clark_points: clark.points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, eigenvalues, fro, poly_eval, ONE, ZERO};
    use crate::tto::{clark_operator, tto_membership};

    #[test]
    fn clark_points_give_the_clark_operator() {
        let tol = Tolerances::default();
        let theta = BlaschkeProduct::from_zeros(vec![ZERO, c(0.3, 0.4), c(-0.5, 0.1)]).unwrap();
        let space = ModelSpace::new(theta.clone(), None).unwrap();
        let pts = space.clark_system(ONE, &tol).unwrap().points;
        let r = realize_normal(&pts, &theta, ONE, None, &tol).unwrap();
        let u = clark_operator(&space, ONE, &tol).unwrap().matrix;
        assert!(fro(&(&r.realization.operator.matrix - u)) < 1e-10);
    }

    #[test]
    fn two_point_interpolation() {
        let tol = Tolerances::default();
        let theta = BlaschkeProduct::monomial(2).unwrap();
        let r = realize_normal(&[c(3.0, 0.0), c(0.0, -1.0)], &theta, ONE, None, &tol).unwrap();
        assert!((r.polynomial[0] - c(1.5, -0.5)).norm() < 1e-12);
        assert!((r.polynomial[1] - c(1.5, 0.5)).norm() < 1e-12);
        let ev = eigenvalues(&r.realization.operator.matrix).unwrap();
        assert!(ev.iter().any(|z| (z - c(3.0, 0.0)).norm() < 1e-10));
        assert!(ev.iter().any(|z| (z - c(0.0, -1.0)).norm() < 1e-10));
    }

    #[test]
    fn repeated_eigenvalues() {
        let tol = Tolerances::default();
        let theta = BlaschkeProduct::monomial(3).unwrap();
        let eigs = [ONE, ONE, c(2.0, 0.0)];
        let r = realize_normal(&eigs, &theta, ONE, None, &tol).unwrap();
        let a = &r.realization.operator.matrix;
        assert!(fro(&(a * a.adjoint() - a.adjoint() * a)) < 1e-9);
        let mut ev: Vec<f64> = eigenvalues(a).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        assert!(
            (ev[0] - 1.0).abs() < 1e-9 && (ev[1] - 1.0).abs() < 1e-9 && (ev[2] - 2.0).abs() < 1e-9
        );
        let space = ModelSpace::new(theta, None).unwrap();
        assert!(tto_membership(&space, a, &tol).unwrap() < 1e-9);
        for (z, mu) in r.clark_points.iter().zip(&r.eigenvalues) {
            assert!((poly_eval(&r.polynomial, *z) - mu).norm() < 1e-10);
        }
    }

    #[test]
    fn preconditions() {
        let tol = Tolerances::default();
        let theta = BlaschkeProduct::monomial(2).unwrap();
        assert!(realize_normal(&[ONE], &theta, ONE, None, &tol).is_err());
        let shifted = BlaschkeProduct::from_zeros(vec![c(0.5, 0.0), c(0.1, 0.0)]).unwrap();
        assert!(realize_normal(&[ONE, ONE], &shifted, ONE, None, &tol).is_err());
    }
}
