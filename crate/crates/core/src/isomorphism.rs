//! Unitaries between model spaces that carry one space of truncated Toeplitz
//! operators onto another, and the decision procedure built on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::disk_geometry::{
    blaschke_compose, decide_orbit, BlaschkeProduct, Certificate, MobiusTransform,
};
use crate::error::{invalid, numerical, Result};
use crate::json::cmat;
use crate::linalg::{conj_matrix, unitarity_defect, CMatrix, ONE};
use crate::model_space::ModelSpace;
use crate::tto::{tto_basis, TtoSpan};

/// Unitary from `K_domain` to `K_codomain` in the two orthonormal bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryMap {
    #[serde(with = "cmat")]
    pub matrix: CMatrix,
    pub domain: BlaschkeProduct,
    pub codomain: BlaschkeProduct,
}

impl UnitaryMap {
    fn checked(
        matrix: CMatrix,
        domain: BlaschkeProduct,
        codomain: BlaschkeProduct,
        tol: &Tolerances,
    ) -> Result<Self> {
        let defect = unitarity_defect(&matrix);
        if !(defect < tol.unitary) {
            return numerical(format!("map is not unitary (defect {defect:e})"));
        }
        Ok(Self {
            matrix,
            domain,
            codomain,
        })
    }

    pub fn identity(theta: &BlaschkeProduct) -> Self {
        let n = theta.order();
        Self {
            matrix: CMatrix::identity(n, n),
            domain: theta.clone(),
            codomain: theta.clone(),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &UnitaryMap) -> Self {
        Self {
            matrix: &other.matrix * &self.matrix,
            domain: self.domain.clone(),
            codomain: other.codomain.clone(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
        }
    }
}

/// Matrix of the operator `f -> weight(z) f(pre(z))` from `from` into `to`,
/// by quadrature on the codomain grid.
fn boundary_map(
    from: &ModelSpace,
    to: &ModelSpace,
    pre: impl Fn(Complex64) -> Complex64,
    weight: impl Fn(Complex64) -> Complex64,
) -> CMatrix {
    let m = to.quad_points();
    let n = from.dim();
    let mut images = CMatrix::zeros(m, n);
    for (k, &z) in to.nodes().iter().enumerate() {
        let w = weight(z);
        let e = from.basis_at(pre(z));
        for j in 0..n {
            images[(k, j)] = w * e[j];
        }
    }
    to.table().adjoint() * images / Complex64::from(m as f64)
}

/// `U f = sqrt(psi') (f ∘ psi)`, from `K_Theta` onto `K_{Theta ∘ psi}`.
pub fn unitary_cov(
    theta: &BlaschkeProduct,
    psi: &MobiusTransform,
    quad: Option<usize>,
    tol: &Tolerances,
) -> Result<UnitaryMap> {
    let codomain = blaschke_compose(theta, Some(psi), None, tol)?;
    let from = ModelSpace::new(theta.clone(), quad)?;
    let to = ModelSpace::new(codomain.clone(), quad)?;
    let matrix = boundary_map(&from, &to, |z| psi.eval(z), |z| psi.sqrt_derivative(z));
    UnitaryMap::checked(matrix, theta.clone(), codomain, tol)
}

/// `U f = sqrt(1 - |a|^2) / (1 - conj(a) Theta) f`, from `K_Theta` onto
/// `K_{phi_a ∘ Theta}`.
pub fn unitary_crofoot(
    theta: &BlaschkeProduct,
    a: Complex64,
    quad: Option<usize>,
    tol: &Tolerances,
) -> Result<UnitaryMap> {
    if !a.is_finite() || a.norm() >= 1.0 {
        return invalid(format!("Crofoot parameter {a} is not inside the disk"));
    }
    let codomain = if a == Complex64::new(0.0, 0.0) {
        theta.clone()
    } else {
        blaschke_compose(theta, None, Some(&MobiusTransform::phi(a)), tol)?
    };
    let from = ModelSpace::new(theta.clone(), quad)?;
    let to = ModelSpace::new(codomain.clone(), quad)?;
    let scale = (1.0 - a.norm_sqr()).sqrt();
    let matrix = boundary_map(
        &from,
        &to,
        |z| z,
        |z| scale / (ONE - a.conj() * theta.eval(z)),
    );
    UnitaryMap::checked(matrix, theta.clone(), codomain, tol)
}

/// The linear unitary `JC: K_Theta -> K_{Theta#}`, `(JCf)(z) = conj((Cf)(conj z))`.
///
/// The basis of `K_{Theta#}` is the reflection of the basis of `K_Theta`, so
/// the matrix is `conj(M)` for the conjugation matrix `M`.
pub fn unitary_sharp(
    theta: &BlaschkeProduct,
    quad: Option<usize>,
    tol: &Tolerances,
) -> Result<UnitaryMap> {
    let space = ModelSpace::new(theta.clone(), quad)?;
    let matrix = conj_matrix(&space.conjugation_matrix());
    UnitaryMap::checked(matrix, theta.clone(), theta.sharp(), tol)
}

/// Unitary `K_{Theta1} -> K_{Theta2}` for `Theta1 = post ∘ Theta2' ∘ pre`.
///
/// Writes `post^{-1} = eta phi_b`, then applies the Crofoot transform with
/// parameter `b`, the rotation (trivial on coordinates), the change of
/// variables by `pre^{-1}`, and finally `JC` when the certificate is sharp.
/// Returns the map together with the `Theta2` it lands on.
pub fn certificate_unitary(
    theta1: &BlaschkeProduct,
    cert: &Certificate,
    quad: Option<usize>,
    tol: &Tolerances,
) -> Result<(UnitaryMap, BlaschkeProduct)> {
    let post_inv = cert.post.inverse();
    let mut map = unitary_crofoot(theta1, post_inv.a, quad, tol)?;
    map.codomain = map
        .codomain
        .with_constant(map.codomain.constant() * post_inv.eta);
    let pre_inv = cert.pre.inverse();
    if !pre_inv.is_rotation(0.0) || pre_inv.eta != ONE {
        map = map.then(&unitary_cov(&map.codomain, &pre_inv, quad, tol)?);
    }
    if cert.sharp {
        map = map.then(&unitary_sharp(&map.codomain, quad, tol)?);
    }
    let realized = map.codomain.clone();
    Ok((map, realized))
}

/// [`certificate_unitary`] followed by the change of basis onto the given
/// representation of `Theta2`, whose zero list may be ordered differently.
pub fn certificate_unitary_to(
    theta1: &BlaschkeProduct,
    theta2: &BlaschkeProduct,
    cert: &Certificate,
    quad: Option<usize>,
    tol: &Tolerances,
) -> Result<UnitaryMap> {
    let (map, realized) = certificate_unitary(theta1, cert, quad, tol)?;
    let target = ModelSpace::new(theta2.clone(), quad)?;
    let source = ModelSpace::new(realized, quad)?;
    let change = target.transition_from(&source);
    let defect = unitarity_defect(&change);
    if !(defect < 1e-8) {
        return numerical(format!(
            "certificate lands on a different model space (transition defect {defect:e})"
        ));
    }
    UnitaryMap::checked(&change * map.matrix, theta1.clone(), theta2.clone(), tol)
}

/// Worst membership residual of `U B U*` over a basis of `T_domain`, and of
/// `U* B U` over a basis of `T_codomain`.
pub fn verify_spatial_iso(u: &UnitaryMap, quad: Option<usize>, tol: &Tolerances) -> Result<f64> {
    let n = u.domain.order();
    if u.codomain.order() != n || u.matrix.shape() != (n, n) {
        return invalid("unitary map dimensions do not match its spaces");
    }
    let dom = ModelSpace::new(u.domain.clone(), quad)?;
    let cod = ModelSpace::new(u.codomain.clone(), quad)?;
    let dom_span = TtoSpan::new(&dom, tol)?;
    let cod_span = TtoSpan::new(&cod, tol)?;
    let m = &u.matrix;
    let forward = tto_basis(&dom, tol)?
        .iter()
        .map(|b| cod_span.residual(&(m * b * m.adjoint())))
        .fold(0.0, f64::max);
    let backward = tto_basis(&cod, tol)?
        .iter()
        .map(|b| dom_span.residual(&(m.adjoint() * b * m)))
        .fold(0.0, f64::max);
    Ok(forward.max(backward))
}

/// A certificate for `T_{Theta1} ≅ T_{Theta2}`, verified end to end, or
/// `None` when `Theta1` lies in neither orbit of `Theta2` and `Theta2#`.
pub fn decide_spatial_iso(
    theta1: &BlaschkeProduct,
    theta2: &BlaschkeProduct,
    quad: Option<usize>,
    tol: &Tolerances,
) -> Result<Option<Certificate>> {
    let found = match decide_orbit(theta1, theta2, tol)? {
        Some((post, pre)) => Some(Certificate::new(post, pre, false)),
        None => decide_orbit(theta1, &theta2.sharp(), tol)?
            .map(|(post, pre)| Certificate::new(post, pre, true)),
    };
    let Some(cert) = found else {
        return Ok(None);
    };
    let u = certificate_unitary_to(theta1, theta2, &cert, quad, tol)?;
    let residual = verify_spatial_iso(&u, quad, tol)?;
    if !(residual < tol.decision) {
        return numerical(format!(
            "orbit certificate found but the spatial isomorphism check failed (residual {residual:e})"
        ));
    }
    Ok(Some(cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk_geometry::schwarz_pick_invariant;
    use crate::linalg::{c, fro, I, ZERO};
    use crate::tto::{compressed_shift, tto_from_symbol, Symbol};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn z_n(n: usize) -> BlaschkeProduct {
        BlaschkeProduct::monomial(n).unwrap()
    }

    #[test]
    fn cov_examples() {
        let t = tol();
        let u = unitary_cov(&z_n(2), &MobiusTransform::identity(), None, &t).unwrap();
        assert!(fro(&(u.matrix - CMatrix::identity(2, 2))) < 1e-12);

        let u = unitary_cov(&z_n(2), &MobiusTransform::rotation(I), None, &t).unwrap();
        assert!((u.matrix.determinant().norm() - 1.0).abs() < 1e-10);

        let theta = BlaschkeProduct::from_zeros(vec![c(0.2, 0.1), c(-0.3, 0.4), ZERO]).unwrap();
        let psi = MobiusTransform::new(c(0.6, 0.8), c(0.3, -0.2)).unwrap();
        let u = unitary_cov(&theta, &psi, None, &t).unwrap();
        let from = ModelSpace::new(theta.clone(), None).unwrap();
        let to = ModelSpace::new(u.codomain.clone(), None).unwrap();
        let az = compressed_shift(&from).matrix;
        let samples: Vec<Complex64> = to.nodes().iter().map(|&z| psi.eval(z)).collect();
        let a_psi = crate::tto::tto_from_samples(&to, &samples).unwrap();
        assert!(fro(&(&u.matrix * az - a_psi * &u.matrix)) < 1e-8);
    }

    #[test]
    fn crofoot_examples() {
        let t = tol();
        let u = unitary_crofoot(&z_n(2), ZERO, None, &t).unwrap();
        assert!(fro(&(u.matrix - CMatrix::identity(2, 2))) < 1e-12);

        let u = unitary_crofoot(&z_n(2), c(0.5, 0.0), None, &t).unwrap();
        assert!(unitarity_defect(&u.matrix) < 1e-10);
        assert!(verify_spatial_iso(&u, None, &t).unwrap() < 1e-8);

        let back = unitary_crofoot(&u.codomain, c(-0.5, 0.0), None, &t).unwrap();
        let src = ModelSpace::new(z_n(2), None).unwrap();
        let mid = ModelSpace::new(back.codomain.clone(), None).unwrap();
        let round = src.transition_from(&mid) * back.matrix * &u.matrix;
        assert!(fro(&(round - CMatrix::identity(2, 2))) < 1e-9);
    }

    #[test]
    fn sharp_examples() {
        let t = tol();
        let u = unitary_sharp(&z_n(2), None, &t).unwrap();
        let space = ModelSpace::new(z_n(2), None).unwrap();
        let k0 = space.kernel(ZERO).unwrap();
        let ck0 = space.conjugate(&k0).unwrap();
        assert!((&u.matrix * &k0 - ck0).norm() < 1e-10);
        let az = compressed_shift(&space).matrix;
        assert!(fro(&(&u.matrix * &az * u.matrix.adjoint() - az.adjoint())) < 1e-9);
    }

    #[test]
    fn sharp_transport_rule() {
        let t = tol();
        let theta =
            BlaschkeProduct::new(c(0.0, 1.0), vec![c(0.3, 0.4), c(-0.5, 0.1), c(0.1, -0.6)])
                .unwrap();
        let u = unitary_sharp(&theta, None, &t).unwrap();
        let from = ModelSpace::new(theta.clone(), None).unwrap();
        let to = ModelSpace::new(u.codomain.clone(), None).unwrap();
        let phi = Symbol::new([(-2, c(0.1, 0.3)), (1, c(1.0, -0.4)), (0, c(0.2, 0.0))].into());
        let a = tto_from_symbol(&from, &phi).matrix;
        let b = tto_from_symbol(&to, &phi.sharp().conj()).matrix;
        assert!(fro(&(&u.matrix * a * u.matrix.adjoint() - b)) < 1e-8);
    }

    #[test]
    fn certificate_examples() {
        let t = tol();
        let (u, realized) =
            certificate_unitary(&z_n(2), &Certificate::identity(), None, &t).unwrap();
        assert!(fro(&(u.matrix - CMatrix::identity(2, 2))) < 1e-12);
        assert_eq!(realized.zeros(), z_n(2).zeros());

        let cert = Certificate::new(
            MobiusTransform::phi(c(0.25, 0.0)),
            MobiusTransform::identity(),
            false,
        );
        let (u, _) = certificate_unitary(&z_n(2), &cert, None, &t).unwrap();
        assert!(unitarity_defect(&u.matrix) < 1e-10);

        let z3 = z_n(3);
        let cert = Certificate::new(
            MobiusTransform::new(I, c(0.2, -0.1)).unwrap(),
            MobiusTransform::new(c(0.6, -0.8), c(0.0, 0.35)).unwrap(),
            true,
        );
        let (u, _) = certificate_unitary(&z3, &cert, None, &t).unwrap();
        assert!(verify_spatial_iso(&u, None, &t).unwrap() < 1e-8);
    }

    #[test]
    fn decide_examples() {
        let t = tol();
        let b = BlaschkeProduct::from_zeros(vec![c(0.3, 0.1), c(-0.6, 0.2)]).unwrap();
        assert!(decide_spatial_iso(&z_n(2), &b, None, &t).unwrap().is_some());
        let b = BlaschkeProduct::from_zeros(vec![c(0.1, 0.0), c(0.2, 0.0), c(0.3, 0.0)]).unwrap();
        assert!(decide_spatial_iso(&z_n(3), &b, None, &t).unwrap().is_none());
    }

    #[test]
    fn sharp_orbit_is_detected() {
        let t = tol();
        let b = BlaschkeProduct::new(
            c(0.8, 0.6),
            vec![c(0.3, 0.4), c(-0.5, 0.1), c(0.1, -0.6), c(0.0, 0.2)],
        )
        .unwrap();
        let pre = MobiusTransform::new(I, c(0.1, 0.2)).unwrap();
        let post = MobiusTransform::new(-ONE, c(-0.3, 0.0)).unwrap();
        let theta1 = blaschke_compose(&b.sharp(), Some(&pre), Some(&post), &t).unwrap();
        let cert = decide_spatial_iso(&theta1, &b, None, &t).unwrap().unwrap();
        assert!(cert.sharp);
    }

    #[test]
    fn schwarz_pick_is_an_orbit_invariant() {
        let t = tol();
        let b = BlaschkeProduct::from_zeros(vec![c(0.3, 0.4), c(-0.5, 0.1), c(0.1, -0.6)]).unwrap();
        let pre = MobiusTransform::new(I, c(0.1, 0.2)).unwrap();
        let post = MobiusTransform::new(-ONE, c(-0.3, 0.5)).unwrap();
        let theta1 = blaschke_compose(&b, Some(&pre), Some(&post), &t).unwrap();
        let cert = decide_spatial_iso(&theta1, &b, None, &t).unwrap().unwrap();
        assert!(!cert.sharp);
        for lam in [c(0.1, 0.1), c(-0.4, 0.5), c(0.7, -0.2)] {
            let lhs = schwarz_pick_invariant(&theta1, lam);
            let rhs = schwarz_pick_invariant(&b, cert.pre.eval(lam));
            assert!((lhs - rhs).abs() < 1e-8);
        }
    }

    #[test]
    fn random_unitary_is_not_a_spatial_isomorphism() {
        let t = tol();
        let b = BlaschkeProduct::from_zeros(vec![c(0.1, 0.0), c(0.2, 0.0), c(0.3, 0.0)]).unwrap();
        let q = CMatrix::from_fn(3, 3, |i, j| {
            c(
                (i * 3 + j) as f64 * 0.37 % 1.0,
                ((i + 2 * j) as f64 * 0.61) % 1.0,
            )
        });
        let u = q.qr().q();
        let map = UnitaryMap {
            matrix: u,
            domain: z_n(3),
            codomain: b,
        };
        assert!(verify_spatial_iso(&map, None, &t).unwrap() > 1e-2);
    }
}
