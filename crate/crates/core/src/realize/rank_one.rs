use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Realization;
use crate::disk_geometry::BlaschkeProduct;
use crate::error::{invalid, Result};
use crate::linalg::{inner, tensor, CMatrix, CVector, ONE, ZERO};
use crate::model_space::ModelSpace;
use crate::tto::Operator;

/// Orthonormal columns extending `frame` to a basis of `C^n`.
fn complete(frame: &[CVector], n: usize) -> CMatrix {
    let mut cols: Vec<CVector> = frame.to_vec();
    for k in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = CVector::zeros(n);
        v[k] = ONE;
        for _ in 0..2 {
            for q in &cols {
                let p = inner(&v, q);
                v -= q * p;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            cols.push(v / Complex64::from(norm));
        }
    }
    CMatrix::from_columns(&cols)
}

/// `f` together with the normalized component of `g` orthogonal to it.
fn frame(f: &CVector, g: &CVector) -> Vec<CVector> {
    let rest = g - f * inner(g, f);
    let norm = rest.norm();
    if norm > 1e-12 {
        vec![f.clone(), rest / Complex64::from(norm)]
    } else {
        vec![f.clone()]
    }
}

/// Unitary `U` with `U f1 = f2` and `U g1 = g2`, for unit vectors with
/// `<f1, g1> = <f2, g2>`.
pub fn pairing_unitary(
    f1: &CVector,
    g1: &CVector,
    f2: &CVector,
    g2: &CVector,
    tol: f64,
) -> Result<CMatrix> {
    let n = f1.len();
    if [g1.len(), f2.len(), g2.len()].iter().any(|&l| l != n) {
        return invalid("pairing_unitary needs vectors of equal length");
    }
    if [f1, g1, f2, g2]
        .iter()
        .any(|v| (v.norm() - 1.0).abs() > tol)
    {
        return invalid("pairing_unitary needs unit vectors");
    }
    let gap = (inner(f1, g1) - inner(f2, g2)).norm();
    if gap > tol {
        return invalid(format!("pairings differ by {gap:e}"));
    }
    let mut a = frame(f1, g1);
    let mut b = frame(f2, g2);
    let k = a.len().min(b.len());
    a.truncate(k);
    b.truncate(k);
    Ok(complete(&b, n) * complete(&a, n).adjoint())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankOneBranch {
    /// `<u, v> = 0`: double zero at the origin, `lambda = 0`.
    Orthogonal,
    /// `|<u, v>| = 1`: boundary kernel `k_1 ⊗ k_1`.
    Parallel,
    /// `0 < t < 1`: zero at 0 plus `n - 1` zeros at `t^(1/(n-1))`.
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOneRealization {
    #[serde(flatten)]
    pub realization: Realization,
    pub branch: RankOneBranch,
    /// `|<u, v>| / (||u|| ||v||)`.
    pub t: f64,
    /// `<k_lambda, C k_lambda>` measured in the constructed space.
    pub pairing: f64,
    pub transport_residual: f64,
}

/// Realizes `u ⊗ v` as a rank-one truncated Toeplitz operator on an
/// `n`-dimensional model space.
pub fn realize_rank_one(
    u: &CVector,
    v: &CVector,
    quad: Option<usize>,
) -> Result<RankOneRealization> {
    let n = u.len();
    if n < 2 || v.len() != n {
        return invalid("realize_rank_one needs two vectors of equal length n >= 2");
    }
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return invalid("realize_rank_one needs nonzero vectors");
    }
    let uh = u / Complex64::from(nu);
    let vh = v / Complex64::from(nv);
    let pair = inner(&uh, &vh);
    let t = pair.norm().min(1.0);
    let phase = if t > 0.0 { pair / t } else { ONE };
    // u ⊗ v = ||u|| ||v|| phase (uh ⊗ vr) with <uh, vr> = t
    let vr = &vh * phase;
    let scale = Complex64::from(nu * nv) * phase;

    let (branch, theta, lam) = if t < 1e-12 {
        (
            RankOneBranch::Orthogonal,
            BlaschkeProduct::monomial(n)?,
            ZERO,
        )
    } else if t > 1.0 - 1e-12 {
        (RankOneBranch::Parallel, BlaschkeProduct::monomial(n)?, ONE)
    } else {
        let r = t.powf(1.0 / (n - 1) as f64);
        let mut zeros = vec![ZERO];
        zeros.extend(std::iter::repeat_n(Complex64::from(r), n - 1));
        let sign = if (n - 1).is_multiple_of(2) { ONE } else { -ONE };
        (
            RankOneBranch::Generic,
            BlaschkeProduct::new(sign, zeros)?,
            ZERO,
        )
    };
    let space = ModelSpace::new(theta.clone(), quad)?;
    let k = space.normalized_kernel(lam)?;
    let ck = space.conjugate(&k)?;
    let pairing = inner(&k, &ck);
    let (f2, g2) = match branch {
        RankOneBranch::Parallel => (k.clone(), k.clone()),
        _ => (k.clone(), ck),
    };
    let (f1, g1) = match branch {
        RankOneBranch::Parallel => (uh.clone(), uh.clone()),
        _ => (uh.clone(), vr.clone()),
    };
    let w = pairing_unitary(&f1, &g1, &f2, &g2, 1e-8)?;
    let transport_residual = (&w * &f1 - &f2).norm().max((&w * &g1 - &g2).norm());
    let operator = Operator::new(tensor(&f2, &g2) * scale, None);
    let input = tensor(u, v);
    Ok(RankOneRealization {
        realization: Realization::unitary(theta, operator, w, &input),
        branch,
        t,
        pairing: pairing.re,
        transport_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::linalg::{c, fro, unitarity_defect, I};
    use crate::tto::tto_membership;

    fn vecc(v: &[Complex64]) -> CVector {
        CVector::from_column_slice(v)
    }

    #[test]
    fn pairing_examples() {
        let e1 = vecc(&[ONE, ZERO]);
        let u = pairing_unitary(&e1, &e1, &e1, &e1, 1e-10).unwrap();
        assert!((&u * &e1 - &e1).norm() < 1e-15);

        let e2 = vecc(&[ZERO, ONE]);
        let u = pairing_unitary(&e1, &e2, &e2, &e1, 1e-10).unwrap();
        assert!(fro(&(&u * tensor(&e1, &e2) * u.adjoint() - tensor(&e2, &e1))) < 1e-10);

        let s = 0.75f64.sqrt();
        let f1 = vecc(&[ONE, ZERO, ZERO]);
        let g1 = vecc(&[c(0.5, 0.0), c(0.0, s), ZERO]);
        let f2 = vecc(&[ZERO, ZERO, I]);
        let g2 = vecc(&[c(s, 0.0), ZERO, c(0.0, 0.5)]);
        let u = pairing_unitary(&f1, &g1, &f2, &g2, 1e-10).unwrap();
        assert!(unitarity_defect(&u) < 1e-12);
        assert!(fro(&(&u * tensor(&f1, &g1) * u.adjoint() - tensor(&f2, &g2))) < 1e-10);

        assert!(pairing_unitary(&e1, &e1, &e1, &e2, 1e-10).is_err());
    }

    #[test]
    fn parallel_branch() {
        let e1 = vecc(&[ONE, ZERO]);
        let r = realize_rank_one(&e1, &e1, None).unwrap();
        assert_eq!(r.branch, RankOneBranch::Parallel);
        assert!(r.realization.residual < 1e-9);
        assert!((r.pairing - 1.0).abs() < 1e-10);
    }

    #[test]
    fn orthogonal_branch() {
        let r = realize_rank_one(&vecc(&[ONE, ZERO]), &vecc(&[ZERO, ONE]), None).unwrap();
        assert_eq!(r.branch, RankOneBranch::Orthogonal);
        assert_eq!(r.realization.theta, BlaschkeProduct::monomial(2).unwrap());
        let a = &r.realization.operator.matrix;
        // proportional to 1 ⊗ z
        assert!(a[(1, 0)].norm() < 1e-14 && a[(0, 0)].norm() < 1e-14 && a[(1, 1)].norm() < 1e-14);
        assert!(r.pairing.abs() < 1e-10);
    }

    #[test]
    fn generic_branch() {
        let s = 0.75f64.sqrt();
        let u = vecc(&[ONE, ZERO]);
        let v = vecc(&[c(0.5, 0.0), c(s, 0.0)]);
        let r = realize_rank_one(&u, &v, None).unwrap();
        assert_eq!(r.branch, RankOneBranch::Generic);
        let theta = &r.realization.theta;
        assert_eq!(theta.constant(), -ONE);
        assert_eq!(theta.zeros()[0], ZERO);
        assert!((theta.zeros()[1] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((r.pairing - 0.5).abs() < 1e-10);
        assert!(r.realization.residual < 1e-9);
    }

    #[test]
    fn operators_are_truncated_toeplitz() {
        let u = vecc(&[c(0.3, 1.0), c(-2.0, 0.1), c(0.5, 0.5), ONE]);
        let v = vecc(&[c(1.0, -1.0), c(0.2, 0.0), c(0.0, 0.7), c(-0.4, 0.3)]);
        let r = realize_rank_one(&u, &v, None).unwrap();
        let space = ModelSpace::new(r.realization.theta.clone(), None).unwrap();
        let t = Tolerances::default();
        assert!(tto_membership(&space, &r.realization.operator.matrix, &t).unwrap() < 1e-9);
        assert!(r.realization.residual < 1e-9);
        assert!((r.pairing - r.t).abs() < 1e-10);
    }

    #[test]
    fn zero_vectors_are_rejected() {
        assert!(realize_rank_one(&vecc(&[ZERO, ZERO]), &vecc(&[ONE, ZERO]), None).is_err());
        assert!(realize_rank_one(&vecc(&[ONE]), &vecc(&[ONE]), None).is_err());
    }
}
