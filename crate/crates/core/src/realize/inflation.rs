use num_complex::Complex64;

use super::Realization;
use crate::disk_geometry::BlaschkeProduct;
use crate::error::{invalid, numerical, Result};
use crate::linalg::{kron, unitarity_defect, CMatrix, CVector};
use crate::model_space::ModelSpace;
use crate::tto::{tto_from_samples, Operator, Symbol};

/// `n x n` Toeplitz matrix with `(j, l)` entry `a_{j - l}`, the matrix of the
/// symbol on `K_{z^n}`.
pub fn toeplitz_matrix(symbol: &Symbol, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |j, l| {
        symbol
            .laurent
            .get(&(j as i32 - l as i32))
            .copied()
            .unwrap_or_default()
    })
}

/// Realizes `T(psi) ⊗ I_k` as `A_{psi(B)}` on `K_{B^n}`, for `B` of order `k`.
///
/// The witness takes the `(j, i)`-ordered basis `B^j e_i` to the
/// Takenaka–Malmquist basis of `K_{B^n}`.
pub fn realize_inflation(
    symbol: &Symbol,
    n: usize,
    b: &BlaschkeProduct,
    quad: Option<usize>,
) -> Result<Realization> {
    if n == 0 {
        return invalid("inflation needs n >= 1");
    }
    if symbol.degree() as usize >= n {
        return invalid(format!(
            "symbol degree {} does not fit a {n}x{n} Toeplitz matrix",
            symbol.degree()
        ));
    }
    let k = b.order();
    let mut zeros = Vec::with_capacity(n * k);
    for _ in 0..n {
        zeros.extend_from_slice(b.zeros());
    }
    let theta = BlaschkeProduct::new(b.constant().powi(n as i32), zeros)?;
    let space = ModelSpace::new(theta.clone(), quad)?;
    let inner_space = ModelSpace::new(b.clone(), None)?;

    let b_on_nodes: Vec<Complex64> = space.nodes().iter().map(|&z| b.eval(z)).collect();
    let e_on_nodes: Vec<CVector> = space
        .nodes()
        .iter()
        .map(|&z| inner_space.basis_at(z))
        .collect();
    let mut columns = Vec::with_capacity(n * k);
    for j in 0..n {
        for i in 0..k {
            let samples = CVector::from_iterator(
                space.quad_points(),
                e_on_nodes
                    .iter()
                    .zip(&b_on_nodes)
                    .map(|(e, &bz)| bz.powi(j as i32) * e[i]),
            );
            columns.push(space.project(&samples)?);
        }
    }
    let f = CMatrix::from_columns(&columns);
    let defect = unitarity_defect(&f);
    if defect > 1e-9 {
        return numerical(format!(
            "doubly indexed family is not orthonormal (defect {defect:e})"
        ));
    }

    let psi_of_b: Vec<Complex64> = b_on_nodes.iter().map(|&w| symbol.eval(w)).collect();
    let a = tto_from_samples(&space, &psi_of_b)?;
    let input = kron(&toeplitz_matrix(symbol, n), &CMatrix::identity(k, k));
    Ok(Realization::unitary(
        theta,
        Operator::new(a, None),
        f,
        &input,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, fro, ONE, ZERO};
    use std::collections::BTreeMap;

    #[test]
    fn toeplitz_layout() {
        let s = Symbol::new(BTreeMap::from([(-1, c(2.0, 0.0)), (1, ONE)]));
        let t = toeplitz_matrix(&s, 3);
        assert_eq!(t[(1, 0)], ONE);
        assert_eq!(t[(0, 1)], c(2.0, 0.0));
        assert_eq!(t[(0, 0)], ZERO);
    }

    #[test]
    fn trivial_inflation_is_scalar() {
        let b = BlaschkeProduct::from_zeros(vec![c(0.2, 0.1), c(-0.3, 0.0)]).unwrap();
        let r = realize_inflation(&Symbol::constant(c(1.5, -0.5)), 1, &b, None).unwrap();
        let expected = CMatrix::identity(2, 2) * c(1.5, -0.5);
        assert!(fro(&(&r.operator.matrix - expected)) < 1e-12);
    }

    #[test]
    fn shift_by_two() {
        let b = BlaschkeProduct::monomial(2).unwrap();
        let r = realize_inflation(&Symbol::monomial(1, ONE), 2, &b, None).unwrap();
        let shift = CMatrix::from_fn(4, 4, |i, j| if i == j + 2 { ONE } else { ZERO });
        assert!(fro(&(&r.operator.matrix - shift)) < 1e-10);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn random_symbol_on_two_zeros() {
        let b = BlaschkeProduct::from_zeros(vec![c(0.2, 0.0), c(-0.3, 0.0)]).unwrap();
        let s = Symbol::new(BTreeMap::from([
            (-2, c(0.3, 0.1)),
            (-1, c(-1.0, 0.2)),
            (0, c(0.5, 0.5)),
            (1, c(0.0, -0.7)),
            (2, c(1.2, 0.0)),
        ]));
        let r = realize_inflation(&s, 3, &b, None).unwrap();
        assert!(r.residual < 1e-8);
    }

    #[test]
    fn oversized_symbol_is_rejected() {
        let b = BlaschkeProduct::monomial(2).unwrap();
        assert!(realize_inflation(&Symbol::monomial(2, ONE), 2, &b, None).is_err());
    }
}
