//! Truncated Toeplitz operators `A_phi = P_Theta M_phi` as matrices in the
//! orthonormal basis of a [`ModelSpace`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::config::Tolerances;
use crate::error::{invalid, numerical, Result};
use crate::json::{cmat, cplx_map};
use crate::linalg::{
    column_space, conj_matrix, fro, residual_to_span, singular_values, tensor, vectorize, CMatrix,
    CVector, ONE, ZERO,
};
use crate::model_space::ModelSpace;

/// Trigonometric polynomial `phi(zeta) = sum_m a_m zeta^m`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Symbol {
    #[serde(with = "cplx_map")]
    pub laurent: BTreeMap<i32, Complex64>,
}

impl Symbol {
    pub fn new(laurent: BTreeMap<i32, Complex64>) -> Self {
        Self { laurent }
    }

    pub fn monomial(m: i32, coeff: Complex64) -> Self {
        Self::new(BTreeMap::from([(m, coeff)]))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(0, c)
    }

    /// Analytic polynomial from ascending coefficients.
    pub fn analytic(coeffs: &[Complex64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .enumerate()
                .map(|(m, &a)| (m as i32, a))
                .collect(),
        )
    }

    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        self.laurent.iter().map(|(&m, &a)| a * zeta.powi(m)).sum()
    }

    /// Largest `|m|` with a stored coefficient.
    pub fn degree(&self) -> u32 {
        self.laurent
            .keys()
            .map(|m| m.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// `conj(phi)` on the circle.
    pub fn conj(&self) -> Self {
        Self::new(self.laurent.iter().map(|(&m, &a)| (-m, a.conj())).collect())
    }

    /// `phi#(z) = conj(phi(conj z))`: coefficients conjugated in place.
    pub fn sharp(&self) -> Self {
        Self::new(self.laurent.iter().map(|(&m, &a)| (m, a.conj())).collect())
    }

    pub fn is_coanalytic(&self, tol: f64) -> bool {
        self.laurent.iter().all(|(&m, a)| m <= 0 || a.norm() <= tol)
    }

    pub fn is_analytic(&self, tol: f64) -> bool {
        self.laurent.iter().all(|(&m, a)| m >= 0 || a.norm() <= tol)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.laurent.iter().map(|(&m, &a)| (m, a * s)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.laurent.clone();
        for (&m, &a) in &other.laurent {
            *out.entry(m).or_insert(ZERO) += a;
        }
        Self::new(out)
    }
}

/// Matrix on `K_Theta` coordinates, optionally tagged with its symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Operator {
    #[serde(with = "cmat")]
    pub matrix: CMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<Symbol>,
}

impl Operator {
    pub fn new(matrix: CMatrix, symbol: Option<Symbol>) -> Self {
        Self { matrix, symbol }
    }
}

/// Entries `<phi e_j, e_i>` from boundary samples of `phi` on the nodes.
pub fn tto_from_samples(space: &ModelSpace, phi: &[Complex64]) -> Result<CMatrix> {
    if phi.len() != space.quad_points() {
        return invalid(format!(
            "expected {} symbol samples, got {}",
            space.quad_points(),
            phi.len()
        ));
    }
    let table = space.table();
    let weighted = CMatrix::from_fn(table.nrows(), table.ncols(), |k, j| phi[k] * table[(k, j)]);
    Ok(table.adjoint() * weighted / Complex64::from(space.quad_points() as f64))
}

pub fn tto_from_symbol(space: &ModelSpace, phi: &Symbol) -> Operator {
    let samples: Vec<Complex64> = space.nodes().iter().map(|&z| phi.eval(z)).collect();
    let matrix = tto_from_samples(space, &samples).expect("sample count matches the grid");
    Operator::new(matrix, Some(phi.clone()))
}

/// `A_z`.
pub fn compressed_shift(space: &ModelSpace) -> Operator {
    tto_from_symbol(space, &Symbol::monomial(1, ONE))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankOneKind {
    /// `K_lam ⊗ C K_lam`, interior `lam`.
    #[serde(rename = "K_CK")]
    KCk,
    /// `C K_lam ⊗ K_lam`, interior `lam`.
    #[serde(rename = "CK_K")]
    CkK,
    /// `K_eta ⊗ K_eta`, boundary `eta`.
    #[serde(rename = "Kb_Kb")]
    KbKb,
}

pub fn rank_one_tto(space: &ModelSpace, kind: RankOneKind, lam: Complex64) -> Result<Operator> {
    let interior = lam.norm() < 1.0;
    match kind {
        RankOneKind::KCk | RankOneKind::CkK if !interior => {
            invalid(format!("{kind:?} needs an interior point, got {lam}"))
        }
        RankOneKind::KbKb if (lam.norm() - 1.0).abs() > 1e-12 => {
            invalid(format!("Kb_Kb needs a boundary point, got {lam}"))
        }
        _ => {
            let k = space.kernel(lam)?;
            let matrix = match kind {
                RankOneKind::KCk => tensor(&k, &space.conjugate(&k)?),
                RankOneKind::CkK => tensor(&space.conjugate(&k)?, &k),
                RankOneKind::KbKb => tensor(&k, &k),
            };
            Ok(Operator::new(matrix, None))
        }
    }
}

fn basis_points(n: usize, radius: f64) -> Vec<Complex64> {
    let count = 2 * n - 1;
    (0..count)
        .map(|i| Complex64::from_polar(radius, std::f64::consts::TAU * i as f64 / count as f64))
        .collect()
}

/// Smallest singular value of the vectorized stack, columns normalized.
fn independence(ops: &[CMatrix]) -> f64 {
    let n2 = ops[0].len();
    let stack = CMatrix::from_fn(n2, ops.len(), |i, j| {
        let v = ops[j].as_slice()[i];
        v / fro(&ops[j])
    });
    singular_values(&stack).last().copied().unwrap_or(0.0)
}

/// Orthonormal basis of `span{A_{e_k}, A_{conj e_k}}`, which is all of
/// `T_Theta` because every TTO has a symbol `f + conj g` with `f, g` in
/// `K_Theta`.
fn symbol_basis(space: &ModelSpace) -> Result<Vec<CMatrix>> {
    let n = space.dim();
    let table = space.table();
    let mut cols = Vec::with_capacity(2 * n);
    for k in 0..n {
        let f: Vec<Complex64> = table.column(k).iter().copied().collect();
        let g: Vec<Complex64> = f.iter().map(|z| z.conj()).collect();
        for samples in [f, g] {
            let v = vectorize(&tto_from_samples(space, &samples)?);
            let norm = v.norm();
            if norm > 0.0 {
                cols.push(v / Complex64::from(norm));
            }
        }
    }
    let svd = CMatrix::from_columns(&cols).svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let dim = 2 * n - 1;
    if order.len() < dim {
        return numerical("symbol spanning set is too small");
    }
    let (top, last) = (
        svd.singular_values[order[0]],
        svd.singular_values[order[dim - 1]],
    );
    if !(last > 1e-10 * top) {
        return numerical(format!(
            "symbol spanning set has rank below {dim} (singular value ratio {:e})",
            last / top
        ));
    }
    Ok(order[..dim]
        .iter()
        .map(|&j| CMatrix::from_column_slice(n, n, u.column(j).as_slice()))
        .collect())
}

/// `K_{lam_i} ⊗ C K_{lam_i}` at `2n - 1` points on a circle of radius
/// `tol.basis_radius`, retried once at radius 0.6. When both families are
/// numerically dependent (zeros of high order close to the circle), falls
/// back to an orthonormal basis built from the symbols `e_k` and `conj e_k`.
pub fn tto_basis(space: &ModelSpace, tol: &Tolerances) -> Result<Vec<CMatrix>> {
    let n = space.dim();
    for radius in [tol.basis_radius, 0.6] {
        let ops = basis_points(n, radius)
            .into_iter()
            .map(|lam| rank_one_tto(space, RankOneKind::KCk, lam).map(|op| op.matrix))
            .collect::<Result<Vec<_>>>()?;
        if ops.iter().all(|m| fro(m) > 0.0) && independence(&ops) > 1e-8 {
            return Ok(ops);
        }
    }
    symbol_basis(space)
}

/// Orthonormal basis of `vec(T_Theta)`, reusable across membership queries.
#[derive(Debug, Clone)]
pub struct TtoSpan {
    q: CMatrix,
}

impl TtoSpan {
    pub fn new(space: &ModelSpace, tol: &Tolerances) -> Result<Self> {
        let ops = tto_basis(space, tol)?;
        let stack = CMatrix::from_fn(ops[0].len(), ops.len(), |i, j| ops[j].as_slice()[i]);
        let q = column_space(&stack, 1e-10);
        if q.ncols() != ops.len() {
            return numerical("rank-one TTO family lost rank");
        }
        Ok(Self { q })
    }

    pub fn dim(&self) -> usize {
        self.q.ncols()
    }

    /// `||A - P A||_F / ||A||_F`, zero for `A = 0`.
    pub fn residual(&self, a: &CMatrix) -> f64 {
        let norm = fro(a);
        if norm == 0.0 {
            return 0.0;
        }
        residual_to_span(&self.q, &vectorize(a)) / norm
    }

    /// Orthogonal projection of `A` onto `T_Theta`.
    pub fn project(&self, a: &CMatrix) -> CMatrix {
        let v = &self.q * (self.q.adjoint() * vectorize(a));
        CMatrix::from_column_slice(a.nrows(), a.ncols(), v.as_slice())
    }
}

pub fn tto_membership(space: &ModelSpace, a: &CMatrix, tol: &Tolerances) -> Result<f64> {
    if a.nrows() != space.dim() || a.ncols() != space.dim() {
        return invalid(format!(
            "operator is {}x{}, space has dimension {}",
            a.nrows(),
            a.ncols(),
            space.dim()
        ));
    }
    Ok(TtoSpan::new(space, tol)?.residual(a))
}

/// `U_alpha = A_z + alpha K_0 ⊗ C K_0`, for `Theta(0) = 0`.
pub fn clark_operator(space: &ModelSpace, alpha: Complex64, tol: &Tolerances) -> Result<Operator> {
    let v = space.theta().eval(ZERO).norm();
    if v > 1e-10 {
        return invalid(format!("Theta(0) must vanish, |Theta(0)| = {v:e}"));
    }
    if !alpha.is_finite() || (alpha.norm() - 1.0).abs() > tol.unimodular {
        return invalid(format!("alpha {alpha} is not unimodular"));
    }
    let alpha = alpha / alpha.norm();
    let k0 = space.kernel(ZERO)?;
    let ck0 = space.conjugate(&k0)?;
    let matrix = compressed_shift(space).matrix + tensor(&k0, &ck0) * alpha;
    Ok(Operator::new(matrix, None))
}

/// `||C A C - A*||_F / max(1, ||A||_F)`; the matrix of `CAC` is
/// `M conj(A) conj(M)` for the conjugation matrix `M`.
pub fn csym_defect(space: &ModelSpace, a: &CMatrix) -> f64 {
    let m = space.conjugation_matrix();
    csym_defect_with(&m, a)
}

pub fn csym_defect_with(m: &CMatrix, a: &CMatrix) -> f64 {
    let cac = m * conj_matrix(a) * conj_matrix(m);
    fro(&(cac - a.adjoint())) / fro(a).max(1.0)
}

/// `(||A U_alpha - U_alpha A||_F, tto_membership(A))`.
pub fn commutant_membership_check(
    space: &ModelSpace,
    a: &CMatrix,
    alpha: Complex64,
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    let u = clark_operator(space, alpha, tol)?.matrix;
    if a.shape() != u.shape() {
        return invalid("operator dimension does not match the space");
    }
    let commute = fro(&(a * &u - &u * a));
    Ok((commute, tto_membership(space, a, tol)?))
}

/// For `phi = z g`, returns `(||A_phi* K_0||, ||A_phi K_0||)`.
pub fn analytic_normal_defect(
    space: &ModelSpace,
    g: &CVector,
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    if g.len() != space.dim() {
        return invalid("coefficient vector does not match the space");
    }
    let phi: Vec<Complex64> = space
        .samples(g)
        .iter()
        .zip(space.nodes())
        .map(|(v, z)| v * z)
        .collect();
    let m = space.quad_points() as f64;
    let total = phi.iter().map(|v| v.norm_sqr()).sum::<f64>() / m;
    let inside = space
        .project(&CVector::from_column_slice(&phi))?
        .norm_squared();
    let outside = (total - inside).max(0.0).sqrt();
    if outside > tol.membership * total.sqrt().max(1e-300) && total > 0.0 {
        return invalid(format!(
            "z g leaves the model space (relative residual {:e})",
            outside / total.sqrt()
        ));
    }
    let a = tto_from_samples(space, &phi)?;
    let k0 = space.kernel(ZERO)?;
    Ok(((a.adjoint() * &k0).norm(), (a * &k0).norm()))
}
