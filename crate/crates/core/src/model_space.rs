//! Coordinates for the model space `K_Theta` of a finite Blaschke product.
//!
//! Elements are stored as coefficient vectors in the Takenaka–Malmquist
//! orthonormal basis built from the zero list of `Theta`; boundary integrals
//! use the trapezoidal rule on `M` equispaced points of the circle.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::config::Tolerances;
use crate::disk_geometry::{level_set, BlaschkeProduct};
use crate::error::{invalid, numerical, Result};
use crate::json::{cplx, cplx_vec};
use crate::linalg::{conj_vector, fro, inner, unitarity_defect, CMatrix, CVector, ONE, ZERO};

/// Coefficient vector of an element of `K_Theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionVec {
    #[serde(with = "cplx_vec")]
    pub coeffs: Vec<Complex64>,
}

impl From<&CVector> for FunctionVec {
    fn from(v: &CVector) -> Self {
        Self {
            coeffs: v.iter().copied().collect(),
        }
    }
}

impl From<&FunctionVec> for CVector {
    fn from(f: &FunctionVec) -> Self {
        CVector::from_column_slice(&f.coeffs)
    }
}

/// Clark points `Theta(zeta_j) = alpha` with weights `1 / |Theta'(zeta_j)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClarkSystem {
    #[serde(with = "cplx")]
    pub alpha: Complex64,
    #[serde(with = "cplx_vec")]
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
}

/// Smallest admissible quadrature size for a space of dimension `n`.
pub fn minimum_quad_points(n: usize) -> usize {
    256.max(8 * (2 * n + 1))
}

/// Quadrature size giving aliasing error near machine precision: the
/// integrands have poles at `1 / conj(a)`, so the trapezoidal error decays
/// like `max|a|^M`.
fn accurate_quad_points(theta: &BlaschkeProduct) -> usize {
    let n = theta.order();
    let r = theta.zeros().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let needed = if r > 0.0 {
        (2.0 * 38.0 / -r.ln()).ceil() as usize
    } else {
        0
    };
    minimum_quad_points(n).max(needed.next_multiple_of(8))
}

/// Values of the Takenaka–Malmquist basis functions at `z`:
/// `e_k(z) = sqrt(1 - |a_k|^2) / (1 - conj(a_k) z) * prod_{j<k} phi_{a_j}(z)`.
pub fn tm_basis(zeros: &[Complex64], z: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(zeros.len());
    let mut prefix = ONE;
    for &a in zeros {
        let den = ONE - a.conj() * z;
        out.push(prefix * (1.0 - a.norm_sqr()).sqrt() / den);
        prefix *= (z - a) / den;
    }
    out
}

#[derive(Debug, Clone)]
pub struct ModelSpace {
    theta: BlaschkeProduct,
    quad_points: usize,
    nodes: Vec<Complex64>,
    /// `table[(k, i)] = e_i(zeta_k)`.
    table: CMatrix,
    theta_on_nodes: Vec<Complex64>,
}

impl ModelSpace {
    /// Builds `K_theta`. Without an explicit size the quadrature uses the
    /// minimum, raised when zeros sit close to the circle.
    pub fn new(theta: BlaschkeProduct, quad_points: Option<usize>) -> Result<Self> {
        let n = theta.order();
        let m = match quad_points {
            Some(m) if m < minimum_quad_points(n) => {
                return invalid(format!(
                    "quad_points {m} is below the minimum {} for dimension {n}",
                    minimum_quad_points(n)
                ))
            }
            Some(m) => m,
            None => accurate_quad_points(&theta),
        };
        let nodes: Vec<Complex64> = (0..m)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / m as f64))
            .collect();
        let mut table = CMatrix::zeros(m, n);
        for (k, &z) in nodes.iter().enumerate() {
            for (i, v) in tm_basis(theta.zeros(), z).into_iter().enumerate() {
                table[(k, i)] = v;
            }
        }
        let theta_on_nodes = nodes.iter().map(|&z| theta.eval(z)).collect();
        Ok(Self {
            theta,
            quad_points: m,
            nodes,
            table,
            theta_on_nodes,
        })
    }

    pub fn theta(&self) -> &BlaschkeProduct {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.order()
    }

    pub fn quad_points(&self) -> usize {
        self.quad_points
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    /// Basis values on the quadrature nodes, one row per node.
    pub fn table(&self) -> &CMatrix {
        &self.table
    }

    pub fn theta_on_nodes(&self) -> &[Complex64] {
        &self.theta_on_nodes
    }

    pub fn basis_at(&self, z: Complex64) -> CVector {
        CVector::from_vec(tm_basis(self.theta.zeros(), z))
    }

    pub fn basis_vector(&self, i: usize) -> CVector {
        let mut v = CVector::zeros(self.dim());
        v[i] = ONE;
        v
    }

    fn check_len(&self, f: &CVector) -> Result<()> {
        if f.len() != self.dim() {
            return invalid(format!(
                "vector has length {}, space has dimension {}",
                f.len(),
                self.dim()
            ));
        }
        Ok(())
    }

    pub fn inner_product(&self, f: &CVector, g: &CVector) -> Result<Complex64> {
        self.check_len(f)?;
        self.check_len(g)?;
        Ok(inner(f, g))
    }

    pub fn eval_fn(&self, f: &CVector, z: Complex64) -> Complex64 {
        self.basis_at(z).dot(f)
    }

    /// Values of `f` on the quadrature nodes.
    pub fn samples(&self, f: &CVector) -> CVector {
        &self.table * f
    }

    /// `K_lam`, with coefficients `conj(e_k(lam))`; `|lam| = 1` is allowed.
    pub fn kernel(&self, lam: Complex64) -> Result<CVector> {
        if !lam.is_finite() || lam.norm() > 1.0 + 1e-12 {
            return invalid(format!("kernel point {lam} lies outside the closed disk"));
        }
        Ok(conj_vector(&self.basis_at(lam)))
    }

    /// Unit-norm kernel `K_lam / ||K_lam||`.
    pub fn normalized_kernel(&self, lam: Complex64) -> Result<CVector> {
        let k = self.kernel(lam)?;
        let norm = k.norm();
        if norm == 0.0 {
            return numerical(format!("kernel at {lam} vanishes"));
        }
        Ok(k / Complex64::from(norm))
    }

    /// `P_Theta` of a function given by its samples on the nodes.
    pub fn project(&self, samples: &CVector) -> Result<CVector> {
        if samples.len() != self.quad_points {
            return invalid(format!(
                "expected {} boundary samples, got {}",
                self.quad_points,
                samples.len()
            ));
        }
        Ok(self.table.adjoint() * samples / Complex64::from(self.quad_points as f64))
    }

    /// `P_Theta f` for a function given pointwise on the circle.
    pub fn project_fn(&self, f: impl Fn(Complex64) -> Complex64) -> CVector {
        let samples = CVector::from_iterator(self.quad_points, self.nodes.iter().map(|&z| f(z)));
        self.project(&samples)
            .expect("sample count matches the grid")
    }

    /// Gram matrix of the basis under the quadrature inner product.
    pub fn gram(&self) -> CMatrix {
        self.table.adjoint() * &self.table / Complex64::from(self.quad_points as f64)
    }

    /// `M[(i, j)] = <C e_j, e_i>`, so that `Cf` has coordinates `M conj(f)`.
    pub fn conjugation_matrix(&self) -> CMatrix {
        let m = self.quad_points;
        let n = self.dim();
        let mut ce = CMatrix::zeros(m, n);
        for k in 0..m {
            let w = self.nodes[k].conj() * self.theta_on_nodes[k];
            for j in 0..n {
                ce[(k, j)] = self.table[(k, j)].conj() * w;
            }
        }
        self.table.adjoint() * ce / Complex64::from(m as f64)
    }

    /// `Cf = conj(z f) Theta` on the circle.
    pub fn conjugate(&self, f: &CVector) -> Result<CVector> {
        self.check_len(f)?;
        Ok(self.conjugation_matrix() * conj_vector(f))
    }

    /// Matrix taking coordinates in `other` to coordinates in `self`, for two
    /// representations of the same space (e.g. a permuted zero list).
    pub fn transition_from(&self, other: &ModelSpace) -> CMatrix {
        let m = self.quad_points;
        let mut other_table = CMatrix::zeros(m, other.dim());
        for k in 0..m {
            for (j, v) in tm_basis(other.theta.zeros(), self.nodes[k])
                .into_iter()
                .enumerate()
            {
                other_table[(k, j)] = v;
            }
        }
        self.table.adjoint() * other_table / Complex64::from(m as f64)
    }

    fn require_theta_zero_at_origin(&self) -> Result<()> {
        let v = self.theta.eval(ZERO).norm();
        if v > 1e-10 {
            return invalid(format!("Theta(0) must vanish, |Theta(0)| = {v:e}"));
        }
        Ok(())
    }

    pub fn clark_system(&self, alpha: Complex64, tol: &Tolerances) -> Result<ClarkSystem> {
        self.require_theta_zero_at_origin()?;
        if !alpha.is_finite() || (alpha.norm() - 1.0).abs() > tol.unimodular {
            return invalid(format!("alpha {alpha} is not unimodular"));
        }
        let alpha = alpha / alpha.norm();
        let points = level_set(&self.theta, alpha, tol)?;
        let n = points.len();
        for i in 0..n {
            for j in i + 1..n {
                if (points[i] - points[j]).norm() < 1e-10 {
                    return numerical("Clark points are not simple");
                }
            }
        }
        let weights = points
            .iter()
            .map(|&z| 1.0 / self.theta.eval_with_derivative(z).1.norm())
            .collect();
        Ok(ClarkSystem {
            alpha,
            points,
            weights,
        })
    }
}

pub fn make_space(theta: BlaschkeProduct, quad_points: Option<usize>) -> Result<ModelSpace> {
    ModelSpace::new(theta, quad_points)
}

/// `W` unitary with `M = W W^T`, for `M` symmetric and unitary.
///
/// Writing `M = X + iY`, the real symmetric parts commute, so a real
/// orthogonal `Q` diagonalizing `X + tY` gives `Q^T M Q = D` diagonal and
/// unimodular, and `W = Q sqrt(D)`.
pub fn takagi_factor(m: &CMatrix) -> Result<CMatrix> {
    let n = m.nrows();
    if m.ncols() != n {
        return invalid("takagi_factor needs a square matrix");
    }
    let asym = fro(&(m - m.transpose()));
    if asym > 1e-8 {
        return invalid(format!("matrix is not symmetric (defect {asym:e})"));
    }
    let defect = unitarity_defect(m);
    if defect > 1e-8 {
        return invalid(format!("matrix is not unitary (defect {defect:e})"));
    }
    let x = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
    let y = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].im + m[(j, i)].im));
    let mut best: Option<(f64, CMatrix)> = None;
    for t in [
        0.618_033_988_749_895,
        1.324_717_957_244_746,
        -std::f64::consts::E,
    ] {
        let q = SymmetricEigen::new(&x + &y * t).eigenvectors;
        let qc = q.map(Complex64::from);
        let d = qc.transpose() * m * &qc;
        let w = CMatrix::from_fn(n, n, |i, j| qc[(i, j)] * d[(j, j)].sqrt());
        let residual = fro(&(&w * w.transpose() - m));
        if residual < 1e-9 {
            return Ok(w);
        }
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, w));
        }
    }
    match best {
        Some((r, _)) => numerical(format!("Takagi factorization residual {r:e}")),
        None => numerical("Takagi factorization failed"),
    }
}
