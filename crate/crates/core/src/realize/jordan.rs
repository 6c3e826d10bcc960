use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::Realization;
use crate::disk_geometry::BlaschkeProduct;
use crate::error::{invalid, numerical, Result};
use crate::json::{cplx, cplx_vec};
use crate::linalg::{
    column_space, condition_number, fro, inverse, residual_to_span, vectorize, CMatrix, CVector,
    ONE,
};
use crate::model_space::ModelSpace;
use crate::tto::{compressed_shift, Operator, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JordanBlock {
    #[serde(with = "cplx")]
    pub eigenvalue: Complex64,
    pub size: usize,
}

/// Direct sum of Jordan blocks `J_{d_i}(mu_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JordanSpec {
    pub blocks: Vec<JordanBlock>,
}

impl JordanSpec {
    pub fn new(blocks: &[(Complex64, usize)]) -> Self {
        Self {
            blocks: blocks
                .iter()
                .map(|&(eigenvalue, size)| JordanBlock { eigenvalue, size })
                .collect(),
        }
    }

    pub fn total_size(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }
}

/// Upper-triangular Jordan matrix described by `spec`.
pub fn jordan_matrix(spec: &JordanSpec) -> CMatrix {
    let d = spec.total_size();
    let mut j = CMatrix::zeros(d, d);
    let mut start = 0;
    for b in &spec.blocks {
        for k in 0..b.size {
            j[(start + k, start + k)] = b.eigenvalue;
            if k + 1 < b.size {
                j[(start + k, start + k + 1)] = ONE;
            }
        }
        start += b.size;
    }
    j
}

/// `0.4 exp(2 pi i k / r)` with a rotation offset.
pub fn default_jordan_zeros(r: usize, radius: f64, offset: f64) -> Vec<Complex64> {
    (0..r)
        .map(|k| Complex64::from_polar(radius, TAU * (k as f64 + offset) / r as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JordanRealization {
    #[serde(flatten)]
    pub realization: Realization,
    /// Ascending coefficients of `q` with `operator = q(A_{conj z})`.
    #[serde(with = "cplx_vec")]
    pub polynomial: Vec<Complex64>,
    #[serde(with = "cplx_vec")]
    pub zeros: Vec<Complex64>,
    pub condition: f64,
    /// `||S^{-1} A S - J||_F`.
    pub similarity_residual: f64,
}

/// Polynomial of degree below `sum d_i` whose Taylor coefficients at each
/// `conj(z_i)` match `mu_i + (w - conj z_i) / (1 - z_i w)` to order `d_i - 1`.
///
/// That function inverts `(u + conj a) / (1 + a u)`, which is how `A_{conj z}`
/// acts on the block `K_{phi_a^d}` in terms of `A_{conj phi_a}`, a nilpotent
/// shift there; so `q(A_{conj z})` is exactly `mu_i + shift` on each block.
pub fn hermite_polynomial(spec: &JordanSpec, zeros: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = spec.total_size();
    let mut system = CMatrix::zeros(d, d);
    let mut rhs = CVector::zeros(d);
    let mut row = 0;
    for (b, &z) in spec.blocks.iter().zip(zeros) {
        let w = z.conj();
        let s = 1.0 - z.norm_sqr();
        for m in 0..b.size {
            // m-th Taylor coefficient of w^k is binom(k, m) w^(k - m)
            for k in m..d {
                system[(row, k)] = Complex64::from(binomial(k, m)) * w.powi((k - m) as i32);
            }
            rhs[row] = if m == 0 {
                b.eigenvalue
            } else {
                z.powi(m as i32 - 1) / s.powi(m as i32)
            };
            row += 1;
        }
    }
    match system.lu().solve(&rhs) {
        Some(q) => Ok(q.iter().copied().collect()),
        None => numerical("Hermite interpolation system is singular"),
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn poly_of_matrix(q: &[Complex64], a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    q.iter().rev().fold(CMatrix::zeros(n, n), |acc, &c| {
        acc * a + CMatrix::identity(n, n) * c
    })
}

/// Columns `k_{z_i} phi_{z_i}^j`, `0 <= j < d_i`, block by block.
fn block_basis(space: &ModelSpace, spec: &JordanSpec, zeros: &[Complex64]) -> Result<CMatrix> {
    let mut cols = Vec::with_capacity(spec.total_size());
    for (b, &a) in spec.blocks.iter().zip(zeros) {
        let s = (1.0 - a.norm_sqr()).sqrt();
        for j in 0..b.size {
            let samples = CVector::from_iterator(
                space.quad_points(),
                space.nodes().iter().map(|&z| {
                    let den = ONE - a.conj() * z;
                    s / den * ((z - a) / den).powi(j as i32)
                }),
            );
            cols.push(space.project(&samples)?);
        }
    }
    Ok(CMatrix::from_columns(&cols))
}

fn validate(spec: &JordanSpec, zeros: Option<&[Complex64]>) -> Result<()> {
    if spec.blocks.is_empty() || spec.blocks.iter().any(|b| b.size == 0) {
        return invalid("Jordan spec needs at least one block of positive size");
    }
    if spec.blocks.iter().any(|b| !b.eigenvalue.is_finite()) {
        return invalid("eigenvalues must be finite");
    }
    if let Some(z) = zeros {
        if z.len() != spec.blocks.len() {
            return invalid(format!(
                "{} zeros given for {} blocks",
                z.len(),
                spec.blocks.len()
            ));
        }
        if z.iter().any(|w| !w.is_finite() || w.norm() >= 1.0) {
            return invalid("zeros must lie inside the unit disk");
        }
        for i in 0..z.len() {
            for j in i + 1..z.len() {
                if (z[i] - z[j]).norm() < 1e-8 {
                    return invalid("zeros must be distinct");
                }
            }
        }
    }
    Ok(())
}

fn attempt(
    spec: &JordanSpec,
    zeros: &[Complex64],
    quad: Option<usize>,
) -> Result<JordanRealization> {
    let mut list = Vec::with_capacity(spec.total_size());
    for (b, &z) in spec.blocks.iter().zip(zeros) {
        list.extend(std::iter::repeat_n(z, b.size));
    }
    let theta = BlaschkeProduct::from_zeros(list)?;
    let space = ModelSpace::new(theta.clone(), quad)?;
    let a_zbar = compressed_shift(&space).matrix.adjoint();
    let q = hermite_polynomial(spec, zeros)?;
    let a = poly_of_matrix(&q, &a_zbar);
    let symbol = Symbol::new(
        q.iter()
            .enumerate()
            .map(|(k, &c)| (-(k as i32), c))
            .collect(),
    );
    let s = block_basis(&space, spec, zeros)?;
    let condition = condition_number(&s);
    let j = jordan_matrix(spec);
    let s_inv = inverse(&s)?;
    let similarity_residual = fro(&(&s_inv * &a * &s - &j));
    let realization = Realization::similarity(theta, Operator::new(a, Some(symbol)), s, &j)?;
    Ok(JordanRealization {
        realization,
        polynomial: q,
        zeros: zeros.to_vec(),
        condition,
        similarity_residual,
    })
}

/// Realizes `⊕ J_{d_i}(mu_i)` up to similarity as a co-analytic TTO
/// `q(A_{conj z})` on `K_Theta`, `Theta = prod phi_{z_i}^{d_i}`.
pub fn realize_jordan(
    spec: &JordanSpec,
    zeros: Option<&[Complex64]>,
    quad: Option<usize>,
) -> Result<JordanRealization> {
    validate(spec, zeros)?;
    let r = spec.blocks.len();
    let candidates: Vec<Vec<Complex64>> = match zeros {
        Some(z) => vec![z.to_vec()],
        None => vec![
            default_jordan_zeros(r, 0.4, 0.0),
            default_jordan_zeros(r, 0.6, 0.25),
        ],
    };
    let mut worst = 0.0;
    for z in &candidates {
        let out = attempt(spec, z, quad)?;
        if out.condition <= 1e8 {
            return Ok(out);
        }
        worst = out.condition;
    }
    numerical(format!(
        "block basis is too ill-conditioned (cond {worst:e})"
    ))
}

/// Checks that `X = S^{-*} R S^{-1}`, with `R` the blockwise flip, carries
/// every power `A_{conj z}^m` into the span of the powers of `A_z`.
/// Returns the worst relative residual.
pub fn coanalytic_similarity_check(out: &JordanRealization, quad: Option<usize>) -> Result<f64> {
    let space = ModelSpace::new(out.realization.theta.clone(), quad)?;
    let d = space.dim();
    let s = &out.realization.witness;
    let s_inv = inverse(s)?;
    let mut r = CMatrix::zeros(d, d);
    let mut start = 0;
    let sizes = block_sizes(&out.realization.theta, &out.zeros);
    for size in sizes {
        for k in 0..size {
            r[(start + k, start + size - 1 - k)] = ONE;
        }
        start += size;
    }
    let x = s_inv.adjoint() * &r * &s_inv;
    let x_inv = inverse(&x)?;
    let az = compressed_shift(&space).matrix;
    let a_zbar = az.adjoint();

    let mut powers = Vec::with_capacity(d);
    let mut p = CMatrix::identity(d, d);
    for _ in 0..d {
        powers.push(vectorize(&p));
        p = &p * &az;
    }
    let q = column_space(&CMatrix::from_columns(&powers), 1e-12);

    let mut worst: f64 = 0.0;
    let mut p = CMatrix::identity(d, d);
    for _ in 0..d {
        let image = &x * &p * &x_inv;
        let norm = fro(&image);
        if norm > 0.0 {
            worst = worst.max(residual_to_span(&q, &vectorize(&image)) / norm);
        }
        p = &p * &a_zbar;
    }
    Ok(worst)
}

fn block_sizes(theta: &BlaschkeProduct, zeros: &[Complex64]) -> Vec<usize> {
    zeros
        .iter()
        .map(|z| theta.zeros().iter().filter(|w| *w == z).count())
        .collect()
}
