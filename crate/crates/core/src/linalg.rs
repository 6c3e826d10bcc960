//! Dense complex linear algebra and polynomial helpers shared by the
//! operator modules.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{numerical, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn fro(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<x, y>` with the second slot conjugated.
pub fn inner(x: &CVector, y: &CVector) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// Matrix of the rank-one operator `h -> <h, g> f`.
pub fn tensor(f: &CVector, g: &CVector) -> CMatrix {
    f * g.adjoint()
}

pub fn conj_matrix(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

pub fn conj_vector(v: &CVector) -> CVector {
    v.map(|z| z.conj())
}

/// ||U*U - I||_F.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    fro(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Orthonormal basis (as columns) of the column space of `m`, keeping
/// singular directions whose singular value exceeds `rel_cut * s_max`.
pub fn column_space(m: &CMatrix, rel_cut: f64) -> CMatrix {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| smax > 0.0 && svd.singular_values[i] > rel_cut * smax)
        .collect();
    CMatrix::from_fn(m.nrows(), keep.len(), |i, j| u[(i, keep[j])])
}

/// Distance from `v` to the span of the orthonormal columns of `q`.
pub fn residual_to_span(q: &CMatrix, v: &CVector) -> f64 {
    let proj = q * (q.adjoint() * v);
    vec_norm(&(v - proj))
}

pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.len(), m.iter().copied())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    match m.clone().try_inverse() {
        Some(inv) if inv.iter().all(|z| z.is_finite()) => Ok(inv),
        _ => numerical("matrix is singular"),
    }
}

/// Two-norm condition number.
pub fn condition_number(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Complex Schur decomposition `m = Q T Q*`.
///
/// The deflation test is relaxed step by step when the QR iteration stalls,
/// which happens for companion matrices of clustered roots.
pub fn schur(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    for factor in [1.0, 4.0, 16.0, 64.0] {
        if let Some(s) = Schur::try_new(m.clone(), factor * f64::EPSILON, 10_000) {
            return Ok(s.unpack());
        }
    }
    numerical("Schur iteration did not converge")
}

pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let (_, t) = schur(m)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Sorts complex numbers by (re, im), a total deterministic order.
pub fn sort_lex(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Argument mapped into [0, 2pi).
pub fn arg_positive(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

// --- polynomials, coefficients in ascending order -------------------------

pub fn poly_eval(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
}

pub fn poly_mul(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

pub fn poly_add(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|i| p.get(i).copied().unwrap_or(ZERO) + q.get(i).copied().unwrap_or(ZERO))
        .collect()
}

pub fn poly_scale(p: &[Complex64], s: Complex64) -> Vec<Complex64> {
    p.iter().map(|a| a * s).collect()
}

pub fn poly_derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| a * k as f64)
        .collect()
}

/// Roots of `p` as eigenvalues of the companion matrix of its monic form.
/// Leading coefficients below `1e-14 * max|p_k|` are dropped first, and
/// exactly vanishing trailing coefficients are split off as roots at 0.
pub fn poly_roots(p: &[Complex64]) -> Result<Vec<Complex64>> {
    let scale = p.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return numerical("zero polynomial has no isolated roots");
    }
    let mut deg = p.len() - 1;
    while deg > 0 && p[deg].norm() <= 1e-14 * scale {
        deg -= 1;
    }
    // exact roots at the origin stall the QR iteration on a nilpotent block
    let low = p[..deg].iter().take_while(|a| a.norm() == 0.0).count();
    if low > 0 {
        let mut roots = vec![ZERO; low];
        roots.extend(poly_roots(&p[low..=deg])?);
        return Ok(roots);
    }
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = p[deg];
    let companion = CMatrix::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -p[i] / lead
        } else if i == j + 1 {
            ONE
        } else {
            ZERO
        }
    });
    eigenvalues(&companion)
}

/// Backward error of the companion eigenvalues of `p`: machine epsilon
/// times the largest coefficient ratio to the leading one, with the leading
/// coefficient chosen as in [`poly_roots`].
pub fn root_noise(p: &[Complex64]) -> f64 {
    let scale = p.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let lead = p
        .iter()
        .rev()
        .find(|a| a.norm() > 1e-14 * scale)
        .map_or(1.0, |a| a.norm());
    f64::EPSILON * (scale / lead).max(1.0)
}

/// Groups numerically split multiple roots.
///
/// A group of `m` roots is merged when its diameter is below
/// `max(tol^(2/m), 8 noise^(1/m) (1 + |z|))`: a backward error `noise`
/// perturbs an m-fold root by about `noise^(1/m)`, and `tol` is the
/// threshold for double roots. Groups hold at most `max_mult` roots, and
/// larger groups are formed first. Returns
/// `(mean, multiplicity)` pairs in lexicographic order of the means.
pub fn cluster_roots(
    roots: &[Complex64],
    tol: f64,
    noise: f64,
    max_mult: usize,
) -> Vec<(Complex64, usize)> {
    let mut remaining: Vec<Complex64> = roots.to_vec();
    sort_lex(&mut remaining);
    let mut clusters = Vec::new();
    loop {
        let mut best: Option<(usize, f64, Vec<usize>)> = None;
        for i in 0..remaining.len() {
            let mut order: Vec<usize> = (0..remaining.len()).collect();
            order.sort_by(|&a, &b| {
                (remaining[a] - remaining[i])
                    .norm()
                    .total_cmp(&(remaining[b] - remaining[i]).norm())
            });
            for m in (2..=remaining.len().min(max_mult)).rev() {
                let group = &order[..m];
                let diam = diameter(&remaining, group);
                let mf = m as f64;
                let limit = tol
                    .powf(2.0 / mf)
                    .max(8.0 * noise.powf(1.0 / mf) * (1.0 + remaining[i].norm()));
                if diam < limit {
                    let better = match &best {
                        None => true,
                        Some((bm, bd, _)) => m > *bm || (m == *bm && diam < *bd),
                    };
                    if better {
                        best = Some((m, diam, group.to_vec()));
                    }
                    break;
                }
            }
        }
        match best {
            Some((m, _, mut group)) => {
                let mean = group.iter().map(|&k| remaining[k]).sum::<Complex64>() / m as f64;
                clusters.push((mean, m));
                group.sort_unstable_by(|a, b| b.cmp(a));
                for k in group {
                    remaining.remove(k);
                }
            }
            None => break,
        }
    }
    clusters.extend(remaining.into_iter().map(|z| (z, 1)));
    clusters.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    clusters
}

fn diameter(points: &[Complex64], idx: &[usize]) -> f64 {
    let mut d: f64 = 0.0;
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            d = d.max((points[i] - points[j]).norm());
        }
    }
    d
}

/// Expands `(value, multiplicity)` pairs back into a flat list.
pub fn expand_clusters(clusters: &[(Complex64, usize)]) -> Vec<Complex64> {
    clusters
        .iter()
        .flat_map(|&(z, m)| std::iter::repeat_n(z, m))
        .collect()
}
