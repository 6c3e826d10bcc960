use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mobius::MobiusTransform;
use crate::config::Tolerances;
use crate::error::{invalid, numerical, Result, TtoError};
use crate::json::{cplx, cplx_vec};
use crate::linalg::{
    arg_positive, cluster_roots, poly_add, poly_derivative, poly_eval, poly_mul, poly_roots,
    poly_scale, root_noise, ONE, ZERO,
};

/// Finite Blaschke product `constant * prod_k (z - a_k) / (1 - conj(a_k) z)`.
///
/// Zeros are kept in the order given; repetition encodes multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlaschkeWire")]
pub struct BlaschkeProduct {
    #[serde(with = "cplx")]
    constant: Complex64,
    #[serde(with = "cplx_vec")]
    zeros: Vec<Complex64>,
}

#[derive(Deserialize)]
struct BlaschkeWire {
    #[serde(with = "cplx")]
    constant: Complex64,
    #[serde(with = "cplx_vec")]
    zeros: Vec<Complex64>,
}

impl TryFrom<BlaschkeWire> for BlaschkeProduct {
    type Error = TtoError;

    fn try_from(w: BlaschkeWire) -> Result<Self> {
        BlaschkeProduct::new(w.constant, w.zeros)
    }
}

impl BlaschkeProduct {
    /// Checks `|constant| = 1` to 1e-8 (the stored constant is renormalized),
    /// at least one zero, and every zero strictly inside the disk.
    pub fn new(constant: Complex64, zeros: Vec<Complex64>) -> Result<Self> {
        if !constant.is_finite() || (constant.norm() - 1.0).abs() > 1e-8 {
            return invalid(format!("constant {constant} is not unimodular"));
        }
        if zeros.is_empty() {
            return invalid("a Blaschke product needs at least one zero");
        }
        if let Some(z) = zeros.iter().find(|z| !z.is_finite() || z.norm() >= 1.0) {
            return invalid(format!("zero {z} is not inside the unit disk"));
        }
        Ok(Self {
            constant: constant / constant.norm(),
            zeros,
        })
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Result<Self> {
        Self::new(ONE, vec![ZERO; n])
    }

    pub fn from_zeros(zeros: Vec<Complex64>) -> Result<Self> {
        Self::new(ONE, zeros)
    }

    /// A degree-one product viewed as an automorphism.
    pub fn from_mobius(psi: &MobiusTransform) -> Self {
        Self {
            constant: psi.eta,
            zeros: vec![psi.a],
        }
    }

    pub fn as_mobius(&self) -> Option<MobiusTransform> {
        (self.order() == 1).then(|| MobiusTransform {
            eta: self.constant,
            a: self.zeros[0],
        })
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn order(&self) -> usize {
        self.zeros.len()
    }

    pub fn with_constant(&self, constant: Complex64) -> Self {
        Self {
            constant: constant / constant.norm(),
            zeros: self.zeros.clone(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().fold(self.constant, |acc, &a| {
            acc * (z - a) / (ONE - a.conj() * z)
        })
    }

    /// Value and derivative, accumulated factor by factor with the product
    /// rule so that evaluation at a zero stays exact.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let (v, d) = self.zeros.iter().fold((ONE, ZERO), |(v, d), &a| {
            let den = ONE - a.conj() * z;
            let f = (z - a) / den;
            let df = (1.0 - a.norm_sqr()) / (den * den);
            (v * f, d * f + v * df)
        });
        (self.constant * v, self.constant * d)
    }

    /// `B#(z) = conj(B(conj z))`.
    pub fn sharp(&self) -> Self {
        Self {
            constant: self.constant.conj(),
            zeros: self.zeros.iter().map(|z| z.conj()).collect(),
        }
    }

    /// `constant * prod (z - a_k)`.
    pub fn numerator(&self) -> Vec<Complex64> {
        self.zeros
            .iter()
            .fold(vec![self.constant], |p, &a| poly_mul(&p, &[-a, ONE]))
    }

    /// `prod (1 - conj(a_k) z)`.
    pub fn denominator(&self) -> Vec<Complex64> {
        self.zeros
            .iter()
            .fold(vec![ONE], |p, &a| poly_mul(&p, &[ONE, -a.conj()]))
    }

    /// Recovers the unimodular constant of the product with the given zeros
    /// that agrees with `target` at the boundary point 1.
    fn matching_constant(
        zeros: Vec<Complex64>,
        target: impl Fn(Complex64) -> Complex64,
        tol: &Tolerances,
    ) -> Result<Self> {
        let bare = Self {
            constant: ONE,
            zeros,
        };
        let c = target(ONE) / bare.eval(ONE);
        if !c.is_finite() || (c.norm() - 1.0).abs() > tol.unimodular {
            return numerical(format!(
                "recovered constant has modulus {} (expected 1)",
                c.norm()
            ));
        }
        Ok(bare.with_constant(c))
    }
}

pub fn blaschke_eval(b: &BlaschkeProduct, z: Complex64) -> Complex64 {
    b.eval(z)
}

pub fn blaschke_eval_with_derivative(b: &BlaschkeProduct, z: Complex64) -> (Complex64, Complex64) {
    b.eval_with_derivative(z)
}

pub fn blaschke_sharp(b: &BlaschkeProduct) -> BlaschkeProduct {
    b.sharp()
}

/// `post ∘ B ∘ pre` as a Blaschke product.
pub fn blaschke_compose(
    b: &BlaschkeProduct,
    pre: Option<&MobiusTransform>,
    post: Option<&MobiusTransform>,
    tol: &Tolerances,
) -> Result<BlaschkeProduct> {
    if pre.is_none() && post.is_none() {
        return invalid("blaschke_compose needs a pre- or post-composition");
    }
    let inner = match pre {
        Some(pre) => {
            let inv = pre.inverse();
            let zeros = b.zeros.iter().map(|&z| inv.eval(z)).collect();
            BlaschkeProduct::matching_constant(zeros, |z| b.eval(pre.eval(z)), tol)?
        }
        None => b.clone(),
    };
    match post {
        Some(post) => {
            let zeros = level_set(&inner, post.a, tol)?;
            BlaschkeProduct::matching_constant(zeros, |z| post.eval(inner.eval(z)), tol)
        }
        None => Ok(inner),
    }
}

/// All `n` solutions of `B(z) = w`, with multiplicity.
///
/// Roots of `N(z) - w D(z)` come from the companion matrix; split multiple
/// roots are merged to their mean, and each root gets one Newton step (on the
/// `(m-1)`-th derivative for an `m`-fold root) kept only if it lowers the
/// residual. For `|w| = 1` roots are projected onto the circle. Output is
/// ordered by argument in `[0, 2pi)`, then modulus.
pub fn level_set(b: &BlaschkeProduct, w: Complex64, tol: &Tolerances) -> Result<Vec<Complex64>> {
    if !w.is_finite() || w.norm() > 1.0 + 1e-12 {
        return invalid(format!("level {w} lies outside the closed disk"));
    }
    let poly = poly_add(&b.numerator(), &poly_scale(&b.denominator(), -w));
    let roots = poly_roots(&poly)?;
    if roots.len() != b.order() {
        return numerical(format!(
            "level set has {} roots, expected {}",
            roots.len(),
            b.order()
        ));
    }
    let on_circle = (w.norm() - 1.0).abs() <= 1e-12;
    let mut out = Vec::with_capacity(b.order());
    for (z, m) in cluster_roots(&roots, tol.cluster, root_noise(&poly), b.order()) {
        let mut z = polish(&poly, z, m);
        if on_circle {
            z /= z.norm();
        }
        let residual = (b.eval(z) - w).norm();
        if !(residual <= tol.root_residual) {
            return numerical(format!("level-set root {z} has residual {residual:e}"));
        }
        out.extend(std::iter::repeat_n(z, m));
    }
    sort_by_argument(&mut out);
    Ok(out)
}

pub(crate) fn sort_by_argument(v: &mut [Complex64]) {
    v.sort_by(|a, b| {
        arg_positive(*a)
            .total_cmp(&arg_positive(*b))
            .then(a.norm().total_cmp(&b.norm()))
    });
}

/// One guarded Newton step on the `(m-1)`-th derivative of `poly`, which has
/// a simple root at an `m`-fold root of `poly`.
fn polish(poly: &[Complex64], z: Complex64, m: usize) -> Complex64 {
    let mut q = poly.to_vec();
    for _ in 1..m {
        q = poly_derivative(&q);
    }
    let dq = poly_derivative(&q);
    let f = poly_eval(&q, z);
    let df = poly_eval(&dq, z);
    if df.norm() == 0.0 {
        return z;
    }
    let candidate = z - f / df;
    if candidate.is_finite() && poly_eval(&q, candidate).norm() < f.norm() {
        candidate
    } else {
        z
    }
}

/// `B'/B` and its derivative, summed over the zeros; `None` at a zero of `B`.
fn log_derivative(b: &BlaschkeProduct, z: Complex64) -> Option<(Complex64, Complex64)> {
    let mut l = ZERO;
    let mut dl = ZERO;
    for &a in b.zeros() {
        let u = (z - a) * (ONE - a.conj() * z);
        if u.norm() < 1e-12 {
            return None;
        }
        let w = 1.0 - a.norm_sqr();
        l += w / u;
        dl -= w * (ONE - 2.0 * a.conj() * z + a.norm_sqr()) / (u * u);
    }
    Some((l, dl))
}

/// Newton steps `z - m L/L'` on the logarithmic derivative, kept while
/// `|L|` decreases. Avoids the cancellation in the expanded numerator.
fn refine_critical(b: &BlaschkeProduct, mut z: Complex64, m: usize) -> Complex64 {
    for _ in 0..4 {
        let Some((l, dl)) = log_derivative(b, z) else {
            return z;
        };
        if l.norm() == 0.0 || dl.norm() == 0.0 {
            return z;
        }
        let candidate = z - l / dl * m as f64;
        match log_derivative(b, candidate) {
            Some((lc, _)) if candidate.is_finite() && lc.norm() < l.norm() => z = candidate,
            _ => return z,
        }
    }
    z
}

/// Numerator of `B'`, i.e. `N' D - N D'`.
fn derivative_numerator(b: &BlaschkeProduct) -> Vec<Complex64> {
    let n = b.numerator();
    let d = b.denominator();
    poly_add(
        &poly_mul(&poly_derivative(&n), &d),
        &poly_scale(&poly_mul(&n, &poly_derivative(&d)), -ONE),
    )
}

/// Distinct critical points inside the disk with their multiplicities, in
/// lexicographic order.
pub fn critical_point_clusters(
    b: &BlaschkeProduct,
    tol: &Tolerances,
) -> Result<Vec<(Complex64, usize)>> {
    let n = b.order();
    if n < 2 {
        return invalid("critical points need order at least 2");
    }
    let poly = derivative_numerator(b);
    let roots = poly_roots(&poly)?;
    let inside: Vec<(Complex64, usize)> =
        cluster_roots(&roots, tol.cluster, root_noise(&poly), n - 1)
            .into_iter()
            .map(|(z, m)| (polish(&poly, z, m), m))
            .filter(|(z, _)| z.norm() < 1.0)
            .map(|(z, m)| (refine_critical(b, z, m), m))
            .collect();
    let count: usize = inside.iter().map(|(_, m)| m).sum();
    if count != n - 1 {
        return numerical(format!(
            "found {count} critical points inside the disk, expected {}",
            n - 1
        ));
    }
    Ok(inside)
}

/// The `n - 1` critical points of `B` in the open disk, with multiplicity.
pub fn critical_points(b: &BlaschkeProduct, tol: &Tolerances) -> Result<Vec<Complex64>> {
    Ok(critical_point_clusters(b, tol)?
        .into_iter()
        .flat_map(|(z, m)| std::iter::repeat_n(z, m))
        .collect())
}
