use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::blaschke::{critical_point_clusters, sort_by_argument, BlaschkeProduct};
use super::hyperbolic::{hyperbolic_centroid, hyperbolic_distance};
use super::mobius::MobiusTransform;
use crate::config::Tolerances;
use crate::error::Result;
use crate::linalg::{cluster_roots, ONE};

/// Witness that `B1 = post ∘ B2' ∘ pre`, where `B2'` is `B2` or its sharp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub post: MobiusTransform,
    pub pre: MobiusTransform,
    pub sharp: bool,
}

impl Certificate {
    pub fn new(post: MobiusTransform, pre: MobiusTransform, sharp: bool) -> Self {
        Self { post, pre, sharp }
    }

    pub fn identity() -> Self {
        Self::new(
            MobiusTransform::identity(),
            MobiusTransform::identity(),
            false,
        )
    }

    /// `post ∘ B2' ∘ pre` evaluated at `z`.
    pub fn apply(&self, b2: &BlaschkeProduct, z: Complex64) -> Complex64 {
        let w = self.pre.eval(z);
        let v = if self.sharp {
            b2.eval(w.conj()).conj()
        } else {
            b2.eval(w)
        };
        self.post.eval(v)
    }

    /// Sup-norm of `B1 - post ∘ B2' ∘ pre` over the verification grid.
    pub fn residual(&self, b1: &BlaschkeProduct, b2: &BlaschkeProduct) -> f64 {
        verification_grid()
            .iter()
            .map(|&z| (b1.eval(z) - self.apply(b2, z)).norm())
            .fold(0.0, f64::max)
    }

    pub fn verify(&self, b1: &BlaschkeProduct, b2: &BlaschkeProduct, tol: &Tolerances) -> bool {
        self.residual(b1, b2) < tol.certificate
    }
}

const GRID_BOUNDARY: usize = 256;
const GRID_INTERIOR: usize = 32;
const GRID_SEED: u64 = 0x7e57_9a1d;

/// 256 equispaced boundary points followed by 32 seeded interior points.
pub fn verification_grid() -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(GRID_SEED);
    let boundary = (0..GRID_BOUNDARY)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / GRID_BOUNDARY as f64));
    let interior: Vec<Complex64> = (0..GRID_INTERIOR)
        .map(|_| {
            let r = 0.95 * rng.random::<f64>().sqrt();
            Complex64::from_polar(r, TAU * rng.random::<f64>())
        })
        .collect();
    boundary.chain(interior).collect()
}

/// Whether `B` lies in the orbit of `z^n`: either a single zero of order `n`,
/// or `n` distinct zeros equally spaced on a hyperbolic circle.
pub fn zn_equivalence_test(b: &BlaschkeProduct, tol: &Tolerances) -> Result<bool> {
    let n = b.order();
    let clusters = cluster_roots(b.zeros(), tol.cluster, f64::EPSILON, n);
    if clusters.len() == 1 {
        return Ok(true);
    }
    if clusters.len() < n {
        return Ok(false);
    }
    if n == 2 {
        return Ok(true);
    }
    let centre = hyperbolic_centroid(b.zeros(), tol)?;
    let to_origin = MobiusTransform::phi(centre);
    let mut w: Vec<Complex64> = b.zeros().iter().map(|&z| to_origin.eval(z)).collect();
    sort_by_argument(&mut w);
    let radius = w.iter().map(|z| z.norm()).sum::<f64>() / n as f64;
    if w.iter().any(|z| (z.norm() - radius).abs() > tol.geometry) {
        return Ok(false);
    }
    let omega = Complex64::from_polar(1.0, TAU / n as f64);
    Ok((0..n).all(|j| (w[(j + 1) % n] - omega * w[j]).norm() < tol.geometry))
}

/// Finds `(post, pre)` with `B1 = post ∘ B2 ∘ pre`, or `None` when `B1` is not
/// in the orbit of `B2`. Every returned pair has been verified on the grid.
pub fn decide_orbit(
    b1: &BlaschkeProduct,
    b2: &BlaschkeProduct,
    tol: &Tolerances,
) -> Result<Option<(MobiusTransform, MobiusTransform)>> {
    let n = b1.order();
    if n != b2.order() {
        return Ok(None);
    }
    let accept = |post: MobiusTransform, pre: MobiusTransform| {
        let cert = Certificate::new(post, pre, false);
        cert.verify(b1, b2, tol).then_some((cert.post, cert.pre))
    };
    if n == 1 {
        let (m1, m2) = (b1.as_mobius().unwrap(), b2.as_mobius().unwrap());
        return Ok(accept(
            m1.compose(&m2.inverse()),
            MobiusTransform::identity(),
        ));
    }

    let c1 = critical_point_clusters(b1, tol)?;
    let c2 = critical_point_clusters(b2, tol)?;
    let signature = |c: &[(Complex64, usize)]| {
        let mut m: Vec<usize> = c.iter().map(|p| p.1).collect();
        m.sort_unstable();
        m
    };
    if signature(&c1) != signature(&c2) {
        return Ok(None);
    }

    if c1.len() == 1 {
        let (chi1, a1) = power_normal_form(b1, c1[0].0);
        let (chi2, a2) = power_normal_form(b2, c2[0].0);
        let post = chi1.compose(&chi2.inverse());
        let pre = MobiusTransform::phi(a2)
            .inverse()
            .compose(&MobiusTransform::phi(a1));
        return Ok(accept(post, pre));
    }

    let mut sorted = c1.clone();
    sorted.sort_by(|x, y| x.0.re.total_cmp(&y.0.re).then(x.0.im.total_cmp(&y.0.im)));
    let (c, mc) = sorted[0];
    let (c_next, mc_next) = sorted[1];
    let target = hyperbolic_distance(c, c_next);
    let match_tol = 1e-6 * (1.0 + target);
    let samples = fit_samples();

    for &(d, md) in &c2 {
        for &(d_next, md_next) in &c2 {
            if d == d_next || md != mc || md_next != mc_next {
                continue;
            }
            if (hyperbolic_distance(d, d_next) - target).abs() > match_tol {
                continue;
            }
            let pre = aligning_map(c, c_next, d, d_next);
            let u: Vec<Complex64> = samples.iter().map(|&w| b2.eval(pre.eval(w))).collect();
            let v: Vec<Complex64> = samples.iter().map(|&w| b1.eval(w)).collect();
            let [i, j, k] = best_separated_triple(&u);
            let Some(post) =
                MobiusTransform::through_points([u[i], u[j], u[k]], [v[i], v[j], v[k]], 1e-6)
            else {
                continue;
            };
            if let Some(found) = accept(post, pre) {
                return Ok(Some(found));
            }
        }
    }
    Ok(None)
}

/// The automorphism with `c -> d` and `c' -> d'`, assuming equal distances.
fn aligning_map(
    c: Complex64,
    c_next: Complex64,
    d: Complex64,
    d_next: Complex64,
) -> MobiusTransform {
    let from = MobiusTransform::phi(c).eval(c_next);
    let to = MobiusTransform::phi(d).eval(d_next);
    let rotation = MobiusTransform::rotation((to / to.norm()) / (from / from.norm()));
    MobiusTransform::phi(d)
        .inverse()
        .compose(&rotation)
        .compose(&MobiusTransform::phi(c))
}

/// Writes `B = chi ∘ z^n ∘ phi_c` for `B` whose only critical point is `c`.
fn power_normal_form(b: &BlaschkeProduct, c: Complex64) -> (MobiusTransform, Complex64) {
    let n = b.order() as i32;
    let to_origin = MobiusTransform::phi(c);
    let base = b
        .zeros()
        .iter()
        .map(|&z| to_origin.eval(z).powi(n))
        .sum::<Complex64>()
        / b.order() as f64;
    let base = if base.norm() < 1.0 {
        base
    } else {
        base / base.norm() * (1.0 - 1e-15)
    };
    let from_origin = to_origin.inverse();
    let g_one = b.eval(from_origin.eval(ONE));
    let eta = g_one / MobiusTransform::phi(base).eval(ONE);
    let chi = MobiusTransform {
        eta: eta / eta.norm(),
        a: base,
    };
    (chi, c)
}

fn fit_samples() -> Vec<Complex64> {
    (0..37)
        .map(|k| Complex64::from_polar(1.0, TAU * (k as f64 + 0.3) / 37.0))
        .collect()
}

fn best_separated_triple(u: &[Complex64]) -> [usize; 3] {
    let mut best = [0, 1, 2];
    let mut score = -1.0;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            for k in j + 1..u.len() {
                let s = (u[i] - u[j])
                    .norm()
                    .min((u[j] - u[k]).norm())
                    .min((u[i] - u[k]).norm());
                if s > score {
                    score = s;
                    best = [i, j, k];
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk_geometry::blaschke::blaschke_compose;
    use crate::linalg::{c, I, ZERO};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn zn_examples() {
        let t = tol();
        assert!(zn_equivalence_test(&BlaschkeProduct::monomial(3).unwrap(), &t).unwrap());
        let b = BlaschkeProduct::from_zeros(vec![c(0.5, 0.0); 3]).unwrap();
        assert!(zn_equivalence_test(&b, &t).unwrap());

        let psi = MobiusTransform::phi(c(0.2, 0.0));
        let zeros = (0..3)
            .map(|k| psi.eval(Complex64::from_polar(0.4, TAU * k as f64 / 3.0)))
            .collect();
        let b = BlaschkeProduct::from_zeros(zeros).unwrap();
        assert!(zn_equivalence_test(&b, &t).unwrap());
        assert!(decide_orbit(&BlaschkeProduct::monomial(3).unwrap(), &b, &t)
            .unwrap()
            .is_some());

        let b = BlaschkeProduct::from_zeros(vec![c(0.1, 0.0), c(0.2, 0.0), c(0.3, 0.0)]).unwrap();
        assert!(!zn_equivalence_test(&b, &t).unwrap());
        assert!(decide_orbit(&BlaschkeProduct::monomial(3).unwrap(), &b, &t)
            .unwrap()
            .is_none());
    }

    #[test]
    fn partially_repeated_zeros_are_not_in_the_power_orbit() {
        let b = BlaschkeProduct::from_zeros(vec![ZERO, ZERO, c(0.5, 0.0)]).unwrap();
        assert!(!zn_equivalence_test(&b, &tol()).unwrap());
    }

    #[test]
    fn decide_examples() {
        let t = tol();
        let z2 = BlaschkeProduct::monomial(2).unwrap();
        let (post, pre) = decide_orbit(&z2, &z2, &t).unwrap().unwrap();
        assert!(Certificate::new(post, pre, false).residual(&z2, &z2) < 1e-12);

        let z3 = BlaschkeProduct::monomial(3).unwrap();
        let b = BlaschkeProduct::from_zeros(vec![c(0.5, 0.0); 3]).unwrap();
        let (post, pre) = decide_orbit(&z3, &b, &t).unwrap().unwrap();
        assert!(Certificate::new(post, pre, false).residual(&z3, &b) < 1e-9);
    }

    #[test]
    fn order_mismatch_is_rejected() {
        let t = tol();
        let z2 = BlaschkeProduct::monomial(2).unwrap();
        let z3 = BlaschkeProduct::monomial(3).unwrap();
        assert!(decide_orbit(&z2, &z3, &t).unwrap().is_none());
    }

    #[test]
    fn degree_one() {
        let t = tol();
        let b1 = BlaschkeProduct::new(I, vec![c(0.3, 0.1)]).unwrap();
        let b2 = BlaschkeProduct::new(-ONE, vec![c(-0.6, 0.2)]).unwrap();
        assert!(decide_orbit(&b1, &b2, &t).unwrap().is_some());
    }

    #[test]
    fn recovers_generic_orbit_member() {
        let t = tol();
        let b = BlaschkeProduct::new(
            c(0.6, 0.8),
            vec![c(0.1, 0.2), c(-0.4, 0.1), c(0.3, -0.5), c(0.0, 0.6)],
        )
        .unwrap();
        let post = MobiusTransform::new(c(0.0, -1.0), c(0.2, 0.3)).unwrap();
        let pre = MobiusTransform::new(c(0.8, 0.6), c(-0.1, 0.45)).unwrap();
        let moved = blaschke_compose(&b, Some(&pre), Some(&post), &t).unwrap();
        let (p1, p2) = decide_orbit(&moved, &b, &t).unwrap().unwrap();
        assert!(Certificate::new(p1, p2, false).residual(&moved, &b) < 1e-8);
    }

    #[test]
    fn grid_is_deterministic() {
        assert_eq!(verification_grid(), verification_grid());
        assert_eq!(verification_grid().len(), 288);
    }
}
