use num_complex::Complex64;

use super::blaschke::BlaschkeProduct;
use super::mobius::MobiusTransform;
use crate::config::Tolerances;
use crate::error::{numerical, Result};
use crate::linalg::ZERO;

/// Pseudo-hyperbolic distance `|phi_{z1}(z2)|`.
pub fn pseudo_hyperbolic(z1: Complex64, z2: Complex64) -> f64 {
    let den = (1.0 - z1.conj() * z2).norm();
    if den == 0.0 {
        return 1.0;
    }
    ((z2 - z1).norm() / den).min(1.0)
}

/// `rho(z1, z2) = log((1 + d) / (1 - d))` with `d` the pseudo-hyperbolic distance.
pub fn hyperbolic_distance(z1: Complex64, z2: Complex64) -> f64 {
    2.0 * pseudo_hyperbolic(z1, z2).atanh()
}

/// `|B'(l)| (1 - |l|^2) / (1 - |B(l)|^2)`.
pub fn schwarz_pick_invariant(b: &BlaschkeProduct, lam: Complex64) -> f64 {
    let (v, d) = b.eval_with_derivative(lam);
    d.norm() * (1.0 - lam.norm_sqr()) / (1.0 - v.norm_sqr())
}

/// Tangent vector at 0 pointing to `w`, with length `rho(0, w)`.
fn log_at_origin(w: Complex64) -> Complex64 {
    let r = w.norm();
    if r == 0.0 {
        ZERO
    } else {
        w * (2.0 * r.atanh() / r)
    }
}

fn exp_at_origin(v: Complex64) -> Complex64 {
    let t = v.norm();
    if t == 0.0 {
        ZERO
    } else {
        v * ((t / 2.0).tanh() / t)
    }
}

/// Minimizer of `sum_j rho(c, z_j)^2`, found by damped gradient steps taken
/// in the chart that sends the current estimate to the origin.
pub fn hyperbolic_centroid(points: &[Complex64], tol: &Tolerances) -> Result<Complex64> {
    if points.is_empty() {
        return Ok(ZERO);
    }
    let n = points.len() as f64;
    let mut center = points.iter().sum::<Complex64>() / n;
    let mut last = f64::INFINITY;
    for _ in 0..tol.centroid_iterations {
        let to_origin = MobiusTransform::phi(center);
        let mean = points
            .iter()
            .map(|&z| log_at_origin(to_origin.eval(z)))
            .sum::<Complex64>()
            / n;
        last = mean.norm();
        if last < 1e-12 {
            return Ok(center);
        }
        center = to_origin
            .inverse()
            .eval(exp_at_origin(mean * tol.centroid_step));
    }
    if last > 1e-9 {
        return numerical(format!(
            "hyperbolic centroid did not converge (gradient {last:e})"
        ));
    }
    Ok(center)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE};

    #[test]
    fn distance_examples() {
        assert_eq!(hyperbolic_distance(ZERO, ZERO), 0.0);
        assert!((hyperbolic_distance(ZERO, c(0.5, 0.0)) - 3f64.ln()).abs() < 1e-15);
        let psi = MobiusTransform::new(ONE, c(0.0, 0.3)).unwrap();
        let d = hyperbolic_distance(psi.eval(ZERO), psi.eval(c(0.5, 0.0)));
        assert!((d - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn schwarz_pick_examples() {
        let z = BlaschkeProduct::monomial(1).unwrap();
        assert!((schwarz_pick_invariant(&z, c(0.3, -0.4)) - 1.0).abs() < 1e-15);
        let z2 = BlaschkeProduct::monomial(2).unwrap();
        assert_eq!(schwarz_pick_invariant(&z2, ZERO), 0.0);
        assert!((schwarz_pick_invariant(&z2, c(0.5, 0.0)) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn centroid_of_symmetric_points() {
        let t = Tolerances::default();
        let pts: Vec<_> = (0..5)
            .map(|k| Complex64::from_polar(0.6, std::f64::consts::TAU * k as f64 / 5.0))
            .collect();
        assert!(hyperbolic_centroid(&pts, &t).unwrap().norm() < 1e-12);

        // centroid is equivariant under automorphisms
        let psi = MobiusTransform::new(c(0.0, 1.0), c(0.25, -0.4)).unwrap();
        let moved: Vec<_> = pts.iter().map(|&z| psi.eval(z)).collect();
        let centre = hyperbolic_centroid(&moved, &t).unwrap();
        assert!((centre - psi.eval(ZERO)).norm() < 1e-10);
    }

    #[test]
    fn centroid_of_two_points_is_the_midpoint() {
        let t = Tolerances::default();
        let a = c(0.1, 0.7);
        let b = c(-0.5, -0.2);
        let m = hyperbolic_centroid(&[a, b], &t).unwrap();
        let da = hyperbolic_distance(m, a);
        let db = hyperbolic_distance(m, b);
        assert!((da - db).abs() < 1e-10);
        assert!((da + db - hyperbolic_distance(a, b)).abs() < 1e-10);
    }
}
