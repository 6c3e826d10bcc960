use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, TtoError};
use crate::json::cplx;
use crate::linalg::{ONE, ZERO};

/// Disk automorphism `z -> eta (z - a) / (1 - conj(a) z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MobiusWire")]
pub struct MobiusTransform {
    #[serde(with = "cplx")]
    pub eta: Complex64,
    #[serde(with = "cplx")]
    pub a: Complex64,
}

#[derive(Deserialize)]
struct MobiusWire {
    #[serde(with = "cplx")]
    eta: Complex64,
    #[serde(with = "cplx")]
    a: Complex64,
}

impl TryFrom<MobiusWire> for MobiusTransform {
    type Error = TtoError;

    fn try_from(w: MobiusWire) -> Result<Self> {
        MobiusTransform::new(w.eta, w.a)
    }
}

const UNIMODULAR_SLACK: f64 = 1e-8;

impl MobiusTransform {
    /// Validates `|eta| = 1` (to 1e-8, then renormalized) and `|a| < 1`.
    pub fn new(eta: Complex64, a: Complex64) -> Result<Self> {
        if !(eta.is_finite() && a.is_finite()) {
            return invalid("Mobius parameters must be finite");
        }
        if (eta.norm() - 1.0).abs() > UNIMODULAR_SLACK {
            return invalid(format!("|eta| = {} is not 1", eta.norm()));
        }
        if a.norm() >= 1.0 {
            return invalid(format!("|a| = {} is not < 1", a.norm()));
        }
        Ok(Self {
            eta: eta / eta.norm(),
            a,
        })
    }

    pub fn identity() -> Self {
        Self { eta: ONE, a: ZERO }
    }

    pub fn rotation(eta: Complex64) -> Self {
        Self {
            eta: eta / eta.norm(),
            a: ZERO,
        }
    }

    /// `phi_a(z) = (z - a) / (1 - conj(a) z)`.
    pub fn phi(a: Complex64) -> Self {
        Self { eta: ONE, a }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eta * (z - self.a) / (ONE - self.a.conj() * z)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let d = ONE - self.a.conj() * z;
        self.eta * (1.0 - self.a.norm_sqr()) / (d * d)
    }

    /// The analytic square root `sqrt(eta) sqrt(1 - |a|^2) / (1 - conj(a) z)`
    /// of the derivative.
    pub fn sqrt_derivative(&self, z: Complex64) -> Complex64 {
        self.eta.sqrt() * (1.0 - self.a.norm_sqr()).sqrt() / (ONE - self.a.conj() * z)
    }

    pub fn is_rotation(&self, tol: f64) -> bool {
        self.a.norm() <= tol
    }

    /// Coefficients `[[p, q], [r, s]]` of `(p z + q) / (r z + s)`.
    fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.eta, -self.eta * self.a], [-self.a.conj(), ONE]]
    }

    fn from_matrix(m: [[Complex64; 2]; 2]) -> Option<Self> {
        let s = m[1][1];
        if s.norm() == 0.0 || !s.is_finite() {
            return None;
        }
        let eta = m[0][0] / s;
        let a = -(m[1][0] / s).conj();
        if eta.norm() == 0.0 || !eta.is_finite() || !a.is_finite() || a.norm() >= 1.0 {
            return None;
        }
        Some(Self {
            eta: eta / eta.norm(),
            a,
        })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let x = self.matrix();
        let y = other.matrix();
        let m = [
            [
                x[0][0] * y[0][0] + x[0][1] * y[1][0],
                x[0][0] * y[0][1] + x[0][1] * y[1][1],
            ],
            [
                x[1][0] * y[0][0] + x[1][1] * y[1][0],
                x[1][0] * y[0][1] + x[1][1] * y[1][1],
            ],
        ];
        Self::from_matrix(m).expect("composition of automorphisms is an automorphism")
    }

    pub fn inverse(&self) -> Self {
        Self {
            eta: self.eta.conj(),
            a: -self.a * self.eta,
        }
    }

    /// The unique linear fractional map sending `z[k]` to `w[k]`, provided
    /// it is a disk automorphism (checked to `tol` on `|eta|` and on the
    /// consistency of the fitted coefficients).
    pub fn through_points(z: [Complex64; 3], w: [Complex64; 3], tol: f64) -> Option<Self> {
        // alpha z + beta - gamma z w = w, with the denominator normalized to gamma z + 1.
        let m = Matrix3::from_fn(|i, j| match j {
            0 => z[i],
            1 => ONE,
            _ => -z[i] * w[i],
        });
        let rhs = Vector3::from_fn(|i, _| w[i]);
        let sol = m.lu().solve(&rhs)?;
        let (alpha, beta, gamma) = (sol[0], sol[1], sol[2]);
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return None;
        }
        if (alpha.norm() - 1.0).abs() > tol {
            return None;
        }
        let eta = alpha / alpha.norm();
        let a = -gamma.conj();
        if a.norm() >= 1.0 || (beta + eta * a).norm() > tol {
            return None;
        }
        Some(Self { eta, a })
    }
}

pub fn mobius_eval(psi: &MobiusTransform, z: Complex64) -> Complex64 {
    psi.eval(z)
}

pub fn mobius_compose(psi1: &MobiusTransform, psi2: &MobiusTransform) -> MobiusTransform {
    psi1.compose(psi2)
}

pub fn mobius_inverse(psi: &MobiusTransform) -> MobiusTransform {
    psi.inverse()
}
