use serde::{Deserialize, Serialize};

/// Numerical thresholds used throughout the crate.
///
/// Every decision that depends on a floating-point comparison reads its
/// threshold from here, so callers can tighten or relax them in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Maximum |B(z) - w| accepted for a polished level-set root.
    pub root_residual: f64,
    /// Roots closer than this are treated as one double root. A cluster of
    /// `m` roots is accepted when its diameter is below `cluster^(2/m)`.
    pub cluster: f64,
    /// Allowed deviation of a recovered unimodular constant from |c| = 1.
    pub unimodular: f64,
    /// Sup-norm residual accepted when verifying an orbit certificate.
    pub certificate: f64,
    /// Radius/angle agreement used by the equal-spacing test.
    pub geometry: f64,
    /// Relative residual below which an operator counts as a TTO.
    pub membership: f64,
    /// Threshold on `verify_spatial_iso` for accepting a decision.
    pub decision: f64,
    /// Maximum ||U*U - I||_F for a matrix to be called unitary.
    pub unitary: f64,
    /// Iteration budget of the hyperbolic centroid search.
    pub centroid_iterations: usize,
    /// Damping factor of the hyperbolic centroid search.
    pub centroid_step: f64,
    /// Radius of the sample points used for the rank-one TTO basis.
    pub basis_radius: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            root_residual: 1e-8,
            cluster: 1e-7,
            unimodular: 1e-8,
            certificate: 1e-8,
            geometry: 1e-8,
            membership: 1e-7,
            decision: 1e-7,
            unitary: 1e-9,
            centroid_iterations: 200,
            centroid_step: 0.5,
            basis_radius: 0.3,
        }
    }
}

impl Tolerances {
    /// Defaults, with `TTO_TOL` (if set and parseable) overriding the
    /// membership and decision thresholds.
    pub fn from_env() -> Self {
        let mut tol = Self::default();
        if let Some(value) = std::env::var("TTO_TOL")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
        {
            tol = tol.with_decision(value);
        }
        tol
    }

    pub fn with_decision(mut self, value: f64) -> Self {
        self.membership = value;
        self.decision = value;
        self
    }
}
