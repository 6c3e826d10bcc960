//! Möbius maps, finite Blaschke products, hyperbolic geometry of the disk and
//! the orbit decision `B1 = psi1 ∘ B2 ∘ psi2`.

pub mod blaschke;
pub mod hyperbolic;
pub mod mobius;
pub mod orbit;

pub use blaschke::{
    blaschke_compose, blaschke_eval, blaschke_eval_with_derivative, blaschke_sharp,
    critical_point_clusters, critical_points, level_set, BlaschkeProduct,
};
pub use hyperbolic::{
    hyperbolic_centroid, hyperbolic_distance, pseudo_hyperbolic, schwarz_pick_invariant,
};
pub use mobius::{mobius_compose, mobius_eval, mobius_inverse, MobiusTransform};
pub use orbit::{decide_orbit, verification_grid, zn_equivalence_test, Certificate};
