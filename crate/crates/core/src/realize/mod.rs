//! Constructive realizations of matrices as truncated Toeplitz operators,
//! up to unitary equivalence or similarity, with explicit witnesses.

mod inflation;
mod jordan;
mod normal;
mod rank_one;
mod two_by_two;

use serde::{Deserialize, Serialize};

use crate::disk_geometry::BlaschkeProduct;
use crate::json::cmat;
use crate::linalg::{fro, inverse, CMatrix};
use crate::tto::Operator;
use crate::Result;

pub use inflation::{realize_inflation, toeplitz_matrix};
pub use jordan::{
    coanalytic_similarity_check, default_jordan_zeros, hermite_polynomial, jordan_matrix,
    realize_jordan, JordanRealization, JordanSpec,
};
pub use normal::{realize_normal, NormalRealization};
pub use rank_one::{pairing_unitary, realize_rank_one, RankOneBranch, RankOneRealization};
pub use two_by_two::{realize_2x2, symmetrize_2x2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Unitary,
    Similarity,
}

/// `operator = witness * input * witness^{-1}` with `operator` in `T_theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub theta: BlaschkeProduct,
    pub operator: Operator,
    #[serde(with = "cmat")]
    pub witness: CMatrix,
    pub witness_kind: WitnessKind,
    pub residual: f64,
}

impl Realization {
    pub(crate) fn unitary(
        theta: BlaschkeProduct,
        operator: Operator,
        witness: CMatrix,
        input: &CMatrix,
    ) -> Self {
        let residual = fro(&(&witness * input * witness.adjoint() - &operator.matrix));
        Self {
            theta,
            operator,
            witness,
            witness_kind: WitnessKind::Unitary,
            residual,
        }
    }

    pub(crate) fn similarity(
        theta: BlaschkeProduct,
        operator: Operator,
        witness: CMatrix,
        input: &CMatrix,
    ) -> Result<Self> {
        let inv = inverse(&witness)?;
        let residual = fro(&(&witness * input * inv - &operator.matrix));
        Ok(Self {
            theta,
            operator,
            witness,
            witness_kind: WitnessKind::Similarity,
            residual,
        })
    }
}
