//! Truncated Toeplitz operators on model spaces of finite Blaschke products.

// `!(x < tol)` is used on purpose so that NaN residuals fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod disk_geometry;
pub mod error;
pub mod isomorphism;
pub mod json;
pub mod linalg;
pub mod model_space;
pub mod realize;
pub mod tto;

pub use config::Tolerances;
pub use error::{Result, TtoError};
