#![allow(dead_code)]

use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;
use tto_core::disk_geometry::{BlaschkeProduct, MobiusTransform};
use tto_core::linalg::{CMatrix, CVector};

pub fn disk_point(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, 0.0..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

pub fn unimodular() -> impl Strategy<Value = Complex64> {
    (0.0..TAU).prop_map(|t| Complex64::from_polar(1.0, t))
}

pub fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0, -1.0..1.0).prop_map(|(a, b)| Complex64::new(a, b))
}

pub fn vector(n: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec(complex(), n).prop_map(CVector::from_vec)
}

pub fn matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(), n * n).prop_map(move |v| CMatrix::from_vec(n, n, v))
}

pub fn blaschke(
    orders: std::ops::RangeInclusive<usize>,
    radius: f64,
) -> impl Strategy<Value = BlaschkeProduct> {
    (
        unimodular(),
        prop::collection::vec(disk_point(radius), orders),
    )
        .prop_map(|(c, zeros)| BlaschkeProduct::new(c, zeros).unwrap())
}

/// Products with a zero at the origin.
pub fn blaschke_at_origin(
    orders: std::ops::RangeInclusive<usize>,
    radius: f64,
) -> impl Strategy<Value = BlaschkeProduct> {
    blaschke(orders, radius).prop_map(|b| {
        let mut zeros = b.zeros().to_vec();
        zeros[0] = Complex64::new(0.0, 0.0);
        BlaschkeProduct::new(b.constant(), zeros).unwrap()
    })
}

pub fn mobius(radius: f64) -> impl Strategy<Value = MobiusTransform> {
    (unimodular(), disk_point(radius)).prop_map(|(eta, a)| MobiusTransform::new(eta, a).unwrap())
}

/// Direct product formula, independent of the library evaluator.
pub fn blaschke_direct(b: &BlaschkeProduct, z: Complex64) -> Complex64 {
    b.zeros().iter().fold(b.constant(), |acc, &a| {
        acc * (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
    })
}
