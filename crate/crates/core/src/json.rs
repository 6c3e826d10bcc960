//! Serde adapters for the wire format: a complex scalar is a two-element
//! array `[re, im]`, a matrix is a row-major nested array of such pairs.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub mod cplx {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        pair(z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        <[f64; 2]>::deserialize(d).map(unpair)
    }
}

pub mod cplx_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(pair).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?
            .into_iter()
            .map(unpair)
            .collect())
    }
}

pub mod cmat {
    use super::*;
    use serde::de::Error;

    pub fn serialize<S: Serializer>(m: &DMatrix<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| pair(&m[(i, j)])).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<Complex64>, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        Ok(DMatrix::from_fn(nrows, ncols, |i, j| unpair(rows[i][j])))
    }
}

pub mod cplx_map {
    use super::*;

    pub fn serialize<S: Serializer>(m: &BTreeMap<i32, Complex64>, s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|(k, v)| (k.to_string(), pair(v)))
            .collect::<BTreeMap<String, [f64; 2]>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<i32, Complex64>, D::Error> {
        use serde::de::Error;
        BTreeMap::<String, [f64; 2]>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                k.trim()
                    .parse::<i32>()
                    .map(|k| (k, unpair(v)))
                    .map_err(|_| D::Error::custom(format!("bad exponent key {k:?}")))
            })
            .collect()
    }
}

/// A bare complex scalar in wire form, for payloads that are just `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WireComplex(#[serde(with = "cplx")] pub Complex64);

/// A bare complex vector in wire form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WireVector(#[serde(with = "cplx_vec")] pub Vec<Complex64>);

/// A bare complex matrix in wire form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WireMatrix(#[serde(with = "cmat")] pub DMatrix<Complex64>);
