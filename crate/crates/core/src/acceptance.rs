//! Property-based acceptance suite over random model spaces.
//!
//! Each criterion draws its own deterministic corpus from a ChaCha8 stream
//! seeded with `seed ^ id`, evaluates one or more measured quantities, and
//! compares each against a fixed threshold.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::disk_geometry::{
    blaschke_compose, zn_equivalence_test, BlaschkeProduct, MobiusTransform,
};
use crate::error::Result;
use crate::isomorphism::{certificate_unitary_to, decide_spatial_iso, verify_spatial_iso};
use crate::linalg::{
    eigenvalues, fro, inner, kron, singular_values, tensor, unitarity_defect, vectorize, CMatrix,
    CVector, ZERO,
};
use crate::model_space::ModelSpace;
use crate::realize::{
    coanalytic_similarity_check, realize_2x2, realize_inflation, realize_jordan, realize_normal,
    realize_rank_one, toeplitz_matrix, JordanSpec, RankOneBranch,
};
use crate::tto::{
    analytic_normal_defect, clark_operator, compressed_shift, csym_defect, rank_one_tto,
    tto_from_symbol, tto_membership, RankOneKind, Symbol,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Orders up to 3.
    Fast,
    /// Orders up to 6.
    Full,
}

impl Level {
    fn max_order(self) -> usize {
        match self {
            Level::Fast => 3,
            Level::Full => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Pass when `measured < threshold`.
    Below,
    /// Pass when `measured > threshold`.
    Above,
    /// Pass when `measured == threshold`, for integer quantities.
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub quantity: String,
    pub measured: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    pub fn below(quantity: &str, measured: f64, threshold: f64) -> Self {
        Self {
            quantity: quantity.to_string(),
            measured,
            threshold,
            bound: Bound::Below,
            passed: measured < threshold,
        }
    }

    pub fn equal(quantity: &str, measured: f64, expected: f64) -> Self {
        Self {
            quantity: quantity.to_string(),
            measured,
            threshold: expected,
            bound: Bound::Equal,
            passed: measured == expected,
        }
    }

    pub fn above(quantity: &str, measured: f64, threshold: f64) -> Self {
        Self {
            quantity: quantity.to_string(),
            measured,
            threshold,
            bound: Bound::Above,
            passed: measured > threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: String,
    pub cases: usize,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub passed: bool,
}

impl CriterionReport {
    fn new(id: usize, name: &str, outcome: Result<(usize, Vec<Check>)>) -> Self {
        let (cases, checks, error) = match outcome {
            Ok((cases, checks)) => (cases, checks, None),
            Err(e) => (0, Vec::new(), Some(e.to_string())),
        };
        let passed = error.is_none() && !checks.is_empty() && checks.iter().all(|c| c.passed);
        Self {
            id,
            name: name.to_string(),
            cases,
            checks,
            error,
            passed,
        }
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{verdict}] {:>2} {} ({} cases)",
            self.id, self.name, self.cases
        )?;
        for c in &self.checks {
            let op = match c.bound {
                Bound::Below => "<",
                Bound::Above => ">",
                Bound::Equal => "==",
            };
            if c.bound == Bound::Equal {
                write!(f, "; {} = {} {op} {}", c.quantity, c.measured, c.threshold)?;
            } else {
                write!(
                    f,
                    "; {} = {:.3e} {op} {:.0e}",
                    c.quantity, c.measured, c.threshold
                )?;
            }
        }
        if let Some(e) = &self.error {
            write!(f, "; error: {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub level: Level,
    pub seed: u64,
    pub criteria: Vec<CriterionReport>,
    pub passed: bool,
}

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

pub const CRITERIA: [&str; 13] = [
    "dimension law",
    "C-symmetry",
    "kernel identities",
    "Clark unitary",
    "commutation implies membership",
    "spatial isomorphism round trip",
    "z^n corollary consistency",
    "rank-one realization",
    "2x2 realization",
    "normal realization",
    "inflation",
    "Jordan realization",
    "analytic non-normality",
];

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: usize, level: Level, seed: u64, tol: &Tolerances) -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ id as u64);
    let n = level.max_order();
    let outcome = match id {
        1 => dimension_law(&mut rng, n, tol),
        2 => c_symmetry(&mut rng, n),
        3 => kernel_identities(&mut rng, n),
        4 => clark(&mut rng, n, tol),
        5 => commutation(&mut rng, n, tol),
        6 => round_trip(&mut rng, n.min(5), tol),
        7 => zn_corollary(&mut rng, n, tol),
        8 => rank_one(&mut rng, n),
        9 => two_by_two(&mut rng, tol),
        10 => normal(&mut rng, n.min(5), tol),
        11 => inflation(&mut rng),
        12 => jordan(&mut rng, if level == Level::Fast { 4 } else { 8 }),
        13 => analytic_non_normality(&mut rng, n, tol),
        _ => {
            return CriterionReport::new(id, "unknown", crate::error::invalid("no such criterion"))
        }
    };
    CriterionReport::new(id, CRITERIA[id - 1], outcome)
}

pub fn run_all(level: Level, seed: u64, tol: &Tolerances) -> AcceptanceReport {
    let criteria: Vec<CriterionReport> = (1..=CRITERIA.len())
        .map(|id| run_criterion(id, level, seed, tol))
        .collect();
    let passed = criteria.iter().all(|c| c.passed);
    AcceptanceReport {
        level,
        seed,
        criteria,
        passed,
    }
}

pub fn random_disk_point<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    Complex64::from_polar(
        radius * rng.random::<f64>().sqrt(),
        TAU * rng.random::<f64>(),
    )
}

pub fn random_unimodular<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, TAU * rng.random::<f64>())
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| random_complex(rng))
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| random_complex(rng))
}

pub fn random_blaschke<R: Rng>(rng: &mut R, n: usize, radius: f64) -> BlaschkeProduct {
    let zeros = (0..n).map(|_| random_disk_point(rng, radius)).collect();
    BlaschkeProduct::new(random_unimodular(rng), zeros).expect("zeros drawn inside the disk")
}

/// Random product with a zero at the origin, so `Theta(0) = 0`.
pub fn random_blaschke_at_origin<R: Rng>(rng: &mut R, n: usize, radius: f64) -> BlaschkeProduct {
    let mut zeros = vec![ZERO];
    zeros.extend((1..n).map(|_| random_disk_point(rng, radius)));
    BlaschkeProduct::new(random_unimodular(rng), zeros).expect("zeros drawn inside the disk")
}

pub fn random_mobius<R: Rng>(rng: &mut R, radius: f64) -> MobiusTransform {
    MobiusTransform::new(random_unimodular(rng), random_disk_point(rng, radius))
        .expect("parameter drawn inside the disk")
}

pub fn random_symbol<R: Rng>(rng: &mut R, degree: i32) -> Symbol {
    Symbol::new(
        (-degree..=degree)
            .map(|k| (k, random_complex(rng)))
            .collect::<BTreeMap<_, _>>(),
    )
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn dimension_law<R: Rng>(
    rng: &mut R,
    max_n: usize,
    _tol: &Tolerances,
) -> Result<(usize, Vec<Check>)> {
    let mut worst_gap = f64::INFINITY;
    let mut checks = Vec::new();
    let mut cases = 0;
    for n in 1..=max_n {
        let expected = 2 * n - 1;
        let mut reported = expected;
        for _ in 0..5 {
            let space = ModelSpace::new(random_blaschke(rng, n, 0.8), None)?;
            let count = 4 * n + 4;
            let mut cols = Vec::with_capacity(count);
            for _ in 0..count {
                let op = rank_one_tto(&space, RankOneKind::KCk, random_disk_point(rng, 0.9))?;
                let v = vectorize(&op.matrix);
                let norm = v.norm();
                cols.push(v / Complex64::from(norm));
            }
            let s = singular_values(&CMatrix::from_columns(&cols));
            let rank = s.iter().filter(|&&x| x > 1e-8 * s[0]).count();
            if rank != expected {
                reported = rank;
            }
            let next = s.get(expected).copied().unwrap_or(0.0);
            worst_gap = worst_gap.min(s[expected - 1] / next);
            cases += 1;
        }
        checks.push(Check::equal(
            &format!("dim_TTO[n={n}]"),
            reported as f64,
            expected as f64,
        ));
    }
    checks.push(Check::above("min gap ratio", worst_gap, 1e6));
    Ok((cases, checks))
}

fn c_symmetry<R: Rng>(rng: &mut R, max_n: usize) -> Result<(usize, Vec<Check>)> {
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(1..=max_n);
        let space = ModelSpace::new(random_blaschke(rng, n, 0.8), None)?;
        let degree = rng.random_range(0..=3);
        let a = tto_from_symbol(&space, &random_symbol(rng, degree)).matrix;
        worst = worst.max(csym_defect(&space, &a));
    }
    Ok((50, vec![Check::below("csym_defect_max", worst, 1e-10)]))
}

fn kernel_identities<R: Rng>(rng: &mut R, max_n: usize) -> Result<(usize, Vec<Check>)> {
    let (mut repro, mut norm, mut pairing) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = rng.random_range(1..=max_n);
        let theta = random_blaschke(rng, n, 0.8);
        let space = ModelSpace::new(theta.clone(), None)?;
        let lam = random_disk_point(rng, 0.9);
        let k = space.kernel(lam)?;
        let f = random_vector(rng, n);
        repro = repro.max((space.inner_product(&f, &k)? - space.eval_fn(&f, lam)).norm());
        let (value, derivative) = theta.eval_with_derivative(lam);
        let expected = (1.0 - value.norm_sqr()) / (1.0 - lam.norm_sqr());
        norm = norm.max((k.norm_squared() - expected).abs());
        let ck = space.conjugate(&k)?;
        pairing = pairing.max((inner(&ck, &k) - derivative).norm());
    }
    Ok((
        100,
        vec![
            Check::below("reproducing", repro, 1e-9),
            Check::below("norm formula", norm, 1e-9),
            Check::below("<CK, K> - Theta'", pairing, 1e-9),
        ],
    ))
}

fn clark<R: Rng>(rng: &mut R, max_n: usize, tol: &Tolerances) -> Result<(usize, Vec<Check>)> {
    let (mut unitary, mut eig, mut weights, mut parseval) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let cases = 20;
    for _ in 0..cases {
        let n = rng.random_range(1..=max_n);
        let space = ModelSpace::new(random_blaschke_at_origin(rng, n, 0.8), None)?;
        let alpha = random_unimodular(rng);
        let u = clark_operator(&space, alpha, tol)?.matrix;
        unitary = unitary.max(unitarity_defect(&u));
        let system = space.clark_system(alpha, tol)?;
        for &zeta in &system.points {
            let k = space.normalized_kernel(zeta)?;
            eig = eig.max((&u * &k - &k * zeta).norm());
        }
        weights = weights.max((system.weights.iter().sum::<f64>() - 1.0).abs());
        let f = random_vector(rng, n);
        let g = random_vector(rng, n);
        let quadrature: Complex64 = system
            .points
            .iter()
            .zip(&system.weights)
            .map(|(&z, &w)| space.eval_fn(&f, z) * space.eval_fn(&g, z).conj() * w)
            .sum();
        parseval = parseval.max((space.inner_product(&f, &g)? - quadrature).norm());
    }
    Ok((
        cases,
        vec![
            Check::below("unitarity defect", unitary, 1e-10),
            Check::below("eigenpair residual", eig, 1e-9),
            Check::below("|sum w - 1|", weights, 1e-9),
            Check::below("Parseval", parseval, 1e-9),
        ],
    ))
}

fn commutation<R: Rng>(rng: &mut R, max_n: usize, tol: &Tolerances) -> Result<(usize, Vec<Check>)> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(2..=max_n);
        let space = ModelSpace::new(random_blaschke_at_origin(rng, n, 0.7), None)?;
        let u = clark_operator(&space, random_unimodular(rng), tol)?.matrix;
        let mut p = CMatrix::zeros(n, n);
        let mut power = CMatrix::identity(n, n);
        for _ in 0..n {
            p += &power * random_complex(rng);
            power = &power * &u;
        }
        worst = worst.max(tto_membership(&space, &p, tol)?);
    }
    let space = ModelSpace::new(BlaschkeProduct::monomial(2)?, None)?;
    let az = compressed_shift(&space).matrix;
    let product = tto_membership(&space, &(&az * az.adjoint()), tol)?;
    Ok((
        21,
        vec![
            Check::below("p(U) membership", worst, 1e-7),
            Check::above("A_z A_z* membership", product, 1e-2),
        ],
    ))
}

fn round_trip<R: Rng>(rng: &mut R, max_n: usize, tol: &Tolerances) -> Result<(usize, Vec<Check>)> {
    let mut worst = 0.0f64;
    let mut missing = 0usize;
    for _ in 0..30 {
        let n = rng.random_range(1..=max_n);
        let b = random_blaschke(rng, n, 0.7);
        let psi1 = random_mobius(rng, 0.5);
        let psi2 = random_mobius(rng, 0.5);
        let inner_b = if rng.random::<bool>() {
            b.sharp()
        } else {
            b.clone()
        };
        let target = blaschke_compose(&inner_b, Some(&psi2), Some(&psi1), tol)?;
        match decide_spatial_iso(&b, &target, None, tol)? {
            Some(cert) => {
                let u = certificate_unitary_to(&b, &target, &cert, None, tol)?;
                worst = worst.max(verify_spatial_iso(&u, None, tol)?);
            }
            None => missing += 1,
        }
    }
    let zeros = vec![
        Complex64::from(0.1),
        Complex64::from(0.2),
        Complex64::from(0.3),
    ];
    let negative = decide_spatial_iso(
        &BlaschkeProduct::monomial(3)?,
        &BlaschkeProduct::from_zeros(zeros)?,
        None,
        tol,
    )?;
    Ok((
        31,
        vec![
            Check::below("missed certificates", missing as f64, 0.5),
            Check::below("verify_spatial_iso max", worst, 1e-7),
            Check::below(
                "negative pair certified",
                negative.is_some() as u8 as f64,
                0.5,
            ),
        ],
    ))
}

fn zn_corollary<R: Rng>(
    rng: &mut R,
    max_n: usize,
    tol: &Tolerances,
) -> Result<(usize, Vec<Check>)> {
    let mut disagreements = 0usize;
    let mut mislabelled = 0usize;
    for case in 0..20 {
        let n = rng.random_range(3..=max_n.max(3));
        let (b, expected) = match case % 5 {
            // the orbit itself: post ∘ z^n ∘ pre
            0 => {
                let post = random_mobius(rng, 0.5);
                let pre = random_mobius(rng, 0.5);
                let b =
                    blaschke_compose(&BlaschkeProduct::monomial(n)?, Some(&pre), Some(&post), tol)?;
                (b, true)
            }
            // zeros equally spaced on a circle about a moved centre
            1 => {
                let r = rng.random_range(0.2..0.7);
                let start = TAU * rng.random::<f64>();
                let psi = random_mobius(rng, 0.5);
                let zeros = (0..n)
                    .map(|k| psi.eval(Complex64::from_polar(r, start + TAU * k as f64 / n as f64)))
                    .collect();
                (BlaschkeProduct::new(random_unimodular(rng), zeros)?, true)
            }
            // order two is always in the orbit
            2 => (random_blaschke(rng, 2, 0.7), true),
            // generic zeros
            3 => (random_blaschke(rng, n, 0.7), false),
            // equal radii, unequal spacing
            _ => {
                let r = rng.random_range(0.2..0.7);
                let zeros = (0..n)
                    .map(|k| {
                        let jitter = if k == 0 { 0.3 / n as f64 } else { 0.0 };
                        Complex64::from_polar(r, TAU * k as f64 / n as f64 + jitter)
                    })
                    .collect();
                (BlaschkeProduct::from_zeros(zeros)?, false)
            }
        };
        let order = b.order();
        let geometric = zn_equivalence_test(&b, tol)?;
        let decided =
            decide_spatial_iso(&BlaschkeProduct::monomial(order)?, &b, None, tol)?.is_some();
        if geometric != decided {
            disagreements += 1;
        }
        if geometric != expected {
            mislabelled += 1;
        }
    }
    Ok((
        20,
        vec![
            Check::below("disagreements", disagreements as f64, 0.5),
            Check::below("construction mismatches", mislabelled as f64, 0.5),
        ],
    ))
}

fn rank_one<R: Rng>(rng: &mut R, max_n: usize) -> Result<(usize, Vec<Check>)> {
    let (mut pairing, mut transport, mut residual) = (0.0f64, 0.0f64, 0.0f64);
    let mut wrong_branch = 0usize;
    let mut cases = 0;
    for branch in [
        RankOneBranch::Orthogonal,
        RankOneBranch::Parallel,
        RankOneBranch::Generic,
    ] {
        for _ in 0..5 {
            let n = rng.random_range(2..=max_n.max(2));
            let u = random_vector(rng, n);
            let w = random_vector(rng, n);
            let v = match branch {
                RankOneBranch::Orthogonal => {
                    let uh = &u / Complex64::from(u.norm());
                    &w - &uh * inner(&w, &uh)
                }
                RankOneBranch::Parallel => &u * random_complex(rng),
                RankOneBranch::Generic => w,
            };
            let out = realize_rank_one(&u, &v, None)?;
            if out.branch != branch {
                wrong_branch += 1;
            }
            pairing = pairing.max((out.pairing - out.t).abs());
            transport = transport.max(out.transport_residual);
            let scale = u.norm() * v.norm();
            let direct = fro(&(&out.realization.witness
                * tensor(&u, &v)
                * out.realization.witness.adjoint()
                - &out.realization.operator.matrix));
            residual = residual.max(direct / scale);
            cases += 1;
        }
    }
    Ok((
        cases,
        vec![
            Check::below("branch mismatches", wrong_branch as f64, 0.5),
            Check::below("|<k, Ck> - t|", pairing, 1e-10),
            Check::below("transport residual", transport, 1e-9),
            Check::below("relative tensor residual", residual, 1e-9),
        ],
    ))
}

fn two_by_two<R: Rng>(rng: &mut R, tol: &Tolerances) -> Result<(usize, Vec<Check>)> {
    let mut invariants = 0.0f64;
    let mut membership = 0.0f64;
    let mut witness = 0.0f64;
    for _ in 0..20 {
        let t = random_matrix(rng, 2);
        for b in [BlaschkeProduct::monomial(2)?, random_blaschke(rng, 2, 0.7)] {
            let out = realize_2x2(&t, &b, None, tol)?;
            let a = &out.operator.matrix;
            let trace = |m: &CMatrix| m.trace();
            let gaps = [
                (trace(a) - trace(&t)).norm(),
                (trace(&(a * a)) - trace(&(&t * &t))).norm(),
                (trace(&(a.adjoint() * a)) - trace(&(t.adjoint() * &t))).norm(),
            ];
            invariants = invariants.max(max(gaps));
            witness = witness
                .max(unitarity_defect(&out.witness))
                .max(out.residual);
            let space = ModelSpace::new(b, None)?;
            membership = membership.max(tto_membership(&space, a, tol)?);
        }
    }
    Ok((
        40,
        vec![
            Check::below("unitary invariants", invariants, 1e-8),
            Check::below("witness defect", witness, 1e-8),
            Check::below("membership", membership, 1e-7),
        ],
    ))
}

/// Largest distance from a point of `a` to its partner under greedy
/// nearest matching against `b`.
fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut pool = b.to_vec();
    let mut worst = 0.0f64;
    for &x in a {
        let (idx, d) = pool
            .iter()
            .enumerate()
            .map(|(i, &y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap_or((0, f64::INFINITY));
        worst = worst.max(d);
        if !pool.is_empty() {
            pool.swap_remove(idx);
        }
    }
    worst
}

fn normal<R: Rng>(rng: &mut R, max_n: usize, tol: &Tolerances) -> Result<(usize, Vec<Check>)> {
    let (mut normality, mut spectrum) = (0.0f64, 0.0f64);
    let mut cases = 0;
    for n in 2..=max_n {
        for _ in 0..4 {
            let theta = random_blaschke_at_origin(rng, n, 0.7);
            let eigs: Vec<Complex64> = (0..n).map(|_| random_complex(rng) * 2.0).collect();
            let out = realize_normal(&eigs, &theta, random_unimodular(rng), None, tol)?;
            let a = &out.realization.operator.matrix;
            normality = normality.max(fro(&(a * a.adjoint() - a.adjoint() * a)));
            spectrum = spectrum.max(spectrum_distance(&eigenvalues(a)?, &eigs));
            cases += 1;
        }
    }
    Ok((
        cases,
        vec![
            Check::below("normality defect", normality, 1e-9),
            Check::below("spectrum mismatch", spectrum, 1e-8),
        ],
    ))
}

fn inflation<R: Rng>(rng: &mut R) -> Result<(usize, Vec<Check>)> {
    let mut worst = 0.0f64;
    let mut unitary = 0.0f64;
    let mut cases = 0;
    for (n, k) in [(2, 2), (3, 2), (2, 3)] {
        for _ in 0..3 {
            let symbol = random_symbol(rng, n as i32 - 1);
            let b = random_blaschke(rng, k, 0.7);
            let out = realize_inflation(&symbol, n, &b, None)?;
            let w = &out.witness;
            let expected = kron(&toeplitz_matrix(&symbol, n), &CMatrix::identity(k, k));
            worst = worst.max(fro(&(w.adjoint() * &out.operator.matrix * w - expected)));
            unitary = unitary.max(unitarity_defect(w));
            cases += 1;
        }
    }
    Ok((
        cases,
        vec![
            Check::below("||F* A F - T(psi) ⊗ I||_F", worst, 1e-8),
            Check::below("basis unitarity defect", unitary, 1e-9),
        ],
    ))
}

fn random_jordan_spec<R: Rng>(rng: &mut R, max_d: usize) -> JordanSpec {
    let mut blocks: Vec<(Complex64, usize)> = Vec::new();
    let mut total = 0;
    let count = rng.random_range(1..=3usize);
    for _ in 0..count {
        if total >= max_d {
            break;
        }
        let size = rng.random_range(1..=(max_d - total).min(4));
        let eigenvalue = match blocks.first() {
            Some(&(first, _)) if rng.random::<bool>() => first,
            _ => random_complex(rng) * 2.0,
        };
        blocks.push((eigenvalue, size));
        total += size;
    }
    JordanSpec::new(&blocks)
}

fn jordan<R: Rng>(rng: &mut R, max_d: usize) -> Result<(usize, Vec<Check>)> {
    let (mut similarity, mut symbol_gap, mut corollary) = (0.0f64, 0.0f64, 0.0f64);
    let mut not_coanalytic = 0usize;
    let mut repeated = 0usize;
    for case in 0..10 {
        let mut spec = random_jordan_spec(rng, max_d);
        if case == 0 {
            // guarantee one repeated eigenvalue across blocks
            let mu = random_complex(rng);
            spec = JordanSpec::new(&[(mu, 2), (mu, 1), (random_complex(rng), 2)]);
        }
        let eigs: Vec<Complex64> = spec.blocks.iter().map(|b| b.eigenvalue).collect();
        if eigs.iter().enumerate().any(|(i, x)| eigs[..i].contains(x)) {
            repeated += 1;
        }
        let out = realize_jordan(&spec, None, None)?;
        similarity = similarity.max(out.similarity_residual);
        let a = &out.realization.operator.matrix;
        match &out.realization.operator.symbol {
            Some(symbol) if symbol.is_coanalytic(0.0) => {
                let space = ModelSpace::new(out.realization.theta.clone(), None)?;
                let rebuilt = tto_from_symbol(&space, symbol).matrix;
                symbol_gap = symbol_gap.max(fro(&(rebuilt - a)) / fro(a).max(1.0));
            }
            _ => not_coanalytic += 1,
        }
        corollary = corollary.max(coanalytic_similarity_check(&out, None)?);
    }
    Ok((
        10,
        vec![
            Check::below("similarity residual", similarity, 1e-7),
            Check::below("non-co-analytic symbols", not_coanalytic as f64, 0.5),
            Check::below("symbol reconstruction", symbol_gap, 1e-7),
            Check::below("co-analytic similarity check", corollary, 1e-7),
            Check::above("specs with repeated eigenvalues", repeated as f64, 0.5),
        ],
    ))
}

fn analytic_non_normality<R: Rng>(
    rng: &mut R,
    max_n: usize,
    tol: &Tolerances,
) -> Result<(usize, Vec<Check>)> {
    let mut excess = f64::NEG_INFINITY;
    let mut gap = f64::INFINITY;
    for _ in 0..20 {
        let n = rng.random_range(2..=max_n);
        let theta = random_blaschke(rng, n, 0.7);
        let space = ModelSpace::new(theta.clone(), None)?;
        let ck0 = space.conjugate(&space.kernel(ZERO)?)?;
        let ck0 = &ck0 / Complex64::from(ck0.norm());
        let g = random_vector(rng, n);
        let g = &g - &ck0 * inner(&g, &ck0);
        let (adjoint, forward) = analytic_normal_defect(&space, &g, tol)?;
        let factor = theta.eval(ZERO).norm();
        excess = excess.max(adjoint - factor * forward);
        gap = gap.min((forward - adjoint) / forward);
    }
    Ok((
        20,
        vec![
            Check::below("||A* K0|| - |Theta(0)| ||A K0||", excess, 1e-9),
            Check::above("relative gap", gap, 0.0),
        ],
    ))
}
