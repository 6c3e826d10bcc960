//! JSON-driven front end over `tto-core`.
//!
//! Every command produces one JSON document. The process exit code is
//! 0 on success or a positive decision, 1 on a negative decision, 2 on a
//! usage error and 3 on a numerical failure.

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};

use tto_core::acceptance::{run_all, Level, DEFAULT_SEED};
use tto_core::disk_geometry::{
    critical_point_clusters, hyperbolic_distance, zn_equivalence_test, BlaschkeProduct, Certificate,
};
use tto_core::isomorphism::{certificate_unitary_to, decide_spatial_iso, verify_spatial_iso};
use tto_core::json::{WireComplex, WireMatrix, WireVector};
use tto_core::linalg::CVector;
use tto_core::model_space::{FunctionVec, ModelSpace};
use tto_core::realize::{
    realize_2x2, realize_inflation, realize_jordan, realize_normal, realize_rank_one, JordanSpec,
};
use tto_core::tto::Symbol;
use tto_core::{Tolerances, TtoError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Two orders of critical distances closer than this are reported as equal.
const DISTANCE_MATCH: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "tto",
    version,
    about = "Truncated Toeplitz operators on finite-dimensional model spaces"
)]
struct Cli {
    /// Membership and decision threshold (overrides TTO_TOL).
    #[arg(long, global = true, value_parser = positive_f64)]
    tol: Option<f64>,
    /// Number of boundary quadrature nodes.
    #[arg(long, global = true)]
    quad_points: Option<usize>,
    /// Seed for random test points.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write the output document to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reproducing kernel K_lambda of a model space.
    Kernel {
        #[arg(long)]
        theta: String,
        #[arg(long)]
        lambda: String,
    },
    /// Spatial isomorphism of truncated Toeplitz operator spaces.
    #[command(subcommand)]
    Iso(IsoCommand),
    /// Realize matrices as truncated Toeplitz operators.
    #[command(subcommand)]
    Realize(RealizeCommand),
    /// Run the acceptance suite.
    Selftest {
        #[arg(value_enum)]
        level: SelftestLevel,
    },
}

#[derive(Debug, Args)]
struct ThetaPair {
    #[arg(long)]
    theta1: String,
    #[arg(long)]
    theta2: String,
}

#[derive(Debug, Subcommand)]
enum IsoCommand {
    /// Search for a certificate that the two spaces are spatially isomorphic.
    Decide {
        #[command(flatten)]
        pair: ThetaPair,
    },
    /// Check a given certificate.
    Verify {
        #[command(flatten)]
        pair: ThetaPair,
        #[arg(long)]
        cert: String,
    },
}

#[derive(Debug, Subcommand)]
enum RealizeCommand {
    /// Rank-one operator u ⊗ v.
    Rank1 {
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    /// Any 2x2 matrix, on K_theta for an order-2 theta (default z^2).
    M2 {
        #[arg(long)]
        t: String,
        #[arg(long)]
        theta: Option<String>,
    },
    /// Normal matrix with the given eigenvalues.
    Normal {
        #[arg(long)]
        eigs: String,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        alpha: String,
    },
    /// Toeplitz matrix T_n(symbol) inflated through B.
    Inflate {
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        b: String,
        /// Toeplitz size; defaults to one more than the largest |exponent|.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Jordan matrix, similar to a co-analytic TTO.
    Jordan {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        zeros: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SelftestLevel {
    Fast,
    Full,
}

impl From<SelftestLevel> for Level {
    fn from(l: SelftestLevel) -> Self {
        match l {
            SelftestLevel::Fast => Level::Fast,
            SelftestLevel::Full => Level::Full,
        }
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("{s:?} is not a positive number")),
    }
}

/// Inputs a command may read besides its arguments.
pub struct Context {
    pub stdin: Box<dyn Read>,
    /// Value of `TTO_TOL`, if set.
    pub env_tol: Option<String>,
}

impl Context {
    pub fn from_process() -> Self {
        Self {
            stdin: Box::new(std::io::stdin()),
            env_tol: std::env::var("TTO_TOL").ok(),
        }
    }

    pub fn with_stdin(stdin: impl Read + 'static) -> Self {
        Self {
            stdin: Box::new(stdin),
            env_tol: None,
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub code: i32,
    pub document: Value,
    /// Plain text to show instead of the document (help and version).
    pub text: Option<String>,
}

impl Response {
    /// The document as printed and written by `--out`.
    pub fn rendered(&self) -> String {
        match &self.text {
            Some(t) => t.clone(),
            None => {
                let mut s = serde_json::to_string_pretty(&self.document)
                    .expect("JSON values always serialize");
                s.push('\n');
                s
            }
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<TtoError> for Failure {
    fn from(e: TtoError) -> Self {
        match e {
            TtoError::InvalidInput(m) => Failure::Usage(m),
            TtoError::NumericalFailure(m) => Failure::Numerical(m),
        }
    }
}

type Outcome = Result<(i32, Value, Option<usize>), Failure>;

/// Parses `args` (without the program name) and runs the command.
pub fn dispatch(args: &[&str]) -> (i32, Value) {
    let r = run(args, Context::with_stdin(std::io::empty()));
    (r.code, r.document)
}

/// Like [`dispatch`], with explicit stdin and environment. Writes the
/// `--out` file when requested.
pub fn run<S: AsRef<str>>(args: &[S], mut ctx: Context) -> Response {
    let argv = std::iter::once("tto").chain(args.iter().map(AsRef::as_ref));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
                    if e.exit_code() == 0 =>
                {
                    Response {
                        code: EXIT_OK,
                        document: json!({ "help": text }),
                        text: Some(text),
                    }
                }
                _ => Response {
                    code: EXIT_USAGE,
                    document: error_document("usage", &text, &Tolerances::default(), None),
                    text: None,
                },
            };
        }
    };

    let tol = match tolerances(cli.tol, ctx.env_tol.as_deref()) {
        Ok(t) => t,
        Err(msg) => {
            return Response {
                code: EXIT_USAGE,
                document: error_document("usage", &msg, &Tolerances::default(), cli.quad_points),
                text: None,
            }
        }
    };

    let mut payloads = Payloads {
        stdin: &mut ctx.stdin,
        stdin_used: false,
    };
    let outcome = execute(&cli, &tol, &mut payloads);
    let mut response = match outcome {
        Ok((code, body, quad)) => Response {
            code,
            document: with_context(body, &tol, quad),
            text: None,
        },
        Err(Failure::Usage(m)) => Response {
            code: EXIT_USAGE,
            document: error_document("usage", &m, &tol, cli.quad_points),
            text: None,
        },
        Err(Failure::Numerical(m)) => Response {
            code: EXIT_NUMERICAL,
            document: error_document("numerical", &m, &tol, cli.quad_points),
            text: None,
        },
    };

    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, response.rendered()) {
            response = Response {
                code: EXIT_USAGE,
                document: error_document(
                    "usage",
                    &format!("cannot write {}: {e}", path.display()),
                    &tol,
                    cli.quad_points,
                ),
                text: None,
            };
        }
    }
    response
}

/// Flag beats `TTO_TOL`, which beats the defaults.
fn tolerances(flag: Option<f64>, env: Option<&str>) -> Result<Tolerances, String> {
    let base = Tolerances::default();
    if let Some(t) = flag {
        return Ok(base.with_decision(t));
    }
    match env {
        Some(s) => positive_f64(s)
            .map(|t| base.with_decision(t))
            .map_err(|e| format!("TTO_TOL: {e}")),
        None => Ok(base),
    }
}

fn with_context(body: Value, tol: &Tolerances, quad: Option<usize>) -> Value {
    let mut map = match body {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    map.insert("tolerances".into(), to_value(tol));
    map.insert("quad_points".into(), json!(quad));
    Value::Object(map)
}

fn error_document(kind: &str, message: &str, tol: &Tolerances, quad: Option<usize>) -> Value {
    with_context(
        json!({ "error": { "kind": kind, "message": message } }),
        tol,
        quad,
    )
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("output types always serialize")
}

struct Payloads<'a> {
    stdin: &'a mut Box<dyn Read>,
    stdin_used: bool,
}

impl Payloads<'_> {
    /// `-` reads stdin, an existing path reads the file, anything else is
    /// parsed as inline JSON.
    fn load<T: DeserializeOwned>(&mut self, flag: &str, arg: &str) -> Result<T, Failure> {
        let text = if arg == "-" {
            if self.stdin_used {
                return Err(Failure::Usage(format!(
                    "--{flag}: stdin was already consumed by another payload"
                )));
            }
            self.stdin_used = true;
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| Failure::Usage(format!("--{flag}: cannot read stdin: {e}")))?;
            s
        } else if Path::new(arg).is_file() {
            std::fs::read_to_string(arg)
                .map_err(|e| Failure::Usage(format!("--{flag}: cannot read {arg}: {e}")))?
        } else {
            arg.to_string()
        };
        serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("--{flag}: invalid payload: {e}")))
    }

    fn complex(&mut self, flag: &str, arg: &str) -> Result<num_complex::Complex64, Failure> {
        match self.load::<Value>(flag, arg)? {
            Value::Number(n) => n
                .as_f64()
                .map(|re| num_complex::Complex64::new(re, 0.0))
                .ok_or_else(|| Failure::Usage(format!("--{flag}: not a number"))),
            v => serde_json::from_value::<WireComplex>(v)
                .map(|w| w.0)
                .map_err(|e| Failure::Usage(format!("--{flag}: invalid complex number: {e}"))),
        }
    }

    /// Bare `[[re, im], ...]` or `{"coeffs": [...]}`.
    fn vector(&mut self, flag: &str, arg: &str) -> Result<CVector, Failure> {
        let v = self.load::<Value>(flag, arg)?;
        let parsed = if v.is_object() {
            serde_json::from_value::<FunctionVec>(v).map(|f| CVector::from(&f))
        } else {
            serde_json::from_value::<WireVector>(v).map(|w| CVector::from_vec(w.0))
        };
        parsed.map_err(|e| Failure::Usage(format!("--{flag}: invalid vector: {e}")))
    }
}

fn space_quad(theta: &BlaschkeProduct, quad: Option<usize>) -> Result<Option<usize>, Failure> {
    Ok(Some(ModelSpace::new(theta.clone(), quad)?.quad_points()))
}

fn execute(cli: &Cli, tol: &Tolerances, p: &mut Payloads) -> Outcome {
    let quad = cli.quad_points;
    match &cli.command {
        Command::Kernel { theta, lambda } => {
            let theta: BlaschkeProduct = p.load("theta", theta)?;
            let lam = p.complex("lambda", lambda)?;
            let space = ModelSpace::new(theta, quad)?;
            let k = space.kernel(lam)?;
            Ok((
                EXIT_OK,
                to_value(&FunctionVec::from(&k)),
                Some(space.quad_points()),
            ))
        }
        Command::Iso(IsoCommand::Decide { pair }) => {
            let b1: BlaschkeProduct = p.load("theta1", &pair.theta1)?;
            let b2: BlaschkeProduct = p.load("theta2", &pair.theta2)?;
            let m = space_quad(&b1, quad)?;
            match decide_spatial_iso(&b1, &b2, quad, tol)? {
                Some(cert) => Ok((EXIT_OK, to_value(&cert), m)),
                None => Ok((EXIT_NEGATIVE, diagnostics(&b1, &b2, tol), m)),
            }
        }
        Command::Iso(IsoCommand::Verify { pair, cert }) => {
            let b1: BlaschkeProduct = p.load("theta1", &pair.theta1)?;
            let b2: BlaschkeProduct = p.load("theta2", &pair.theta2)?;
            let cert: Certificate = p.load("cert", cert)?;
            let m = space_quad(&b1, quad)?;
            if b1.order() != b2.order() {
                return Ok((
                    EXIT_NEGATIVE,
                    json!({
                        "verified": false,
                        "reason": "orders differ",
                        "threshold": tol.decision,
                    }),
                    m,
                ));
            }
            let orbit_residual = cert.residual(&b1, &b2);
            if !cert.verify(&b1, &b2, tol) {
                return Ok((
                    EXIT_NEGATIVE,
                    json!({
                        "verified": false,
                        "orbit_residual": orbit_residual,
                        "spatial_residual": null,
                        "threshold": tol.decision,
                    }),
                    m,
                ));
            }
            let u = certificate_unitary_to(&b1, &b2, &cert, quad, tol)?;
            let residual = verify_spatial_iso(&u, quad, tol)?;
            let verified = residual < tol.decision;
            Ok((
                if verified { EXIT_OK } else { EXIT_NEGATIVE },
                json!({
                    "verified": verified,
                    "orbit_residual": orbit_residual,
                    "spatial_residual": residual,
                    "threshold": tol.decision,
                }),
                m,
            ))
        }
        Command::Realize(r) => realize(r, quad, tol, p),
        Command::Selftest { level } => {
            let report = run_all((*level).into(), cli.seed.unwrap_or(DEFAULT_SEED), tol);
            let code = if report.passed {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            };
            Ok((code, to_value(&report), quad))
        }
    }
}

fn realize(
    cmd: &RealizeCommand,
    quad: Option<usize>,
    tol: &Tolerances,
    p: &mut Payloads,
) -> Outcome {
    let (body, theta) = match cmd {
        RealizeCommand::Rank1 { u, v } => {
            let u = p.vector("u", u)?;
            let v = p.vector("v", v)?;
            let r = realize_rank_one(&u, &v, quad)?;
            (to_value(&r), r.realization.theta.clone())
        }
        RealizeCommand::M2 { t, theta } => {
            let t: WireMatrix = p.load("t", t)?;
            let theta = match theta {
                Some(s) => p.load("theta", s)?,
                None => BlaschkeProduct::monomial(2)?,
            };
            let r = realize_2x2(&t.0, &theta, quad, tol)?;
            (to_value(&r), r.theta.clone())
        }
        RealizeCommand::Normal { eigs, theta, alpha } => {
            let eigs = p.vector("eigs", eigs)?;
            let theta: BlaschkeProduct = p.load("theta", theta)?;
            let alpha = p.complex("alpha", alpha)?;
            let eigs: Vec<_> = eigs.iter().copied().collect();
            let r = realize_normal(&eigs, &theta, alpha, quad, tol)?;
            (to_value(&r), r.realization.theta.clone())
        }
        RealizeCommand::Inflate { symbol, b, n } => {
            let symbol: Symbol = p.load("symbol", symbol)?;
            let b: BlaschkeProduct = p.load("b", b)?;
            let n = n.unwrap_or_else(|| {
                symbol
                    .laurent
                    .keys()
                    .map(|m| m.unsigned_abs() as usize)
                    .max()
                    .unwrap_or(0)
                    + 1
            });
            let r = realize_inflation(&symbol, n, &b, quad)?;
            (to_value(&r), r.theta.clone())
        }
        RealizeCommand::Jordan { spec, zeros } => {
            let spec: JordanSpec = p.load("spec", spec)?;
            let zeros = match zeros {
                Some(z) => Some(p.load::<WireVector>("zeros", z)?.0),
                None => None,
            };
            let r = realize_jordan(&spec, zeros.as_deref(), quad)?;
            (to_value(&r), r.realization.theta.clone())
        }
    };
    Ok((EXIT_OK, body, space_quad(&theta, quad)?))
}

struct Invariants {
    order: usize,
    multiplicities: Option<Vec<usize>>,
    distances: Option<Vec<f64>>,
    zn: Option<bool>,
    errors: Vec<String>,
}

impl Invariants {
    fn of(b: &BlaschkeProduct, tol: &Tolerances) -> Self {
        let mut errors = Vec::new();
        let (multiplicities, distances) = match critical_point_clusters(b, tol) {
            Ok(c) => {
                let mut mult: Vec<usize> = c.iter().map(|p| p.1).collect();
                mult.sort_unstable();
                let mut dist = Vec::new();
                for (i, a) in c.iter().enumerate() {
                    for q in &c[i + 1..] {
                        dist.push(hyperbolic_distance(a.0, q.0));
                    }
                }
                dist.sort_by(f64::total_cmp);
                (Some(mult), Some(dist))
            }
            Err(e) => {
                errors.push(format!("critical points: {e}"));
                (None, None)
            }
        };
        let zn = match zn_equivalence_test(b, tol) {
            Ok(v) => Some(v),
            Err(e) => {
                errors.push(format!("z^n test: {e}"));
                None
            }
        };
        Self {
            order: b.order(),
            multiplicities,
            distances,
            zn,
            errors,
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "order": self.order,
            "critical_multiplicities": self.multiplicities,
            "critical_distances": self.distances,
            "zn_equivalent": self.zn,
            "errors": self.errors,
        })
    }
}

fn diagnostics(b1: &BlaschkeProduct, b2: &BlaschkeProduct, tol: &Tolerances) -> Value {
    let i1 = Invariants::of(b1, tol);
    let i2 = Invariants::of(b2, tol);
    let mut mismatched = Vec::new();
    if i1.order != i2.order {
        mismatched.push("order");
    }
    if i1.multiplicities != i2.multiplicities {
        mismatched.push("critical_multiplicities");
    }
    let distances_agree = match (&i1.distances, &i2.distances) {
        (Some(d1), Some(d2)) => {
            d1.len() == d2.len()
                && d1
                    .iter()
                    .zip(d2)
                    .all(|(a, b)| (a - b).abs() <= DISTANCE_MATCH * (1.0 + a.abs()))
        }
        _ => false,
    };
    if !distances_agree {
        mismatched.push("critical_distances");
    }
    if i1.zn != i2.zn {
        mismatched.push("zn_equivalent");
    }
    json!({
        "result": "no certificate found",
        "theta1": i1.to_json(),
        "theta2": i2.to_json(),
        "mismatched": mismatched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_precedence() {
        let d = Tolerances::default();
        assert_eq!(tolerances(None, None).unwrap(), d);
        assert_eq!(tolerances(None, Some("1e-5")).unwrap().decision, 1e-5);
        assert_eq!(tolerances(Some(1e-3), Some("1e-5")).unwrap().decision, 1e-3);
        assert!(tolerances(None, Some("abc")).is_err());
        assert!(tolerances(None, Some("-1")).is_err());
    }

    #[test]
    fn context_fields_are_added() {
        let v = with_context(json!({"a": 1}), &Tolerances::default(), Some(256));
        assert_eq!(v["a"], 1);
        assert_eq!(v["quad_points"], 256);
        assert_eq!(v["tolerances"]["decision"], 1e-7);
    }

    #[test]
    fn stdin_is_read_once() {
        let mut stdin: Box<dyn Read> = Box::new("[1, 2]".as_bytes());
        let mut p = Payloads {
            stdin: &mut stdin,
            stdin_used: false,
        };
        let z = p.complex("lambda", "-").unwrap();
        assert_eq!((z.re, z.im), (1.0, 2.0));
        assert!(matches!(p.complex("alpha", "-"), Err(Failure::Usage(_))));
    }

    #[test]
    fn real_numbers_are_accepted_as_complex() {
        let mut stdin: Box<dyn Read> = Box::new(std::io::empty());
        let mut p = Payloads {
            stdin: &mut stdin,
            stdin_used: false,
        };
        let z = p.complex("alpha", "-1").unwrap();
        assert_eq!((z.re, z.im), (-1.0, 0.0));
    }

    #[test]
    fn vectors_accept_both_forms() {
        let mut stdin: Box<dyn Read> = Box::new(std::io::empty());
        let mut p = Payloads {
            stdin: &mut stdin,
            stdin_used: false,
        };
        let a = p.vector("u", "[[1,0],[0,1]]").unwrap();
        let b = p.vector("u", r#"{"coeffs":[[1,0],[0,1]]}"#).unwrap();
        assert_eq!(a, b);
    }
}
