//! JSON job descriptions and the report pipeline behind the `wco-lab` binary and the C ABI.
//!
//! Complex numbers are `[re, im]`, vectors are lists of complex numbers and matrices are
//! row-major lists of rows.

use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::classify::{self, Classification, Tolerances, Verdict};
use crate::error::{Error, ErrorKind};
use crate::kernels;
use crate::linalg::{CMatrix, CVector};
use crate::maps::{BallPoint, LinearFractionalMap};
use crate::multiindex::{Basis, SpaceParams};
use crate::sampling;
use crate::series::TruncatedSeries;
use crate::spectra::{self, SpectrumReport};
use crate::wco::{self, KernelFactor, WcoSymbol, WeightSpec};

pub const DEFAULT_DEGREE_CAP: u32 = 15;
pub const DEFAULT_SAMPLES: usize = 100;

/// `[re, im]`.
pub type JsonComplex = [f64; 2];

#[derive(Debug, thiserror::Error)]
pub enum JobError {
    #[error("invalid job: {0}")]
    Parse(String),
    #[error(transparent)]
    Compute(#[from] Error),
}

impl JobError {
    /// 2 for malformed jobs, 3 for domain violations, 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Parse(_) => 2,
            JobError::Compute(e) => match e.kind() {
                ErrorKind::Domain => 3,
                ErrorKind::Numerical => 4,
            },
        }
    }
}

impl From<serde_json::Error> for JobError {
    fn from(e: serde_json::Error) -> Self {
        JobError::Parse(e.to_string())
    }
}

pub type JobResult<T> = std::result::Result<T, JobError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Classify,
    Adjoint,
    Compose,
    Verify,
    Spectrum,
    Compress,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Adjoint => "adjoint",
            Command::Compose => "compose",
            Command::Verify => "verify",
            Command::Spectrum => "spectrum",
            Command::Compress => "compress",
        }
    }
}

impl FromStr for Command {
    type Err = JobError;

    fn from_str(s: &str) -> JobResult<Self> {
        serde_json::from_value(Value::String(s.to_owned()))
            .map_err(|_| JobError::Parse(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub n: usize,
    pub gamma: f64,
    #[serde(default = "default_degree_cap")]
    pub degree_cap: u32,
}

fn default_degree_cap() -> u32 {
    DEFAULT_DEGREE_CAP
}

/// phi(z) = (A z + B) / (<z, C> + d).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapJson {
    pub a: Vec<Vec<JsonComplex>>,
    pub b: Vec<JsonComplex>,
    pub c: Vec<JsonComplex>,
    #[serde(default = "one_json")]
    pub d: JsonComplex,
}

fn one_json() -> JsonComplex {
    [1.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorJson {
    pub u: Vec<JsonComplex>,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightJson {
    Constant(JsonComplex),
    Kernel {
        alpha: JsonComplex,
        c: Vec<JsonComplex>,
    },
    KernelProduct {
        scale: JsonComplex,
        factors: Vec<FactorJson>,
    },
    /// Taylor coefficients in graded order.
    Series(Vec<JsonComplex>),
    /// lambda k_a with a = phi^-1(0); the map must be an automorphism.
    NormalizedKernelAtInverseZero(JsonComplex),
    /// alpha K_{sigma(0)} with sigma the adjoint map.
    KernelAtSigmaZero(JsonComplex),
}

/// Exactly one of `map`, `moebius`, `linear`, `parabolic1d`; weight defaults to 1.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moebius: Option<Vec<JsonComplex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<Vec<Vec<JsonComplex>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parabolic1d: Option<JsonComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightJson>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub space: SpaceSpec,
    pub operator: OperatorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_operator: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl JobSpec {
    pub fn from_json(text: &str) -> JobResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn params(&self) -> JobResult<SpaceParams> {
        Ok(SpaceParams::new(self.space.n, self.space.gamma, self.space.degree_cap)?)
    }

    pub fn tolerances(&self) -> JobResult<Tolerances> {
        let d = Tolerances::default();
        let t = Tolerances {
            symbol: self.tolerances.symbol.unwrap_or(d.symbol),
            matrix: self.tolerances.matrix.unwrap_or(d.matrix),
        };
        if !(t.symbol > 0.0 && t.matrix > 0.0) {
            return Err(JobError::Parse("tolerances must be positive".into()));
        }
        Ok(t)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(DEFAULT_SAMPLES).max(1)
    }

    pub fn symbol(&self) -> JobResult<WcoSymbol> {
        build_symbol(&self.operator, self.params()?)
    }

    pub fn second_symbol(&self) -> JobResult<Option<WcoSymbol>> {
        let params = self.params()?;
        self.second_operator.as_ref().map(|op| build_symbol(op, params)).transpose()
    }
}

fn cx(v: JsonComplex) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn to_json_c(z: Complex64) -> JsonComplex {
    [z.re, z.im]
}

fn vector(v: &[JsonComplex], n: usize) -> JobResult<CVector> {
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() }.into());
    }
    Ok(CVector::from_iterator(n, v.iter().map(|x| cx(*x))))
}

fn matrix(rows: &[Vec<JsonComplex>], n: usize) -> JobResult<CMatrix> {
    if rows.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rows.len() }.into());
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.len() }.into());
    }
    Ok(CMatrix::from_fn(n, n, |i, j| cx(rows[i][j])))
}

fn vec_json(v: &CVector) -> Vec<JsonComplex> {
    v.iter().map(|z| to_json_c(*z)).collect()
}

fn mat_json(m: &CMatrix) -> Vec<Vec<JsonComplex>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| to_json_c(m[(i, j)])).collect())
        .collect()
}

fn list_json(v: &[Complex64]) -> Vec<JsonComplex> {
    v.iter().map(|z| to_json_c(*z)).collect()
}

pub fn build_map(op: &OperatorSpec, n: usize) -> JobResult<LinearFractionalMap> {
    let given = [
        op.map.is_some(),
        op.moebius.is_some(),
        op.linear.is_some(),
        op.parabolic1d.is_some(),
    ];
    if given.iter().filter(|g| **g).count() != 1 {
        return Err(JobError::Parse(
            "operator needs exactly one of `map`, `moebius`, `linear`, `parabolic1d`".into(),
        ));
    }
    if let Some(m) = &op.map {
        return Ok(LinearFractionalMap::new(matrix(&m.a, n)?, vector(&m.b, n)?, vector(&m.c, n)?, cx(m.d))?);
    }
    if let Some(p) = &op.moebius {
        return Ok(LinearFractionalMap::moebius_involution(&BallPoint::new(vector(p, n)?)?));
    }
    if let Some(a) = &op.linear {
        return Ok(LinearFractionalMap::linear(matrix(a, n)?)?);
    }
    let t = op.parabolic1d.expect("one variant is present");
    if n != 1 {
        return Err(Error::RequiresOneDimension.into());
    }
    Ok(LinearFractionalMap::parabolic_1d(cx(t))?)
}

pub fn build_symbol(op: &OperatorSpec, params: SpaceParams) -> JobResult<WcoSymbol> {
    let (n, gamma) = (params.n, params.gamma);
    let map = build_map(op, n)?;
    let weight = match op.weight.clone().unwrap_or(WeightJson::Constant([1.0, 0.0])) {
        WeightJson::Constant(a) => WeightSpec::constant(n, cx(a)),
        WeightJson::Kernel { alpha, c } => WeightSpec::kernel(cx(alpha), BallPoint::new(vector(&c, n)?)?),
        WeightJson::KernelProduct { scale, factors } => WeightSpec::KernelProduct {
            scale: cx(scale),
            factors: factors
                .iter()
                .map(|f| {
                    Ok(KernelFactor {
                        u: vector(&f.u, n)?,
                        exponent: f.exponent,
                    })
                })
                .collect::<JobResult<_>>()?,
        }
        .simplify(),
        WeightJson::Series(coeffs) => {
            let basis = Basis::for_params(params)?;
            let c: Vec<Complex64> = coeffs.iter().map(|x| cx(*x)).collect();
            WeightSpec::Series(TruncatedSeries::from_coeffs(&basis, &c)?)
        }
        WeightJson::NormalizedKernelAtInverseZero(lambda) => {
            return Ok(classify::make_unitary(&map, gamma, cx(lambda))?);
        }
        WeightJson::KernelAtSigmaZero(alpha) => {
            let s0 = map.adjoint()?.at_origin();
            WeightSpec::kernel(cx(alpha), BallPoint::new(s0)?)
        }
    };
    Ok(WcoSymbol::new(gamma, weight, map)?)
}

/// The job form of a symbol: explicit map coefficients and an explicit weight.
pub fn operator_spec(w: &WcoSymbol) -> OperatorSpec {
    let m = w.map();
    let weight = match w.weight() {
        WeightSpec::Kernel { alpha, c } => WeightJson::Kernel {
            alpha: to_json_c(*alpha),
            c: vec_json(c.coords()),
        },
        WeightSpec::KernelProduct { scale, factors } => WeightJson::KernelProduct {
            scale: to_json_c(*scale),
            factors: factors
                .iter()
                .map(|f| FactorJson {
                    u: vec_json(&f.u),
                    exponent: f.exponent,
                })
                .collect(),
        },
        WeightSpec::Series(s) => WeightJson::Series(list_json(s.coeffs())),
    };
    OperatorSpec {
        map: Some(MapJson {
            a: mat_json(m.a()),
            b: vec_json(m.b()),
            c: vec_json(m.c()),
            d: to_json_c(m.d()),
        }),
        weight: Some(weight),
        ..OperatorSpec::default()
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

/// Non-finite residuals become JSON null.
fn num(x: f64) -> Value {
    to_value(&x)
}

fn classification_json(c: &Classification) -> Value {
    let w = &c.witness;
    let mut wit = Map::new();
    if let Some(l) = w.lambda {
        wit.insert("lambda".into(), to_value(&to_json_c(l)));
    }
    if let Some(a) = &w.a {
        wit.insert("a".into(), to_value(&vec_json(a)));
    }
    if let Some(cc) = &w.c {
        wit.insert("c".into(), to_value(&vec_json(cc)));
    }
    if let Some(m) = &w.matrix {
        wit.insert("matrix".into(), to_value(&mat_json(m)));
    }
    if let Some(p) = &w.p {
        wit.insert("p".into(), to_value(&vec_json(p)));
    }
    if let Some(a) = w.alpha {
        wit.insert("alpha".into(), to_value(&to_json_c(a)));
    }
    if let Some(ev) = &w.derivative_eigenvalues {
        wit.insert("derivative_eigenvalues".into(), to_value(&list_json(ev)));
    }
    json!({
        "test": c.test.as_str(),
        "verdict": c.verdict.as_str(),
        "fired": c.fired(),
        "residual": num(c.residual),
        "reason": c.reason,
        "witness": Value::Object(wit),
    })
}

fn identity_json(w: &WcoSymbol, samples: usize, tol: &Tolerances) -> JobResult<Value> {
    let cmp = w.compare(&WcoSymbol::identity(w.gamma(), w.dim())?, samples);
    Ok(json!({ "is_identity": cmp.residual <= tol.symbol, "residual": num(cmp.residual) }))
}

fn run_classify(job: &JobSpec, tol: &Tolerances) -> JobResult<Value> {
    let w = job.symbol()?;
    let all = classify::classify_all(&w, tol);
    let verdict = |v: Verdict| all.iter().any(|c| c.verdict == v);
    let mut out = json!({
        "operator": to_value(&operator_spec(&w)),
        "classifications": all.iter().map(classification_json).collect::<Vec<_>>(),
        "verdicts": {
            "unitary": verdict(Verdict::Unitary),
            "self_adjoint": verdict(Verdict::SelfAdjoint),
            "normal_fixed_point": verdict(Verdict::NormalFixedPoint),
            "normal_lfm": verdict(Verdict::NormalLfm),
        },
        "identity": identity_json(&w, job.samples(), tol)?,
    });
    if let Some(w2) = job.second_symbol()? {
        let pair = classify::check_adjoint_inverse_pair(&w, &w2, tol);
        out["adjoint_inverse_pair"] = json!({
            "is_pair": pair.is_pair,
            "lambda": pair.lambda.map(to_json_c),
            "a": pair.a.as_ref().map(vec_json),
            "residual": num(pair.residual),
            "reason": pair.reason,
        });
    }
    Ok(out)
}

fn run_adjoint(job: &JobSpec) -> JobResult<Value> {
    let w = job.symbol()?;
    let adj = w.adjoint_symbol()?;
    let duality = wco::adjoint_duality_residual(&w, job.samples())?;
    Ok(json!({
        "operator": to_value(&operator_spec(&w)),
        "adjoint": to_value(&operator_spec(&adj)),
        "duality_residual": num(duality),
    }))
}

fn run_compose(job: &JobSpec, tol: &Tolerances) -> JobResult<Value> {
    let w1 = job.symbol()?;
    let w2 = job
        .second_symbol()?
        .ok_or_else(|| JobError::Parse("`compose` needs `second_operator`".into()))?;
    let prod = w1.product(&w2)?;
    Ok(json!({
        "product": to_value(&operator_spec(&prod)),
        "product_law_residual": num(wco::product_law_residual(&w1, &w2, job.samples())?),
        "identity": identity_json(&prod, job.samples(), tol)?,
    }))
}

fn check_entry(name: &str, res: crate::error::Result<f64>, tol: f64) -> Value {
    match res {
        Ok(r) => json!({ "name": name, "residual": num(r), "passed": r <= tol, "skipped": Value::Null }),
        Err(e) => json!({ "name": name, "residual": Value::Null, "passed": Value::Null, "skipped": e.to_string() }),
    }
}

fn run_verify(job: &JobSpec, tol: &Tolerances) -> JobResult<Value> {
    let w = job.symbol()?;
    let w2 = job.second_symbol()?.unwrap_or_else(|| w.clone());
    let gamma = w.gamma();
    let map = w.map();
    let mut rng = sampling::rng_from_seed(job.seed);
    let a = sampling::random_ball_point(&mut rng, w.dim(), 0.9);
    let transform = kernels::check_kernel_transform(map, gamma, &a);
    let checks = vec![
        check_entry("reciprocal_identity", kernels::check_reciprocal_identity(map, gamma), tol.symbol),
        check_entry("automorphism_identity", kernels::check_automorphism_identity(map), tol.symbol),
        check_entry("kernel_transform_phi", transform.clone().map(|r| r.0), tol.symbol),
        check_entry("kernel_transform_sigma", transform.map(|r| r.1), tol.symbol),
        check_entry("adjoint_duality", wco::adjoint_duality_residual(&w, job.samples()), tol.symbol),
        check_entry("product_law", wco::product_law_residual(&w, &w2, job.samples()), tol.symbol),
    ];
    let all_passed = checks.iter().all(|c| c["passed"] != Value::Bool(false));
    Ok(json!({
        "operator": to_value(&operator_spec(&w)),
        "transform_point": vec_json(a.coords()),
        "checks": checks,
        "all_passed": all_passed,
    }))
}

fn spectrum_json(rep: &SpectrumReport) -> Value {
    let exact = rep.exact.as_ref().map(|e| {
        json!({
            "p": vec_json(&e.p),
            "alpha": to_json_c(e.alpha),
            "matrix_eigenvalues": list_json(&e.matrix_eigenvalues),
            "derivative_eigenvalues": list_json(&e.derivative_eigenvalues),
            "similarity_residual": num(e.similarity_residual),
            "indices": e.indices.iter().map(|m| m.exponents().to_vec()).collect::<Vec<_>>(),
            "eigenvalues": list_json(&e.eigenvalues),
            "limit_points": list_json(&e.limit_points),
            "eigen_residual": num(e.eigen_residual),
        })
    });
    json!({
        "exact": exact,
        "note": rep.note,
        "compression_eigenvalues": list_json(&rep.compression_eigenvalues),
        "hausdorff": rep.hausdorff.map(num),
        "exact_to_compression": rep.exact_to_compression.map(num),
        "matching_distance": rep.matching_distance.map(num),
    })
}

fn run_spectrum(job: &JobSpec, tol: &Tolerances) -> JobResult<Value> {
    let w = job.symbol()?;
    let rep = spectra::spectrum_report(&w, job.params()?, tol)?;
    Ok(spectrum_json(&rep))
}

fn run_compress(job: &JobSpec) -> JobResult<Value> {
    let w = job.symbol()?;
    let params = job.params()?;
    let m = w.compress(params)?;
    let basis = Basis::for_params(params)?;
    Ok(json!({
        "indices": basis.indices().iter().map(|m| m.exponents().to_vec()).collect::<Vec<_>>(),
        "size": m.nrows(),
        "matrix": mat_json(&m),
    }))
}

/// Runs `command` (or the job's own command) and returns the report. Everything except the
/// `timing` field is a deterministic function of the job.
pub fn run(job: &JobSpec, command: Option<Command>) -> JobResult<Value> {
    let command = command
        .or(job.command)
        .ok_or_else(|| JobError::Parse("no command given".into()))?;
    let start = Instant::now();
    let tol = job.tolerances()?;
    let result = match command {
        Command::Classify => run_classify(job, &tol)?,
        Command::Adjoint => run_adjoint(job)?,
        Command::Compose => run_compose(job, &tol)?,
        Command::Verify => run_verify(job, &tol)?,
        Command::Spectrum => run_spectrum(job, &tol)?,
        Command::Compress => run_compress(job)?,
    };
    Ok(json!({
        "command": command.as_str(),
        "space": to_value(&job.space),
        "tolerances": { "symbol": tol.symbol, "matrix": tol.matrix },
        "seed": job.seed,
        "samples": job.samples(),
        "result": result,
        "timing": { "elapsed_seconds": start.elapsed().as_secs_f64() },
    }))
}

/// Parses, runs and pretty-prints a job.
pub fn run_json(text: &str, command: Option<Command>) -> JobResult<String> {
    let job = JobSpec::from_json(text)?;
    let report = run(&job, command)?;
    Ok(serde_json::to_string_pretty(&report).expect("report serializes"))
}

/// Report with the `timing` field removed, for byte-wise comparisons.
pub fn strip_timing(mut report: Value) -> Value {
    if let Value::Object(m) = &mut report {
        m.remove("timing");
    }
    report
}
