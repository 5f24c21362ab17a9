//! Constructors and decision procedures for unitary, self-adjoint and normal weighted
//! composition operators, and for adjoint-inverse pairs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{kernel_eval, normalizing_factor};
use crate::linalg::{self, CMatrix, CVector};
use crate::maps::{BallPoint, LinearFractionalMap, DEFAULT_SELF_MAP_SAMPLES};
use crate::sampling;
use crate::wco::{WcoSymbol, WeightSpec, MATRIX_TOL, SYMBOL_TOL};

/// Number of sample points (or pairs) used by the pointwise certificates.
pub const CERTIFICATE_SAMPLES: usize = 50;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Verdict tolerances: pointwise symbol identities and matrix-level checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub symbol: f64,
    pub matrix: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            symbol: SYMBOL_TOL,
            matrix: MATRIX_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Unitary,
    SelfAdjoint,
    NormalFixedPoint,
    NormalLfm,
    None,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Unitary => "unitary",
            Verdict::SelfAdjoint => "self_adjoint",
            Verdict::NormalFixedPoint => "normal_fixed_point",
            Verdict::NormalLfm => "normal_lfm",
            Verdict::None => "none",
        }
    }
}

/// Parameters certifying a verdict; which fields are set depends on the classifier.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Witness {
    pub lambda: Option<Complex64>,
    pub a: Option<CVector>,
    pub c: Option<CVector>,
    pub matrix: Option<CMatrix>,
    pub p: Option<CVector>,
    pub alpha: Option<Complex64>,
    /// Eigenvalues of phi'(p), similar to the witness matrix in the normal case.
    pub derivative_eigenvalues: Option<Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    /// The classifier that produced this result.
    pub test: Verdict,
    /// `test` when it fired, `Verdict::None` otherwise.
    pub verdict: Verdict,
    pub witness: Witness,
    /// Largest residual of the certifying identities that were evaluated.
    pub residual: f64,
    pub reason: Option<String>,
}

impl Classification {
    fn reject(test: Verdict, reason: impl Into<String>, residual: f64, witness: Witness) -> Self {
        Classification {
            test,
            verdict: Verdict::None,
            witness,
            residual,
            reason: Some(reason.into()),
        }
    }

    fn decide(test: Verdict, residual: f64, tol: f64, witness: Witness, what: &str) -> Self {
        if residual <= tol {
            Classification {
                test,
                verdict: test,
                witness,
                residual,
                reason: None,
            }
        } else {
            Self::reject(test, format!("{what} residual {residual:.3e} exceeds {tol:.1e}"), residual, witness)
        }
    }

    pub fn fired(&self) -> bool {
        self.verdict != Verdict::None
    }
}

/// lambda * W_{k_a, psi} with a = psi^-1(0).
pub fn make_unitary(psi: &LinearFractionalMap, gamma: f64, lambda: Complex64) -> Result<WcoSymbol> {
    if (lambda.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnimodular(lambda.norm()));
    }
    let inv = psi
        .automorphism_inverse(DEFAULT_SELF_MAP_SAMPLES)
        .ok_or(Error::NotAutomorphism)?;
    let a = BallPoint::new(inv.at_origin())?;
    WcoSymbol::new(gamma, WeightSpec::normalized_kernel(gamma, a, lambda), psi.clone())
}

/// The adjoint conj(lambda) W_{k_b, phi^-1}, b = phi(0), of lambda W_{k_a, phi}.
fn claimed_unitary_adjoint(
    w: &WcoSymbol,
    inv: &LinearFractionalMap,
    lambda: Complex64,
) -> Result<WcoSymbol> {
    let b = BallPoint::new(w.map().at_origin())?;
    WcoSymbol::new(
        w.gamma(),
        WeightSpec::normalized_kernel(w.gamma(), b, lambda.conj()),
        inv.clone(),
    )
}

/// Largest relative deviation of (P K_z)(w) from K_z(w) over sample pairs.
fn kernel_gram_residual(p: &WcoSymbol) -> Result<f64> {
    let pts = sampling::ball_points(p.dim(), 2 * CERTIFICATE_SAMPLES, 0.9);
    let mut worst = 0.0_f64;
    for pair in pts.chunks(2) {
        let want = kernel_eval(p.gamma(), &pair[0], &pair[1]);
        let got = p.apply_to_kernel(&pair[0], &pair[1])?;
        worst = worst.max((got - want).norm() / want.norm());
    }
    Ok(worst)
}

pub fn classify_unitary(w: &WcoSymbol, tol: &Tolerances) -> Classification {
    let test = Verdict::Unitary;
    let mut witness = Witness::default();
    let Some(inv) = w.map().automorphism_inverse(DEFAULT_SELF_MAP_SAMPLES) else {
        return Classification::reject(test, "map is not an automorphism", f64::INFINITY, witness);
    };
    let a = inv.at_origin();
    let gamma = w.gamma();
    let f0 = match w.weight_at(&CVector::zeros(w.dim())) {
        Ok(v) => v,
        Err(e) => return Classification::reject(test, e.to_string(), f64::INFINITY, witness),
    };
    let lambda = f0 / normalizing_factor(gamma, &a);
    witness.lambda = Some(lambda);
    witness.a = Some(a.clone());
    let modulus = (lambda.norm() - 1.0).abs();
    if modulus > tol.symbol {
        return Classification::reject(test, format!("|lambda| = {} is not 1", lambda.norm()), modulus, witness);
    }
    let certify = || -> Result<f64> {
        let ak = BallPoint::new(a.clone())?;
        let candidate = WcoSymbol::new(gamma, WeightSpec::normalized_kernel(gamma, ak, lambda), w.map().clone())?;
        let weight_res = w.compare(&candidate, CERTIFICATE_SAMPLES).residual;
        let adj = claimed_unitary_adjoint(w, &inv, lambda)?;
        let id = WcoSymbol::identity(gamma, w.dim())?;
        let left = adj.product(w)?;
        let right = w.product(&adj)?;
        let prod_res = left
            .compare(&id, CERTIFICATE_SAMPLES)
            .residual
            .max(right.compare(&id, CERTIFICATE_SAMPLES).residual);
        let gram_res = kernel_gram_residual(&left)?;
        Ok(modulus.max(weight_res).max(prod_res).max(gram_res))
    };
    match certify() {
        Ok(r) => Classification::decide(test, r, tol.symbol, witness, "unitary certificate"),
        Err(e) => Classification::reject(test, e.to_string(), f64::INFINITY, witness),
    }
}

/// Result of [`check_adjoint_inverse_pair`].
#[derive(Debug, Clone, PartialEq)]
pub struct PairCheck {
    pub is_pair: bool,
    pub lambda: Option<Complex64>,
    pub a: Option<CVector>,
    pub residual: f64,
    pub reason: Option<String>,
}

/// Whether W1 W2* = I: both symbols share an automorphism phi, with f = lambda k_a and
/// g = (1 / conj(lambda)) k_a for a = phi^-1(0).
pub fn check_adjoint_inverse_pair(w1: &WcoSymbol, w2: &WcoSymbol, tol: &Tolerances) -> PairCheck {
    let mut out = PairCheck {
        is_pair: false,
        lambda: None,
        a: None,
        residual: f64::INFINITY,
        reason: None,
    };
    if w1.gamma() != w2.gamma() {
        out.reason = Some(Error::GammaMismatch(w1.gamma(), w2.gamma()).to_string());
        return out;
    }
    let map_res = w1.map().projective_distance(w2.map());
    if map_res > tol.symbol {
        out.residual = map_res;
        out.reason = Some("the two maps differ".into());
        return out;
    }
    let Some(inv) = w1.map().automorphism_inverse(DEFAULT_SELF_MAP_SAMPLES) else {
        out.reason = Some("map is not an automorphism".into());
        return out;
    };
    let gamma = w1.gamma();
    let a = inv.at_origin();
    let norm_a = normalizing_factor(gamma, &a);
    let run = || -> Result<(Complex64, f64)> {
        let lambda = w1.weight_at(&CVector::zeros(w1.dim()))? / norm_a;
        if lambda.norm() == 0.0 {
            return Err(Error::ZeroConstant);
        }
        let ak = BallPoint::new(a.clone())?;
        let map = w1.map().clone();
        let f_claim = WcoSymbol::new_trusted(gamma, WeightSpec::normalized_kernel(gamma, ak.clone(), lambda), map.clone())?;
        let g_claim = WcoSymbol::new_trusted(gamma, WeightSpec::normalized_kernel(gamma, ak, ONE / lambda.conj()), map)?;
        let r_f = w1.compare(&f_claim, CERTIFICATE_SAMPLES).residual;
        let r_g = w2.compare(&g_claim, CERTIFICATE_SAMPLES).residual;
        // W2* = (1 / lambda) W_{k_b, phi^-1}
        let b = BallPoint::new(w1.map().at_origin())?;
        let adj2 = WcoSymbol::new(gamma, WeightSpec::normalized_kernel(gamma, b, ONE / lambda), inv.clone())?;
        let prod = w1.product(&adj2)?;
        let r_id = prod.compare(&WcoSymbol::identity(gamma, w1.dim())?, CERTIFICATE_SAMPLES).residual;
        Ok((lambda, r_f.max(r_g).max(r_id).max(map_res)))
    };
    out.a = Some(a.clone());
    match run() {
        Ok((lambda, r)) => {
            out.lambda = Some(lambda);
            out.residual = r;
            out.is_pair = r <= tol.symbol;
            if !out.is_pair {
                out.reason = Some(format!("pair certificate residual {r:.3e} exceeds {:.1e}", tol.symbol));
            }
        }
        Err(e) => out.reason = Some(e.to_string()),
    }
    out
}

/// W_{alpha K_c, phi} with phi(z) = (c + Az) / (1 - <z, c>), A Hermitian and alpha real.
pub fn make_self_adjoint(c: &BallPoint, a: &CMatrix, alpha: Complex64, gamma: f64) -> Result<WcoSymbol> {
    let defect = linalg::hermitian_defect(a);
    if defect > 1e-12 {
        return Err(Error::NotHermitian(defect));
    }
    if alpha.im.abs() > 1e-12 * alpha.norm().max(1.0) {
        return Err(Error::NotReal(alpha.im));
    }
    let map = LinearFractionalMap::new(a.clone(), c.coords().clone(), -c.coords(), ONE)?;
    WcoSymbol::new(gamma, WeightSpec::kernel(Complex64::from(alpha.re), c.clone()), map)
}

pub fn classify_self_adjoint(w: &WcoSymbol, tol: &Tolerances) -> Classification {
    let test = Verdict::SelfAdjoint;
    let map = w.map();
    let mut witness = Witness {
        matrix: Some(map.a().clone()),
        c: Some(map.b().clone()),
        ..Witness::default()
    };
    let herm = linalg::hermitian_defect(map.a());
    if herm > tol.symbol {
        return Classification::reject(test, "matrix part of the map is not Hermitian", herm, witness);
    }
    let shape = (map.c() + map.b()).norm();
    if shape > tol.symbol {
        return Classification::reject(test, "map is not of the form (c + Az) / (1 - <z, c>)", shape, witness);
    }
    let Some((alpha, center)) = w.weight().as_kernel() else {
        return Classification::reject(test, "weight is not a single scaled kernel", f64::INFINITY, witness);
    };
    witness.alpha = Some(alpha);
    let off = (&center - map.b()).norm();
    if off > tol.symbol {
        return Classification::reject(test, "weight kernel is not centered at phi(0)", off, witness);
    }
    let imag = alpha.im.abs() / alpha.norm().max(1.0);
    if imag > tol.symbol {
        return Classification::reject(test, "alpha is not real", imag, witness);
    }
    match w.adjoint_symbol() {
        Ok(adj) => {
            let r = adj.compare(w, CERTIFICATE_SAMPLES).residual.max(herm).max(shape).max(off).max(imag);
            Classification::decide(test, r, tol.symbol, witness, "self-adjoint certificate")
        }
        Err(e) => Classification::reject(test, e.to_string(), f64::INFINITY, witness),
    }
}

/// W_{f, phi} with phi = phi_p o A o phi_p and f = alpha k_p / (k_p o phi), stored as the
/// equivalent kernel weight (alpha / conj(K_{phi(0)}(p))) K_{sigma(0)}.
pub fn make_normal(p: &BallPoint, a: &CMatrix, alpha: Complex64, gamma: f64) -> Result<WcoSymbol> {
    let defect = linalg::normality_defect(a);
    if defect > 1e-10 {
        return Err(Error::NotNormal(defect));
    }
    let norm = linalg::operator_norm(a);
    if norm > 1.0 + 1e-12 {
        return Err(Error::NotContraction(norm));
    }
    if alpha.norm() == 0.0 {
        return Err(Error::ZeroConstant);
    }
    let phi_p = LinearFractionalMap::moebius_involution(p);
    let lin = LinearFractionalMap::linear(a.clone())?;
    let map = phi_p.compose(&lin)?.compose(&phi_p)?;
    let sigma0 = map.adjoint()?.at_origin();
    let scale = alpha / kernel_eval(gamma, &map.at_origin(), p.coords()).conj();
    WcoSymbol::new(gamma, WeightSpec::kernel(scale, BallPoint::new(sigma0)?), map)
}

fn is_constant_map(map: &LinearFractionalMap, tol: f64) -> bool {
    // (Az + B) / (<z, C> + 1) is constant exactly when A = B C*.
    linalg::max_abs(&(map.a() - map.b() * map.c().adjoint())) <= tol
}

pub fn classify_normal_fixed_point(w: &WcoSymbol, tol: &Tolerances) -> Classification {
    let test = Verdict::NormalFixedPoint;
    let mut witness = Witness::default();
    let map = w.map();
    if is_constant_map(map, tol.symbol) {
        return Classification::reject(test, "map is constant", f64::INFINITY, witness);
    }
    let Some(p) = map.fixed_point_in_ball() else {
        return Classification::reject(test, "no interior fixed point", f64::INFINITY, witness);
    };
    witness.p = Some(p.coords().clone());
    let phi_p = LinearFractionalMap::moebius_involution(&p);
    let conj = match phi_p.compose(map).and_then(|m| m.compose(&phi_p)) {
        Ok(m) => m,
        Err(e) => return Classification::reject(test, e.to_string(), f64::INFINITY, witness),
    };
    let a = conj.a().clone();
    witness.matrix = Some(a.clone());
    if let Ok(j) = map.jacobian_at(p.coords()) {
        witness.derivative_eigenvalues = linalg::eigenvalues(&j).ok();
    }
    let linear = linalg::max_abs_vec(conj.b()).max(linalg::max_abs_vec(conj.c()));
    if linear > tol.symbol {
        return Classification::reject(test, "conjugated map phi_p o phi o phi_p is not linear", linear, witness);
    }
    let normal = linalg::normality_defect(&a);
    if normal > tol.symbol {
        return Classification::reject(test, "A is not normal", normal, witness);
    }
    let gamma = w.gamma();
    let alpha = match w.weight_at(p.coords()) {
        Ok(v) => v,
        Err(e) => return Classification::reject(test, e.to_string(), f64::INFINITY, witness),
    };
    witness.alpha = Some(alpha);
    if alpha.norm() == 0.0 {
        return Classification::reject(test, "weight vanishes at the fixed point", f64::INFINITY, witness);
    }
    let weight_res = || -> Result<f64> {
        let mut worst = 0.0_f64;
        for z in sampling::ball_points(w.dim(), CERTIFICATE_SAMPLES, 0.9) {
            let want = alpha * kernel_eval(gamma, p.coords(), &z) / kernel_eval(gamma, p.coords(), &map.apply(&z)?);
            let got = w.weight_at(&z)?;
            worst = worst.max((got - want).norm() / want.norm());
        }
        Ok(worst)
    };
    match weight_res() {
        Ok(r) => Classification::decide(test, r.max(linear).max(normal), tol.symbol, witness, "weight"),
        Err(e) => Classification::reject(test, e.to_string(), f64::INFINITY, witness),
    }
}

/// Pointwise residual between the symbols of W* W and W W*.
pub fn normality_residual(w: &WcoSymbol) -> Result<f64> {
    let adj = w.adjoint_symbol()?;
    let left = adj.product(w)?;
    let right = w.product(&adj)?;
    Ok(left.compare(&right, CERTIFICATE_SAMPLES).residual)
}

pub fn classify_normal_lfm(w: &WcoSymbol, tol: &Tolerances) -> Classification {
    let test = Verdict::NormalLfm;
    let mut witness = Witness::default();
    let map = w.map();
    let sigma = match map.adjoint() {
        Ok(s) => s,
        Err(e) => return Classification::reject(test, e.to_string(), f64::INFINITY, witness),
    };
    let s0 = sigma.at_origin();
    let kernel_form = w
        .weight()
        .as_kernel()
        .filter(|(alpha, c)| alpha.norm() > 0.0 && (c - &s0).norm() <= tol.symbol);
    let Some((alpha, _)) = kernel_form else {
        return Classification::reject(test, "weight not K_{sigma(0)}-type", f64::INFINITY, witness);
    };
    witness.alpha = Some(alpha);
    witness.c = Some(s0.clone());
    if is_constant_map(map, tol.symbol) {
        return Classification::reject(test, "map is constant", f64::INFINITY, witness);
    }
    let r_norm = (map.at_origin().norm() - s0.norm()).abs();
    let commute = match (map.compose(&sigma), sigma.compose(map)) {
        (Ok(x), Ok(y)) => x.projective_distance(&y),
        _ => f64::INFINITY,
    };
    if r_norm > tol.symbol {
        return Classification::reject(test, "|phi(0)| differs from |sigma(0)|", r_norm, witness);
    }
    if commute > tol.symbol {
        return Classification::reject(test, "phi and sigma do not commute", commute, witness);
    }
    match normality_residual(w) {
        Ok(r) => Classification::decide(test, r.max(r_norm).max(commute), tol.symbol, witness, "normality"),
        Err(e) => Classification::reject(test, e.to_string(), f64::INFINITY, witness),
    }
}

/// Parabolic map ((2 - t) z + t) / (-t z + 2 + t) with weight K_{sigma(0)}.
pub fn make_parabolic_1d(t: Complex64, gamma: f64) -> Result<WcoSymbol> {
    let map = LinearFractionalMap::parabolic_1d(t)?;
    let s0 = BallPoint::new(map.adjoint()?.at_origin())?;
    WcoSymbol::new(gamma, WeightSpec::kernel(ONE, s0), map)
}

/// All four classifiers, in the order unitary, self-adjoint, normal (fixed point), normal (LFM).
pub fn classify_all(w: &WcoSymbol, tol: &Tolerances) -> Vec<Classification> {
    vec![
        classify_unitary(w, tol),
        classify_self_adjoint(w, tol),
        classify_normal_fixed_point(w, tol),
        classify_normal_lfm(w, tol),
    ]
}
