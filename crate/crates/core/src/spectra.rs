//! Exact eigen-systems of normal composition operators and of normal weighted composition
//! operators with an interior fixed point, cross-checked against compression eigenvalues.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::classify::{classify_normal_fixed_point, Tolerances, Verdict};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::maps::{BallPoint, LinearFractionalMap};
use crate::multiindex::{Basis, MultiIndex, SpaceParams};
use crate::series::{self, TruncatedSeries, CONSTANT_TERM_TOL};
use crate::wco::WcoSymbol;

/// Eigenvalues indexed by multi-index, with eigenfunctions as truncated series.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub params: SpaceParams,
    /// Eigenvalues lambda_j of the underlying linear map, in eigenvector order.
    pub base_eigenvalues: Vec<Complex64>,
    /// Matching eigenvectors u_j as columns.
    pub eigenvectors: CMatrix,
    /// Scalar factor multiplying every lambda^m (f(p), or 1 for composition operators).
    pub factor: Complex64,
    /// Position i corresponds to the i-th multi-index of the basis.
    pub eigenvalues: Vec<Complex64>,
    pub eigenfunctions: Vec<TruncatedSeries>,
    /// Known accumulation points of the spectrum (0 when some |lambda_j| < 1).
    pub limit_points: Vec<Complex64>,
}

impl EigenSystem {
    pub fn indices(&self) -> Result<Vec<MultiIndex>> {
        Ok(Basis::for_params(self.params)?.indices().to_vec())
    }
}

/// Eigenpairs of a normal matrix from its Schur form, ordered so that each eigenvector is
/// matched with the coordinate direction where it is largest (the identity order for diagonal
/// matrices).
fn normal_eigenpairs(a: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    let (q, t) = linalg::schur(a)?;
    let n = a.nrows();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut free: Vec<bool> = vec![true; n];
    for coord in 0..n {
        let mut best: Option<usize> = None;
        for j in (0..n).filter(|&j| free[j]) {
            if best.is_none_or(|b| q[(coord, j)].norm() > q[(coord, b)].norm() + 1e-12) {
                best = Some(j);
            }
        }
        let j = best.expect("one free column per coordinate");
        free[j] = false;
        order.push(j);
    }
    let lam = order.iter().map(|&j| t[(j, j)]).collect();
    let u = CMatrix::from_columns(&order.iter().map(|&j| q.column(j).into_owned()).collect::<Vec<_>>());
    Ok((lam, u))
}

fn monomial_eigenvalue(lam: &[Complex64], m: &MultiIndex) -> Complex64 {
    lam.iter()
        .zip(m.exponents())
        .map(|(l, e)| l.powu(*e))
        .product()
}

fn limit_points(lam: &[Complex64], factor: Complex64) -> Vec<Complex64> {
    if lam.iter().any(|l| l.norm() < 1.0 - 1e-12) {
        vec![Complex64::new(0.0, 0.0) * factor]
    } else {
        Vec::new()
    }
}

/// C_A for normal A with ||A|| <= 1: eigenfunctions f_m = prod_j <z, u_j>^(m_j) (unit norm),
/// eigenvalues lambda^m.
pub fn normal_linear_spectrum(a: &CMatrix, params: SpaceParams) -> Result<EigenSystem> {
    if a.nrows() != params.n || a.ncols() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            got: a.nrows(),
        });
    }
    let defect = linalg::normality_defect(a);
    if defect > 1e-10 {
        return Err(Error::NotNormal(defect));
    }
    let norm = linalg::operator_norm(a);
    if norm > 1.0 + 1e-12 {
        return Err(Error::NotContraction(norm));
    }
    let basis = Basis::for_params(params)?;
    let (lam, u) = normal_eigenpairs(a)?;
    // <z, u_j> = sum_k conj(u_jk) z_k
    let factors: Vec<TruncatedSeries> = (0..params.n)
        .map(|j| {
            let lin: Vec<Complex64> = u.column(j).iter().map(|x| x.conj()).collect();
            TruncatedSeries::affine(&basis, Complex64::new(0.0, 0.0), &lin)
        })
        .collect::<Result<_>>()?;
    let mut funcs: Vec<Option<TruncatedSeries>> = vec![None; basis.len()];
    series::for_each_power_product(&basis, &factors, |pos, prod| {
        let nrm = prod.norm();
        funcs[pos] = Some(prod.scale(Complex64::from(1.0 / nrm)));
        Ok(())
    })?;
    let eigenvalues = basis.indices().iter().map(|m| monomial_eigenvalue(&lam, m)).collect();
    let one = Complex64::new(1.0, 0.0);
    Ok(EigenSystem {
        params,
        limit_points: limit_points(&lam, one),
        base_eigenvalues: lam,
        eigenvectors: u,
        factor: one,
        eigenvalues,
        eigenfunctions: funcs.into_iter().map(|f| f.expect("every position visited")).collect(),
    })
}

/// Witness data of a normal symbol with an interior fixed point.
#[derive(Debug, Clone)]
pub struct NormalWitness {
    pub p: CVector,
    pub a: CMatrix,
    pub alpha: Complex64,
    pub derivative_eigenvalues: Vec<Complex64>,
    pub residual: f64,
}

/// Runs the fixed-point normality classifier and unpacks its witness.
pub fn normal_witness(w: &WcoSymbol, tol: &Tolerances) -> Result<NormalWitness> {
    let cl = classify_normal_fixed_point(w, tol);
    if cl.verdict != Verdict::NormalFixedPoint {
        return Err(Error::Unclassified(
            cl.reason.unwrap_or_else(|| "not normal with an interior fixed point".into()),
        ));
    }
    let wit = cl.witness;
    let missing = || Error::Unclassified("incomplete witness".into());
    Ok(NormalWitness {
        p: wit.p.ok_or_else(missing)?,
        a: wit.matrix.ok_or_else(missing)?,
        alpha: wit.alpha.ok_or_else(missing)?,
        derivative_eigenvalues: wit.derivative_eigenvalues.ok_or_else(missing)?,
        residual: cl.residual,
    })
}

/// W = alpha U_p C_A U_p: eigenvalues alpha lambda^m with eigenfunctions g_m = U_p f_m.
pub fn normal_wco_spectrum(w: &WcoSymbol, params: SpaceParams, tol: &Tolerances) -> Result<EigenSystem> {
    let wit = normal_witness(w, tol)?;
    let mut sys = normal_linear_spectrum(&wit.a, params)?;
    let basis = Basis::for_params(params)?;
    let p = BallPoint::new(wit.p.clone())?;
    let up = WcoSymbol::moebius_unitary(w.gamma(), p)?;
    let kp = up.weight_as_series(params)?;
    let phi_p = up.map();
    sys.eigenfunctions = sys
        .eigenfunctions
        .iter()
        .map(|f| {
            let composed = f.compose_fractional(phi_p.a(), phi_p.b(), phi_p.c(), phi_p.d(), CONSTANT_TERM_TOL)?;
            kp.rebase(&basis)?.mul(&composed)
        })
        .collect::<Result<_>>()?;
    for v in &mut sys.eigenvalues {
        *v *= wit.alpha;
    }
    sys.limit_points = limit_points(&sys.base_eigenvalues, wit.alpha);
    sys.factor = wit.alpha;
    Ok(sys)
}

/// Orders values by decreasing modulus, then increasing argument.
pub fn sort_spectrum(values: &mut [Complex64]) {
    values.sort_by(|a, b| match b.norm().total_cmp(&a.norm()) {
        Ordering::Equal => a.arg().total_cmp(&b.arg()),
        o => o,
    });
}

/// Eigenvalues of the compression, sorted by [`sort_spectrum`].
pub fn compression_eigenvalues(w: &WcoSymbol, params: SpaceParams) -> Result<Vec<Complex64>> {
    let m = w.compress(params)?;
    let mut ev = linalg::eigenvalues(&m)?;
    sort_spectrum(&mut ev);
    Ok(ev)
}

/// sup_{x in from} inf_{y in to} |x - y|.
pub fn directed_hausdorff(from: &[Complex64], to: &[Complex64]) -> f64 {
    from.iter()
        .map(|x| to.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

pub fn hausdorff_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// Greedy nearest matching of every value of `exact` (largest modulus first) to a distinct value
/// of `candidates`; returns the largest matched distance, or infinity when `candidates` runs out.
pub fn matching_distance(exact: &[Complex64], candidates: &[Complex64]) -> f64 {
    let mut order: Vec<Complex64> = exact.to_vec();
    sort_spectrum(&mut order);
    let mut used = vec![false; candidates.len()];
    let mut worst = 0.0_f64;
    for x in order {
        let best = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, d)) => {
                used[i] = true;
                worst = worst.max(d);
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

/// Exact part of a spectrum report.
#[derive(Debug, Clone)]
pub struct ExactSpectrum {
    pub p: CVector,
    pub alpha: Complex64,
    pub matrix_eigenvalues: Vec<Complex64>,
    pub derivative_eigenvalues: Vec<Complex64>,
    /// Matching distance between the eigenvalues of phi'(p) and of A.
    pub similarity_residual: f64,
    pub indices: Vec<MultiIndex>,
    pub eigenvalues: Vec<Complex64>,
    pub limit_points: Vec<Complex64>,
    /// Max over m of ||M v_m - mu_m v_m|| with v_m the orthonormal coordinates of g_m.
    pub eigen_residual: f64,
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub exact: Option<ExactSpectrum>,
    pub note: Option<String>,
    pub compression_eigenvalues: Vec<Complex64>,
    /// Hausdorff distance between the exact eigenvalues (|m| <= D) and the compression spectrum.
    pub hausdorff: Option<f64>,
    /// One-sided distance from the exact eigenvalues to the compression spectrum.
    pub exact_to_compression: Option<f64>,
    pub matching_distance: Option<f64>,
}

pub fn spectrum_report(w: &WcoSymbol, params: SpaceParams, tol: &Tolerances) -> Result<SpectrumReport> {
    let m = w.compress(params)?;
    let mut comp = linalg::eigenvalues(&m)?;
    sort_spectrum(&mut comp);
    let mut report = SpectrumReport {
        exact: None,
        note: None,
        compression_eigenvalues: comp,
        hausdorff: None,
        exact_to_compression: None,
        matching_distance: None,
    };
    let wit = match normal_witness(w, tol) {
        Ok(wit) => wit,
        Err(e) => {
            report.note = Some(format!("no exact spectrum available: {e}"));
            return Ok(report);
        }
    };
    let sys = normal_wco_spectrum(w, params, tol)?;
    let mut eigen_residual = 0.0_f64;
    for (g, mu) in sys.eigenfunctions.iter().zip(&sys.eigenvalues) {
        let v = g.orthonormal_coords();
        eigen_residual = eigen_residual.max((&m * &v - &v * *mu).norm());
    }
    let comp = &report.compression_eigenvalues;
    report.hausdorff = Some(hausdorff_distance(&sys.eigenvalues, comp));
    report.exact_to_compression = Some(directed_hausdorff(&sys.eigenvalues, comp));
    report.matching_distance = Some(matching_distance(&sys.eigenvalues, comp));
    report.exact = Some(ExactSpectrum {
        p: wit.p,
        alpha: wit.alpha,
        similarity_residual: matching_distance(&wit.derivative_eigenvalues, &sys.base_eigenvalues),
        matrix_eigenvalues: sys.base_eigenvalues.clone(),
        derivative_eigenvalues: wit.derivative_eigenvalues,
        indices: Basis::for_params(params)?.indices().to_vec(),
        eigenvalues: sys.eigenvalues,
        limit_points: sys.limit_points,
        eigen_residual,
    });
    Ok(report)
}

/// Eigenvalues of phi'(p) at an interior fixed point, if one exists.
pub fn derivative_eigenvalues_at_fixed_point(map: &LinearFractionalMap) -> Option<Vec<Complex64>> {
    let p = map.fixed_point_in_ball()?;
    linalg::eigenvalues(&map.jacobian_at(p.coords()).ok()?).ok()
}
