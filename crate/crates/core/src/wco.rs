//! Weighted composition operators W_{f,phi} h = f * (h o phi).
//!
//! Symbols are kept in closed form whenever the weight is a product of kernel powers; only
//! series weights go through truncated arithmetic.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{kernel_eval, normalizing_factor, KernelVector};
use crate::linalg::{CMatrix, CVector};
use crate::maps::{inner, BallPoint, LinearFractionalMap, DEFAULT_SELF_MAP_SAMPLES};
use crate::multiindex::{Basis, SpaceParams};
use crate::sampling;
use crate::series::{self, TruncatedSeries, CONSTANT_TERM_TOL};

/// Pointwise tolerance for symbol equality.
pub const SYMBOL_TOL: f64 = 1e-9;
/// Entrywise tolerance for comparing compressions.
pub const MATRIX_TOL: f64 = 1e-8;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const MERGE_TOL: f64 = 1e-11;

/// One factor (1 - <z, u>)^(-gamma * exponent) of a kernel-product weight.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelFactor {
    pub u: CVector,
    pub exponent: f64,
}

impl KernelFactor {
    fn eval(&self, gamma: f64, z: &CVector) -> Complex64 {
        (ONE - inner(z, &self.u)).powf(-gamma * self.exponent)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// alpha * K^gamma_c.
    Kernel { alpha: Complex64, c: BallPoint },
    /// scale * prod_i (1 - <z, u_i>)^(-gamma e_i). Closes kernel weights under f * (g o phi).
    KernelProduct {
        scale: Complex64,
        factors: Vec<KernelFactor>,
    },
    /// A truncated power series.
    Series(TruncatedSeries),
}

impl WeightSpec {
    pub fn constant(n: usize, alpha: Complex64) -> Self {
        WeightSpec::Kernel {
            alpha,
            c: BallPoint::origin(n),
        }
    }

    pub fn kernel(alpha: Complex64, c: BallPoint) -> Self {
        WeightSpec::Kernel { alpha, c }
    }

    /// lambda * k^gamma_a.
    pub fn normalized_kernel(gamma: f64, a: BallPoint, lambda: Complex64) -> Self {
        let s = normalizing_factor(gamma, a.coords());
        WeightSpec::Kernel {
            alpha: lambda * s,
            c: a,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            WeightSpec::Kernel { c, .. } => Some(c.dim()),
            WeightSpec::KernelProduct { factors, .. } => factors.first().map(|f| f.u.len()),
            WeightSpec::Series(s) => Some(s.params().n),
        }
    }

    /// Value of the weight at z. Series weights are evaluated as their truncation.
    pub fn eval(&self, gamma: f64, z: &CVector) -> Result<Complex64> {
        match self {
            WeightSpec::Kernel { alpha, c } => {
                check_len(c.dim(), z.len())?;
                Ok(alpha * kernel_eval(gamma, c.coords(), z))
            }
            WeightSpec::KernelProduct { scale, factors } => {
                let mut v = *scale;
                for f in factors {
                    check_len(f.u.len(), z.len())?;
                    v *= f.eval(gamma, z);
                }
                Ok(v)
            }
            WeightSpec::Series(s) => s.eval(z.as_slice()),
        }
    }

    /// (alpha, c) when the weight is exactly alpha * K_c.
    pub fn as_kernel(&self) -> Option<(Complex64, CVector)> {
        match self.clone().simplify() {
            WeightSpec::Kernel { alpha, c } => Some((alpha, c.into_inner())),
            _ => None,
        }
    }

    fn product_form(&self) -> Option<(Complex64, Vec<KernelFactor>)> {
        match self {
            WeightSpec::Kernel { alpha, c } => Some((
                *alpha,
                vec![KernelFactor {
                    u: c.coords().clone(),
                    exponent: 1.0,
                }],
            )),
            WeightSpec::KernelProduct { scale, factors } => Some((*scale, factors.clone())),
            WeightSpec::Series(_) => None,
        }
    }

    /// Merges repeated factors, drops trivial ones and collapses to `Kernel` where possible.
    pub fn simplify(self) -> Self {
        let (scale, factors) = match self {
            WeightSpec::Series(_) => return self,
            WeightSpec::Kernel { .. } => return self,
            WeightSpec::KernelProduct { scale, factors } => (scale, factors),
        };
        let n = factors.first().map(|f| f.u.len());
        let mut merged: Vec<KernelFactor> = Vec::new();
        for f in factors {
            match merged.iter_mut().find(|g| (&g.u - &f.u).norm() <= MERGE_TOL) {
                Some(g) => g.exponent += f.exponent,
                None => merged.push(f),
            }
        }
        merged.retain(|f| f.exponent.abs() > 1e-12 && f.u.norm() > 1e-14);
        match (merged.len(), n) {
            (0, Some(n)) => WeightSpec::constant(n, scale),
            (1, _) if (merged[0].exponent - 1.0).abs() <= 1e-12 => {
                match BallPoint::new(merged[0].u.clone()) {
                    Ok(c) => WeightSpec::Kernel { alpha: scale, c },
                    Err(_) => WeightSpec::KernelProduct {
                        scale,
                        factors: merged,
                    },
                }
            }
            _ => WeightSpec::KernelProduct {
                scale,
                factors: merged,
            },
        }
    }

    /// g o phi. Kernel-type weights stay in closed form:
    /// 1 - <phi(z), u> = (1 - <B, u>)(1 - <z, u'>) / (1 - <z, -C>), u' = -(C - A* u) / conj(1 - <B, u>),
    /// and the branch constant is fixed at z = 0.
    pub fn compose(&self, gamma: f64, phi: &LinearFractionalMap) -> Result<Self> {
        if let Some(n) = self.dim() {
            check_len(phi.dim(), n)?;
        }
        match self.product_form() {
            Some((mut scale, factors)) => {
                let mut out = Vec::with_capacity(2 * factors.len());
                for f in &factors {
                    let k = ONE - inner(phi.b(), &f.u);
                    scale *= k.powf(-gamma * f.exponent);
                    let u_new = -(phi.c() - phi.a().adjoint() * &f.u) / k.conj();
                    out.push(KernelFactor {
                        u: u_new,
                        exponent: f.exponent,
                    });
                    out.push(KernelFactor {
                        u: -phi.c(),
                        exponent: -f.exponent,
                    });
                }
                Ok(WeightSpec::KernelProduct {
                    scale,
                    factors: out,
                }
                .simplify())
            }
            None => {
                let WeightSpec::Series(s) = self else { unreachable!() };
                Ok(WeightSpec::Series(s.compose_fractional(
                    phi.a(),
                    phi.b(),
                    phi.c(),
                    phi.d(),
                    CONSTANT_TERM_TOL,
                )?))
            }
        }
    }

    /// Pointwise product f * g.
    pub fn mul(&self, other: &Self, gamma: f64) -> Result<Self> {
        if let (Some(a), Some(b)) = (self.dim(), other.dim()) {
            check_len(a, b)?;
        }
        match (self.product_form(), other.product_form()) {
            (Some((s1, mut f1)), Some((s2, f2))) => {
                f1.extend(f2);
                Ok(WeightSpec::KernelProduct {
                    scale: s1 * s2,
                    factors: f1,
                }
                .simplify())
            }
            _ => {
                let basis = match (self, other) {
                    (WeightSpec::Series(s), _) | (_, WeightSpec::Series(s)) => Arc::clone(s.basis()),
                    _ => unreachable!(),
                };
                let a = self.to_series(gamma, &basis)?;
                let b = other.to_series(gamma, &basis)?;
                Ok(WeightSpec::Series(a.mul(&b)?))
            }
        }
    }

    /// Truncated Taylor expansion in `basis`.
    pub fn to_series(&self, gamma: f64, basis: &Arc<Basis>) -> Result<TruncatedSeries> {
        if let Some(n) = self.dim() {
            check_len(basis.n(), n)?;
        }
        match self {
            WeightSpec::Kernel { alpha, c } => {
                Ok(factor_series(gamma, basis, c.coords(), 1.0)?.scale(*alpha))
            }
            WeightSpec::KernelProduct { scale, factors } => {
                let mut s = TruncatedSeries::constant(basis, *scale);
                for f in factors {
                    s = s.mul(&factor_series(gamma, basis, &f.u, f.exponent)?)?;
                }
                Ok(s)
            }
            WeightSpec::Series(s) => s.rebase(basis),
        }
    }
}

/// Expansion of (1 - <z, u>)^(-gamma e).
fn factor_series(gamma: f64, basis: &Arc<Basis>, u: &CVector, e: f64) -> Result<TruncatedSeries> {
    series::denominator_series(basis, &(-u), ONE)?.real_power(-gamma * e)
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

/// Outcome of a pointwise comparison of two symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolComparison {
    pub equal: bool,
    pub residual: f64,
}

/// The symbol (f, phi) of W_{f,phi} on H_gamma.
#[derive(Debug, Clone, PartialEq)]
pub struct WcoSymbol {
    gamma: f64,
    weight: WeightSpec,
    map: LinearFractionalMap,
}

impl WcoSymbol {
    /// Checks gamma, dimensions and the self-map property.
    pub fn new(gamma: f64, weight: WeightSpec, map: LinearFractionalMap) -> Result<Self> {
        let chk = map.is_self_map(DEFAULT_SELF_MAP_SAMPLES);
        if !chk.is_self_map {
            return Err(Error::NotSelfMap(chk.sup_norm));
        }
        Self::new_trusted(gamma, weight, map)
    }

    /// Like [`Self::new`] without the sampled self-map check, for maps known to be self-maps.
    pub(crate) fn new_trusted(gamma: f64, weight: WeightSpec, map: LinearFractionalMap) -> Result<Self> {
        SpaceParams::new(map.dim(), gamma, 0)?;
        if let Some(n) = weight.dim() {
            check_len(map.dim(), n)?;
        }
        Ok(WcoSymbol { gamma, weight, map })
    }

    pub fn identity(gamma: f64, n: usize) -> Result<Self> {
        Self::new_trusted(gamma, WeightSpec::constant(n, ONE), LinearFractionalMap::identity(n))
    }

    /// C_phi, weight 1.
    pub fn composition(gamma: f64, map: LinearFractionalMap) -> Result<Self> {
        let n = map.dim();
        Self::new(gamma, WeightSpec::constant(n, ONE), map)
    }

    /// U_a = W_{k_a, phi_a}.
    pub fn moebius_unitary(gamma: f64, a: BallPoint) -> Result<Self> {
        let map = LinearFractionalMap::moebius_involution(&a);
        Self::new_trusted(gamma, WeightSpec::normalized_kernel(gamma, a, ONE), map)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    pub fn map(&self) -> &LinearFractionalMap {
        &self.map
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn weight_at(&self, z: &CVector) -> Result<Complex64> {
        self.weight.eval(self.gamma, z)
    }

    /// (W K_z)(w) = f(w) K_z(phi(w)).
    pub fn apply_to_kernel(&self, z: &CVector, w: &CVector) -> Result<Complex64> {
        let pw = self.map.apply(w)?;
        Ok(self.weight_at(w)? * kernel_eval(self.gamma, z, &pw))
    }

    /// W* K_z = conj(f(z)) K_{phi(z)}.
    pub fn adjoint_on_kernel(&self, z: &BallPoint) -> Result<KernelVector> {
        let f = self.weight_at(z.coords())?;
        let pz = BallPoint::new(self.map.apply(z.coords())?)?;
        Ok(KernelVector::new(self.gamma, pz, f.conj()))
    }

    /// self * other = W_{f,phi} W_{g,psi} = W_{f (g o phi), psi o phi}.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.gamma != other.gamma {
            return Err(Error::GammaMismatch(self.gamma, other.gamma));
        }
        check_len(self.dim(), other.dim())?;
        let map = other.map.compose(&self.map)?;
        let g_phi = other.weight.compose(self.gamma, &self.map)?;
        let weight = self.weight.mul(&g_phi, self.gamma)?;
        Self::new_trusted(self.gamma, weight, map)
    }

    /// For f = alpha K_{sigma(0)} the adjoint is W_{conj(alpha) K_{phi(0)}, sigma}.
    pub fn adjoint_symbol(&self) -> Result<Self> {
        let sigma = self.map.adjoint()?;
        let s0 = sigma.at_origin();
        let (alpha, c) = self.weight.as_kernel().ok_or_else(|| {
            Error::WeightNotKernelForm("weight is not a single scaled kernel".into())
        })?;
        if (&c - &s0).norm() > SYMBOL_TOL {
            return Err(Error::WeightNotKernelForm(format!(
                "kernel center is {:.3e} away from sigma(0)",
                (&c - &s0).norm()
            )));
        }
        let weight = WeightSpec::kernel(alpha.conj(), BallPoint::new(self.map.at_origin())?);
        Self::new(self.gamma, weight, sigma)
    }

    /// Pointwise comparison of weights (relative) and maps over deterministic sample points.
    pub fn compare(&self, other: &Self, samples: usize) -> SymbolComparison {
        let fail = SymbolComparison {
            equal: false,
            residual: f64::INFINITY,
        };
        if self.gamma != other.gamma || self.dim() != other.dim() {
            return fail;
        }
        let mut worst = 0.0_f64;
        for z in sampling::ball_points(self.dim(), samples.max(1), 0.9) {
            let (Ok(f1), Ok(f2)) = (self.weight_at(&z), other.weight_at(&z)) else {
                return fail;
            };
            let (Ok(p1), Ok(p2)) = (self.map.apply(&z), other.map.apply(&z)) else {
                return fail;
            };
            let scale = f1.norm().max(f2.norm()).max(1.0);
            worst = worst.max((f1 - f2).norm() / scale).max((p1 - p2).norm());
        }
        SymbolComparison {
            equal: worst <= SYMBOL_TOL,
            residual: worst,
        }
    }

    pub fn weight_as_series(&self, params: SpaceParams) -> Result<TruncatedSeries> {
        self.weight.to_series(self.gamma, &Basis::for_params(params)?)
    }

    /// Galerkin compression P_D W P_D in the orthonormal basis e_m = sqrt(c_m) z^m:
    /// entry (k, m) = sqrt(c_m / c_k) * [z^k] f (z^m o phi).
    pub fn compress(&self, params: SpaceParams) -> Result<CMatrix> {
        check_len(self.dim(), params.n)?;
        if params.gamma != self.gamma {
            return Err(Error::GammaMismatch(self.gamma, params.gamma));
        }
        let basis = Basis::for_params(params)?;
        let f = self.weight.to_series(self.gamma, &basis)?;
        let den = series::denominator_series(&basis, self.map.c(), self.map.d())?;
        let r = den.reciprocal()?;
        // weighted[k] = f r^k multiplies every monomial image of degree k
        let mut weighted = Vec::with_capacity(basis.degree_cap() as usize + 1);
        weighted.push(f);
        for k in 1..=basis.degree_cap() as usize {
            let next = weighted[k - 1].mul(&r)?;
            weighted.push(next);
        }
        let factors = series::affine_rows(&basis, self.map.a(), self.map.b())?;
        let sq: Vec<f64> = basis.kernel_coeffs().iter().map(|c| c.sqrt()).collect();
        let len = basis.len();
        let mut out = CMatrix::zeros(len, len);
        series::for_each_power_product(&basis, &factors, |pos, num| {
            let col = num.mul(&weighted[basis.degree(pos) as usize])?;
            for (k, v) in col.coeffs().iter().enumerate() {
                out[(k, pos)] = v * (sq[pos] / sq[k]);
            }
            Ok(())
        })?;
        Ok(out)
    }
}

/// Largest relative error of <W K_y, K_z> = <K_y, W' K_z> over sample pairs, where W' is the
/// closed-form adjoint symbol. Fails when the weight is not of kernel type.
pub fn adjoint_duality_residual(w: &WcoSymbol, samples: usize) -> Result<f64> {
    let adj = w.adjoint_symbol()?;
    let pts = sampling::ball_points(w.dim(), 2 * samples.max(1), 0.9);
    let mut worst = 0.0_f64;
    for pair in pts.chunks(2) {
        let (y, z) = (&pair[0], &pair[1]);
        let lhs = w.apply_to_kernel(y, z)?;
        let rhs = adj.apply_to_kernel(z, y)?.conj();
        worst = worst.max((lhs - rhs).norm() / lhs.norm().max(1.0));
    }
    Ok(worst)
}

/// Largest relative error of (W1 W2 K_z)(w) = f1(w) (W2 K_z)(phi1(w)) for the closed-form product.
pub fn product_law_residual(w1: &WcoSymbol, w2: &WcoSymbol, samples: usize) -> Result<f64> {
    let p = w1.product(w2)?;
    let pts = sampling::ball_points(w1.dim(), 2 * samples.max(1), 0.9);
    let mut worst = 0.0_f64;
    for pair in pts.chunks(2) {
        let (z, w) = (&pair[0], &pair[1]);
        let two = w1.weight_at(w)? * w2.apply_to_kernel(z, &w1.map().apply(w)?)?;
        let one = p.apply_to_kernel(z, w)?;
        worst = worst.max((one - two).norm() / two.norm().max(1.0));
    }
    Ok(worst)
}
