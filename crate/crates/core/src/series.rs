//! Truncated multivariate complex power series.
//!
//! Every operation truncates at total degree D; coefficients are stored densely in the graded
//! order of [`Basis`]. Coefficients of degree <= D of a product are therefore exact: truncation
//! never feeds back into lower degrees.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multiindex::{Basis, MultiIndex, SpaceParams};

/// Default tolerance below which a constant term counts as vanishing.
pub const CONSTANT_TERM_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone)]
pub struct TruncatedSeries {
    basis: Arc<Basis>,
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_map();
        for (pos, c) in self.coeffs.iter().enumerate() {
            if *c != ZERO {
                list.entry(self.basis.index(pos), c);
            }
        }
        list.finish()
    }
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.basis.params() == other.basis.params() && self.coeffs == other.coeffs
    }
}

impl TruncatedSeries {
    pub fn zero(basis: &Arc<Basis>) -> Self {
        TruncatedSeries {
            basis: Arc::clone(basis),
            coeffs: vec![ZERO; basis.len()],
        }
    }

    pub fn constant(basis: &Arc<Basis>, c: Complex64) -> Self {
        let mut s = Self::zero(basis);
        s.coeffs[0] = c;
        s
    }

    pub fn one(basis: &Arc<Basis>) -> Self {
        Self::constant(basis, ONE)
    }

    /// Convenience constructor that builds (or reuses) the basis for `params`.
    pub fn zero_for(params: SpaceParams) -> Result<Self> {
        Ok(Self::zero(&Basis::for_params(params)?))
    }

    /// Coefficients listed in the graded order; missing trailing entries are zero.
    pub fn from_coeffs(basis: &Arc<Basis>, coeffs: &[Complex64]) -> Result<Self> {
        if coeffs.len() > basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: coeffs.len(),
            });
        }
        let mut s = Self::zero(basis);
        s.coeffs[..coeffs.len()].copy_from_slice(coeffs);
        Ok(s)
    }

    /// c * z^m, or zero when |m| > D.
    pub fn monomial(basis: &Arc<Basis>, m: &MultiIndex, c: Complex64) -> Result<Self> {
        if m.dim() != basis.n() {
            return Err(Error::DimensionMismatch {
                expected: basis.n(),
                got: m.dim(),
            });
        }
        let mut s = Self::zero(basis);
        if let Some(pos) = basis.rank(m) {
            s.coeffs[pos] = c;
        }
        Ok(s)
    }

    /// The affine function c0 + sum_j linear[j] z_j.
    pub fn affine(basis: &Arc<Basis>, c0: Complex64, linear: &[Complex64]) -> Result<Self> {
        if linear.len() != basis.n() {
            return Err(Error::DimensionMismatch {
                expected: basis.n(),
                got: linear.len(),
            });
        }
        let mut s = Self::constant(basis, c0);
        if basis.degree_cap() >= 1 {
            // Degree-one positions are 1..=n with e_j at 1 + j.
            s.coeffs[1..=basis.n()].copy_from_slice(linear);
        }
        Ok(s)
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn params(&self) -> SpaceParams {
        self.basis.params()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, m: &MultiIndex) -> Complex64 {
        self.basis.rank(m).map_or(ZERO, |p| self.coeffs[p])
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeffs[0]
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis.params() == other.basis.params() {
            Ok(())
        } else {
            Err(Error::ParamsMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(TruncatedSeries {
            basis: Arc::clone(&self.basis),
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(TruncatedSeries {
            basis: Arc::clone(&self.basis),
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        self.scale(-ONE)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TruncatedSeries {
            basis: Arc::clone(&self.basis),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Cauchy product with all terms of total degree > D discarded.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let nnz_a = self.coeffs.iter().filter(|c| **c != ZERO).count();
        let nnz_b = other.coeffs.iter().filter(|c| **c != ZERO).count();
        let (outer, inner) = if nnz_a <= nnz_b {
            (self, other)
        } else {
            (other, self)
        };
        let basis = &self.basis;
        let sums = basis.sums();
        let mut out = vec![ZERO; basis.len()];
        for (i, &a) in outer.coeffs.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            let row = &sums[i];
            for (j, &target) in row.iter().enumerate() {
                let b = inner.coeffs[j];
                if b != ZERO {
                    out[target as usize] += a * b;
                }
            }
        }
        Ok(TruncatedSeries {
            basis: Arc::clone(basis),
            coeffs: out,
        })
    }

    /// Multiplicative inverse through degree D, by degree-wise back substitution.
    pub fn reciprocal(&self) -> Result<Self> {
        self.reciprocal_with_tol(CONSTANT_TERM_TOL)
    }

    pub fn reciprocal_with_tol(&self, tol: f64) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0.norm() <= tol {
            return Err(Error::VanishingConstantTerm(a0.norm()));
        }
        let basis = &self.basis;
        let sums = basis.sums();
        let inv0 = ONE / a0;
        let mut r = vec![ZERO; basis.len()];
        r[0] = inv0;
        // r_[k] = -(1/a0) sum_{i >= 1} a_[i] r_[k-i]
        for k in 1..=basis.degree_cap() {
            for i in basis.up_to_degree(k).skip(1) {
                let a = self.coeffs[i];
                if a == ZERO {
                    continue;
                }
                let di = basis.degree(i);
                let row = &sums[i];
                for q in basis.degree_range(k - di) {
                    let rq = r[q];
                    if rq != ZERO {
                        r[row[q] as usize] -= a * rq * inv0;
                    }
                }
            }
        }
        Ok(TruncatedSeries {
            basis: Arc::clone(basis),
            coeffs: r,
        })
    }

    /// exp(gamma log a) through degree D, from the Euler-derivative recurrence a E(b) = gamma E(a) b.
    ///
    /// The constant term a0 is factored out first. When gamma is not an integer a0 must be a
    /// positive real, since otherwise the branch of a0^gamma is ambiguous.
    pub fn real_power(&self, gamma: f64) -> Result<Self> {
        self.real_power_with_tol(gamma, CONSTANT_TERM_TOL)
    }

    pub fn real_power_with_tol(&self, gamma: f64, tol: f64) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0.norm() <= tol {
            return Err(Error::VanishingConstantTerm(a0.norm()));
        }
        let is_integer = gamma.fract() == 0.0 && gamma.abs() < f64::from(i32::MAX);
        let lead = if is_integer {
            a0.powi(gamma as i32)
        } else if a0.im == 0.0 && a0.re > 0.0 {
            Complex64::new(a0.re.powf(gamma), 0.0)
        } else {
            return Err(Error::BranchAmbiguity(format!("{a0}")));
        };
        let basis = &self.basis;
        let sums = basis.sums();
        let inv0 = ONE / a0;
        let normalized: Vec<Complex64> = self.coeffs.iter().map(|c| c * inv0).collect();
        let mut b = vec![ZERO; basis.len()];
        b[0] = ONE;
        // k b_[k] = sum_{i=1..k} (gamma i - (k - i)) a_[i] b_[k-i]
        for k in 1..=basis.degree_cap() {
            let inv_k = 1.0 / f64::from(k);
            for i in basis.up_to_degree(k).skip(1) {
                let a = normalized[i];
                if a == ZERO {
                    continue;
                }
                let di = basis.degree(i);
                let weight = (gamma * f64::from(di) - f64::from(k - di)) * inv_k;
                let row = &sums[i];
                for q in basis.degree_range(k - di) {
                    let bq = b[q];
                    if bq != ZERO {
                        b[row[q] as usize] += a * bq * weight;
                    }
                }
            }
        }
        for c in &mut b {
            *c *= lead;
        }
        Ok(TruncatedSeries {
            basis: Arc::clone(basis),
            coeffs: b,
        })
    }

    /// sum_m a_m z^m, with the monomials built incrementally along the graded order.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        let basis = &self.basis;
        if z.len() != basis.n() {
            return Err(Error::DimensionMismatch {
                expected: basis.n(),
                got: z.len(),
            });
        }
        let mut mono = vec![ONE; basis.len()];
        let mut acc = self.coeffs[0];
        for pos in 1..basis.len() {
            let (parent, var) = basis.parent(pos);
            mono[pos] = mono[parent] * z[var];
            acc += self.coeffs[pos] * mono[pos];
        }
        Ok(acc)
    }

    /// Truncated expansion of h(Az + b).
    pub fn compose_affine(&self, a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<Self> {
        let n = self.basis.n();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.nrows().max(a.ncols()),
            });
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        let factors = affine_rows(&self.basis, a, b)?;
        let mut out = Self::zero(&self.basis);
        for_each_power_product(&self.basis, &factors, |pos, prod| {
            let h = self.coeffs[pos];
            if h != ZERO {
                for (o, p) in out.coeffs.iter_mut().zip(&prod.coeffs) {
                    *o += h * p;
                }
            }
            Ok(())
        })?;
        Ok(out)
    }

    /// Truncated expansion of h((Az + b) / (<z, c> + d)).
    pub fn compose_fractional(
        &self,
        a: &DMatrix<Complex64>,
        b: &DVector<Complex64>,
        c: &DVector<Complex64>,
        d: Complex64,
        tol: f64,
    ) -> Result<Self> {
        let basis = &self.basis;
        let factors = affine_rows(basis, a, b)?;
        let den = denominator_series(basis, c, d)?;
        let powers = den.reciprocal_with_tol(tol)?.powers(basis.degree_cap());
        let mut out = Self::zero(basis);
        for_each_power_product(basis, &factors, |pos, prod| {
            let h = self.coeffs[pos];
            if h != ZERO {
                let term = prod.mul(&powers[basis.degree(pos) as usize])?;
                for (o, p) in out.coeffs.iter_mut().zip(&term.coeffs) {
                    *o += h * p;
                }
            }
            Ok(())
        })?;
        Ok(out)
    }

    /// The same polynomial viewed in another basis of the same dimension: coefficients above the
    /// new degree cap are dropped. The graded order of degree <= D is a prefix of the order for
    /// any larger cap, so this is a prefix copy.
    pub fn rebase(&self, basis: &Arc<Basis>) -> Result<Self> {
        if basis.n() != self.basis.n() {
            return Err(Error::DimensionMismatch {
                expected: basis.n(),
                got: self.basis.n(),
            });
        }
        let k = basis.len().min(self.coeffs.len());
        let mut out = Self::zero(basis);
        out.coeffs[..k].copy_from_slice(&self.coeffs[..k]);
        Ok(out)
    }

    /// [1, s, s^2, ..., s^k].
    pub fn powers(&self, k: u32) -> Vec<Self> {
        let mut out = Vec::with_capacity(k as usize + 1);
        out.push(Self::one(&self.basis));
        for i in 1..=k as usize {
            let next = out[i - 1].mul(self).expect("same basis");
            out.push(next);
        }
        out
    }

    /// Coordinates in the orthonormal basis e_m = sqrt(c_m) z^m.
    pub fn orthonormal_coords(&self) -> DVector<Complex64> {
        let c = self.basis.kernel_coeffs();
        DVector::from_iterator(
            self.coeffs.len(),
            self.coeffs.iter().zip(c).map(|(a, ck)| a / ck.sqrt()),
        )
    }

    /// Inverse of [`Self::orthonormal_coords`].
    pub fn from_orthonormal_coords(basis: &Arc<Basis>, v: &DVector<Complex64>) -> Result<Self> {
        if v.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: v.len(),
            });
        }
        let c = basis.kernel_coeffs();
        Ok(TruncatedSeries {
            basis: Arc::clone(basis),
            coeffs: v.iter().zip(c).map(|(a, ck)| a * ck.sqrt()).collect(),
        })
    }

    /// H_gamma inner product of the two polynomials, sum_m a_m conj(b_m) / c_m.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same(other)?;
        let c = self.basis.kernel_coeffs();
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .zip(c)
            .map(|((a, b), ck)| a * b.conj() / ck)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        let c = self.basis.kernel_coeffs();
        self.coeffs
            .iter()
            .zip(c)
            .map(|(a, ck)| a.norm_sqr() / ck)
            .sum::<f64>()
            .sqrt()
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// The affine series (Az + b)_j for j = 0..n.
pub(crate) fn affine_rows(
    basis: &Arc<Basis>,
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
) -> Result<Vec<TruncatedSeries>> {
    let n = basis.n();
    if a.nrows() != n || a.ncols() != n || b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.nrows(),
        });
    }
    (0..n)
        .map(|j| {
            let row: Vec<Complex64> = (0..n).map(|k| a[(j, k)]).collect();
            TruncatedSeries::affine(basis, b[j], &row)
        })
        .collect()
}

/// The affine series <z, c> + d = d + sum_j conj(c_j) z_j.
pub(crate) fn denominator_series(
    basis: &Arc<Basis>,
    c: &DVector<Complex64>,
    d: Complex64,
) -> Result<TruncatedSeries> {
    let lin: Vec<Complex64> = c.iter().map(|x| x.conj()).collect();
    TruncatedSeries::affine(basis, d, &lin)
}

/// Visits every position m of the basis with the product prod_j factors[j]^(m_j), walking the
/// multi-index tree depth first so only one root-to-leaf chain of partial products is alive.
pub(crate) fn for_each_power_product<F>(
    basis: &Arc<Basis>,
    factors: &[TruncatedSeries],
    mut visit: F,
) -> Result<()>
where
    F: FnMut(usize, &TruncatedSeries) -> Result<()>,
{
    fn walk<F>(
        basis: &Arc<Basis>,
        factors: &[TruncatedSeries],
        pos: usize,
        prod: &TruncatedSeries,
        min_var: usize,
        visit: &mut F,
    ) -> Result<()>
    where
        F: FnMut(usize, &TruncatedSeries) -> Result<()>,
    {
        visit(pos, prod)?;
        if basis.degree(pos) == basis.degree_cap() {
            return Ok(());
        }
        let sums = basis.sums();
        for (var, factor) in factors.iter().enumerate().skip(min_var) {
            let child = sums[pos][1 + var] as usize;
            let next = prod.mul(factor)?;
            walk(basis, factors, child, &next, var, visit)?;
        }
        Ok(())
    }
    let one = TruncatedSeries::one(basis);
    walk(basis, factors, 0, &one, 0, &mut visit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn basis(n: usize, d: u32) -> Arc<Basis> {
        Basis::for_params(SpaceParams::new(n, 1.0, d).unwrap()).unwrap()
    }

    fn real_coeffs(s: &TruncatedSeries) -> Vec<f64> {
        s.coeffs().iter().map(|x| x.re).collect()
    }

    #[test]
    fn addition_identities() {
        let b = basis(2, 2);
        let s = TruncatedSeries::from_coeffs(&b, &[c(1.0, 2.0), c(0.5, 0.0), c(0.0, -1.0)]).unwrap();
        let zero = TruncatedSeries::zero(&b);
        assert_eq!(s.add(&zero).unwrap(), s);
        assert_eq!(s.add(&s.neg()).unwrap(), zero);
        let one_z1 = TruncatedSeries::affine(&b, c(1.0, 0.0), &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let one_z2 = TruncatedSeries::affine(&b, c(1.0, 0.0), &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let sum = one_z1.add(&one_z2).unwrap();
        assert_eq!(real_coeffs(&sum), vec![2.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn params_mismatch_is_an_error() {
        let a = TruncatedSeries::one(&basis(2, 2));
        let b = TruncatedSeries::one(&basis(2, 3));
        assert_eq!(a.add(&b), Err(Error::ParamsMismatch));
        assert_eq!(a.mul(&b), Err(Error::ParamsMismatch));
    }

    #[test]
    fn multiplication_truncates() {
        let b = basis(2, 1);
        let z1 = TruncatedSeries::affine(&b, c(0.0, 0.0), &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let z2 = TruncatedSeries::affine(&b, c(0.0, 0.0), &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(z1.mul(&z2).unwrap(), TruncatedSeries::zero(&b));
        let one = TruncatedSeries::one(&b);
        assert_eq!(z1.mul(&one).unwrap(), z1);
    }

    #[test]
    fn geometric_series_times_one_minus_z() {
        // Oracle: direct convolution of (1,1,1,1,1,1) with (1,-1), truncated to six terms.
        let b = basis(1, 5);
        let geo = TruncatedSeries::from_coeffs(&b, &[c(1.0, 0.0); 6]).unwrap();
        let lin = TruncatedSeries::affine(&b, c(1.0, 0.0), &[c(-1.0, 0.0)]).unwrap();
        let full: Vec<f64> = (0..7)
            .map(|k| {
                let a = |i: usize| if i < 6 { 1.0 } else { 0.0 };
                let l = |i: usize| match i {
                    0 => 1.0,
                    1 => -1.0,
                    _ => 0.0,
                };
                (0..=k).map(|i| a(i) * l(k - i)).sum()
            })
            .collect();
        assert_eq!(real_coeffs(&geo.mul(&lin).unwrap()), full[..6].to_vec());
        assert_eq!(full[..6], [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn reciprocal_examples() {
        let b1 = basis(1, 4);
        let two = TruncatedSeries::constant(&b1, c(2.0, 0.0));
        assert_eq!(two.reciprocal().unwrap(), TruncatedSeries::constant(&b1, c(0.5, 0.0)));
        let lin = TruncatedSeries::affine(&b1, c(1.0, 0.0), &[c(-1.0, 0.0)]).unwrap();
        assert_eq!(real_coeffs(&lin.reciprocal().unwrap()), vec![1.0; 5]);

        // (1 + t)^(-1) with t = z1 + z2: 1 - t + t^2
        let b2 = basis(2, 2);
        let s = TruncatedSeries::affine(&b2, c(1.0, 0.0), &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(
            real_coeffs(&s.reciprocal().unwrap()),
            vec![1.0, -1.0, -1.0, 1.0, 2.0, 1.0]
        );
    }

    #[test]
    fn reciprocal_rejects_vanishing_constant() {
        let b = basis(1, 3);
        let z = TruncatedSeries::affine(&b, c(1e-13, 0.0), &[c(1.0, 0.0)]).unwrap();
        assert!(matches!(z.reciprocal(), Err(Error::VanishingConstantTerm(_))));
        assert!(z.reciprocal_with_tol(1e-14).is_ok());
    }

    #[test]
    fn real_power_examples() {
        let b = basis(2, 3);
        let s = TruncatedSeries::from_coeffs(&b, &[c(1.0, 0.0), c(0.3, 0.1), c(-0.2, 0.5), c(0.1, 0.0)])
            .unwrap();
        assert!(s.real_power(1.0).unwrap().max_abs_diff(&s).unwrap() < 1e-15);

        let b1 = basis(1, 3);
        let lin = TruncatedSeries::affine(&b1, c(1.0, 0.0), &[c(-1.0, 0.0)]).unwrap();
        assert_eq!(real_coeffs(&lin.real_power(-2.0).unwrap()), vec![1.0, 2.0, 3.0, 4.0]);
        let b2 = basis(1, 2);
        let lin2 = TruncatedSeries::affine(&b2, c(1.0, 0.0), &[c(-1.0, 0.0)]).unwrap();
        let r = lin2.real_power(-0.5).unwrap();
        let expected = [1.0, 0.5, 0.375];
        for (got, want) in r.coeffs().iter().zip(expected) {
            assert!((got - c(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn real_power_factors_positive_constant() {
        let b = basis(1, 6);
        let s = TruncatedSeries::affine(&b, c(4.0, 0.0), &[c(-1.0, 0.0)]).unwrap();
        // (4 - z)^(1/2) = 2 (1 - z/4)^(1/2)
        let r = s.real_power(0.5).unwrap();
        let sq = r.mul(&r).unwrap();
        assert!(sq.max_abs_diff(&s).unwrap() < 1e-14);
        assert!((r.constant_term() - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn real_power_branch_errors() {
        let b = basis(1, 3);
        let neg = TruncatedSeries::affine(&b, c(-1.0, 0.0), &[c(1.0, 0.0)]).unwrap();
        assert!(matches!(neg.real_power(0.5), Err(Error::BranchAmbiguity(_))));
        let cplx = TruncatedSeries::affine(&b, c(0.0, 1.0), &[c(1.0, 0.0)]).unwrap();
        assert!(matches!(cplx.real_power(1.5), Err(Error::BranchAmbiguity(_))));
        // integer exponents are unambiguous
        let sq = cplx.real_power(2.0).unwrap();
        assert!(sq.max_abs_diff(&cplx.mul(&cplx).unwrap()).unwrap() < 1e-15);
        let zero = TruncatedSeries::zero(&b);
        assert!(matches!(zero.real_power(2.0), Err(Error::VanishingConstantTerm(_))));
    }

    #[test]
    fn eval_examples() {
        let b = basis(2, 3);
        let k = TruncatedSeries::constant(&b, c(3.0, -1.0));
        assert_eq!(k.eval(&[c(0.4, 0.2), c(-0.1, 0.0)]).unwrap(), c(3.0, -1.0));
        let m = TruncatedSeries::monomial(&b, &MultiIndex::new(vec![1, 1]), c(1.0, 0.0)).unwrap();
        assert_eq!(m.eval(&[c(2.0, 0.0), c(3.0, 0.0)]).unwrap(), c(6.0, 0.0));

        let b20 = basis(1, 20);
        let geo = TruncatedSeries::from_coeffs(&b20, &[c(1.0, 0.0); 21]).unwrap();
        let v = geo.eval(&[c(0.5, 0.0)]).unwrap();
        assert!((v - c(2.0, 0.0)).norm() < 1e-6);
        assert!(matches!(geo.eval(&[]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn compose_affine_examples() {
        let b = basis(2, 3);
        let h = TruncatedSeries::from_coeffs(
            &b,
            &[c(0.1, 0.0), c(1.0, 0.5), c(-0.3, 0.0), c(0.2, 0.0), c(0.0, 1.0), c(0.7, 0.0)],
        )
        .unwrap();
        let id = DMatrix::<Complex64>::identity(2, 2);
        let zero = DVector::<Complex64>::zeros(2);
        assert!(h.compose_affine(&id, &zero).unwrap().max_abs_diff(&h).unwrap() < 1e-15);

        let z1 = TruncatedSeries::monomial(&b, &MultiIndex::unit(2, 0), c(1.0, 0.0)).unwrap();
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![c(2.0, 0.0), c(3.0, 0.0)]));
        let shift = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let out = z1.compose_affine(&a, &shift).unwrap();
        let expected = TruncatedSeries::affine(&b, c(1.0, 0.0), &[c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(out, expected);

        let b1 = basis(1, 4);
        let lam = c(0.3, -0.8);
        let z2 = TruncatedSeries::monomial(&b1, &MultiIndex::new(vec![2]), c(1.0, 0.0)).unwrap();
        let scaled = z2
            .compose_affine(&DMatrix::from_element(1, 1, lam), &DVector::zeros(1))
            .unwrap();
        assert!((scaled.coeff(&MultiIndex::new(vec![2])) - lam * lam).norm() < 1e-15);
        assert!(matches!(
            z2.compose_affine(&id, &zero),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn compose_fractional_matches_pointwise() {
        let b = basis(2, 25);
        let h = TruncatedSeries::from_coeffs(
            &b,
            &[c(0.1, 0.0), c(1.0, 0.5), c(-0.3, 0.0), c(0.2, 0.0), c(0.0, 1.0), c(0.7, 0.0)],
        )
        .unwrap();
        let a = DMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.1, 0.1), c(0.0, -0.2), c(0.25, 0.0)]);
        let bb = DVector::from_vec(vec![c(0.1, 0.0), c(0.0, 0.05)]);
        let cc = DVector::from_vec(vec![c(0.2, 0.1), c(-0.1, 0.0)]);
        let d = c(1.0, 0.0);
        let comp = h.compose_fractional(&a, &bb, &cc, d, CONSTANT_TERM_TOL).unwrap();
        let z = DVector::from_vec(vec![c(0.1, -0.05), c(0.08, 0.02)]);
        let den = cc.dotc(&z) + d;
        let w = (&a * &z + &bb) / den;
        let direct = h.eval(w.as_slice()).unwrap();
        assert!((comp.eval(z.as_slice()).unwrap() - direct).norm() < 1e-12);
    }

    #[test]
    fn rebase_keeps_low_degree_terms() {
        let small = basis(2, 2);
        let big = basis(2, 4);
        let m = MultiIndex::new(vec![1, 1]);
        let s = TruncatedSeries::monomial(&small, &m, c(2.0, 1.0)).unwrap();
        let up = s.rebase(&big).unwrap();
        assert_eq!(up.coeff(&m), c(2.0, 1.0));
        let cube = TruncatedSeries::monomial(&big, &MultiIndex::new(vec![3, 0]), c(1.0, 0.0)).unwrap();
        assert_eq!(cube.rebase(&small).unwrap(), TruncatedSeries::zero(&small));
        assert_eq!(up.rebase(&small).unwrap(), s);
    }

    #[test]
    fn orthonormal_coordinates_round_trip() {
        let b = Basis::for_params(SpaceParams::new(2, 2.5, 4).unwrap()).unwrap();
        let s = TruncatedSeries::from_coeffs(&b, &[c(1.0, 0.0), c(0.0, 2.0), c(3.0, -1.0)]).unwrap();
        let v = s.orthonormal_coords();
        assert!((v.norm() - s.norm()).abs() < 1e-14);
        let back = TruncatedSeries::from_orthonormal_coords(&b, &v).unwrap();
        assert!(back.max_abs_diff(&s).unwrap() < 1e-15);
    }
}
