//! Reproducing kernels K^gamma_z(w) = (1 - <w, z>)^(-gamma) and the identities they satisfy.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::maps::{inner, BallPoint, LinearFractionalMap, DEFAULT_SELF_MAP_SAMPLES};
use crate::multiindex::Basis;
use crate::sampling;
use crate::series::TruncatedSeries;

/// Number of deterministic sample points used by the identity checks.
pub const CHECK_SAMPLES: usize = 100;
/// Radius of the sampled region for the identity checks.
pub const CHECK_RADIUS: f64 = 0.9;

/// K^gamma_z(w) = (1 - <w, z>)^(-gamma), principal branch.
///
/// Re(1 - <w, z>) > 0 whenever |z| < 1 and |w| <= 1, so the branch is unambiguous.
pub fn kernel_eval(gamma: f64, z: &CVector, w: &CVector) -> Complex64 {
    (Complex64::new(1.0, 0.0) - inner(w, z)).powf(-gamma)
}

/// (1 - |a|^2)^(gamma/2), the factor turning K_a into a unit vector.
pub fn normalizing_factor(gamma: f64, a: &CVector) -> f64 {
    (1.0 - a.norm_squared()).powf(gamma / 2.0)
}

/// scale * K^gamma_base, kept in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelVector {
    pub gamma: f64,
    pub base: BallPoint,
    pub scale: Complex64,
}

impl KernelVector {
    pub fn new(gamma: f64, base: BallPoint, scale: Complex64) -> Self {
        KernelVector { gamma, base, scale }
    }

    pub fn kernel(gamma: f64, base: BallPoint) -> Self {
        Self::new(gamma, base, Complex64::new(1.0, 0.0))
    }

    /// k^gamma_a = (1 - |a|^2)^(gamma/2) K^gamma_a.
    pub fn normalized(gamma: f64, a: BallPoint) -> Self {
        let s = normalizing_factor(gamma, a.coords());
        Self::new(gamma, a, Complex64::from(s))
    }

    pub fn eval(&self, w: &CVector) -> Complex64 {
        self.scale * kernel_eval(self.gamma, self.base.coords(), w)
    }

    pub fn norm(&self) -> f64 {
        self.scale.norm() * (1.0 - self.base.norm().powi(2)).powf(-self.gamma / 2.0)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::new(self.gamma, self.base.clone(), self.scale * c)
    }

    /// Truncated Taylor expansion: scale * sum_m c_m conj(base)^m z^m.
    pub fn to_series(&self, basis: &Arc<Basis>) -> Result<TruncatedSeries> {
        check_gamma(self.gamma, basis.params().gamma)?;
        if basis.n() != self.base.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.n(),
                got: self.base.dim(),
            });
        }
        let zb: Vec<Complex64> = self.base.coords().iter().map(|x| x.conj()).collect();
        let mut s = TruncatedSeries::zero(basis);
        let mut mono = vec![Complex64::new(1.0, 0.0); basis.len()];
        let coeffs = basis.kernel_coeffs();
        let out = s.coeffs_mut();
        out[0] = self.scale;
        for pos in 1..basis.len() {
            let (parent, var) = basis.parent(pos);
            mono[pos] = mono[parent] * zb[var];
            out[pos] = self.scale * coeffs[pos] * mono[pos];
        }
        Ok(s)
    }
}

fn check_gamma(a: f64, b: f64) -> Result<()> {
    if a != b {
        Err(Error::GammaMismatch(a, b))
    } else {
        Ok(())
    }
}

/// <u, v> = scale_u conj(scale_v) K(base_v, base_u), with K(w, z) = K_z(w).
pub fn inner_product(u: &KernelVector, v: &KernelVector) -> Result<Complex64> {
    check_gamma(u.gamma, v.gamma)?;
    if u.base.dim() != v.base.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.base.dim(),
            got: v.base.dim(),
        });
    }
    Ok(u.scale * v.scale.conj() * kernel_eval(u.gamma, u.base.coords(), v.base.coords()))
}

/// max over sample points z of |k_a(z) k_b(psi(z)) - 1| with a = psi^-1(0), b = psi(0).
pub fn check_reciprocal_identity(psi: &LinearFractionalMap, gamma: f64) -> Result<f64> {
    let inv = psi
        .automorphism_inverse(DEFAULT_SELF_MAP_SAMPLES)
        .ok_or(Error::NotAutomorphism)?;
    let n = psi.dim();
    let a = BallPoint::new(inv.at_origin())?;
    let b = BallPoint::new(psi.at_origin())?;
    let ka = KernelVector::normalized(gamma, a);
    let kb = KernelVector::normalized(gamma, b);
    let mut worst = 0.0_f64;
    for z in sampling::ball_points(n, CHECK_SAMPLES, CHECK_RADIUS) {
        let w = psi.apply(&z)?;
        worst = worst.max((ka.eval(&z) * kb.eval(&w) - 1.0).norm());
    }
    Ok(worst)
}

/// Largest relative error, over sample pairs, of
/// 1 - <psi(z), psi(w)> = (1 - |a|^2)(1 - <z, w>) / ((1 - <z, a>)(1 - <a, w>)), a = psi^-1(0).
pub fn check_automorphism_identity(psi: &LinearFractionalMap) -> Result<f64> {
    let inv = psi
        .automorphism_inverse(DEFAULT_SELF_MAP_SAMPLES)
        .ok_or(Error::NotAutomorphism)?;
    let a = inv.at_origin();
    let n = psi.dim();
    let one = Complex64::new(1.0, 0.0);
    let pts = sampling::ball_points(n, 2 * CHECK_SAMPLES, CHECK_RADIUS);
    let mut worst = 0.0_f64;
    for pair in pts.chunks(2) {
        let (z, w) = (&pair[0], &pair[1]);
        let lhs = one - inner(&psi.apply(z)?, &psi.apply(w)?);
        let rhs = (1.0 - a.norm_squared()) * (one - inner(z, w))
            / ((one - inner(z, &a)) * (one - inner(&a, w)));
        worst = worst.max((lhs - rhs).norm() / rhs.norm());
    }
    Ok(worst)
}

/// Residuals of the two kernel transformation identities for phi and its adjoint map sigma:
///   K_{phi(0)} (K_a o sigma) = conj(K_{sigma(0)}(a)) K_{phi(a)}
///   K_{sigma(0)} (K_a o phi) = conj(K_{phi(0)}(a)) K_{sigma(a)}
/// Each residual is a maximum relative error over the sample points.
pub fn check_kernel_transform(
    phi: &LinearFractionalMap,
    gamma: f64,
    a: &BallPoint,
) -> Result<(f64, f64)> {
    let sigma = phi.adjoint()?;
    let chk = sigma.is_self_map(DEFAULT_SELF_MAP_SAMPLES);
    if !chk.is_self_map {
        return Err(Error::NotSelfMap(chk.sup_norm));
    }
    let n = phi.dim();
    let (p0, s0) = (phi.at_origin(), sigma.at_origin());
    let av = a.coords();
    let (pa, sa) = (phi.apply(av)?, sigma.apply(av)?);
    let c1 = kernel_eval(gamma, &s0, av).conj();
    let c2 = kernel_eval(gamma, &p0, av).conj();
    let (mut r1, mut r2) = (0.0_f64, 0.0_f64);
    for z in sampling::ball_points(n, CHECK_SAMPLES, CHECK_RADIUS) {
        let lhs1 = kernel_eval(gamma, &p0, &z) * kernel_eval(gamma, av, &sigma.apply(&z)?);
        let rhs1 = c1 * kernel_eval(gamma, &pa, &z);
        r1 = r1.max((lhs1 - rhs1).norm() / rhs1.norm());
        let lhs2 = kernel_eval(gamma, &s0, &z) * kernel_eval(gamma, av, &phi.apply(&z)?);
        let rhs2 = c2 * kernel_eval(gamma, &sa, &z);
        r2 = r2.max((lhs2 - rhs2).norm() / rhs2.norm());
    }
    Ok((r1, r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, CMatrix};
    use crate::maps::cvec;
    use crate::multiindex::SpaceParams;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(x: f64) -> Complex64 {
        c(x, 0.0)
    }

    fn point(v: &[Complex64]) -> BallPoint {
        BallPoint::from_slice(v).unwrap()
    }

    #[test]
    fn kernel_eval_examples() {
        let w = cvec(&[c(0.3, 0.4), c(-0.1, 0.2)]);
        assert_eq!(kernel_eval(2.5, &CVector::zeros(2), &w), r(1.0));
        let h = cvec(&[r(0.5)]);
        assert!((kernel_eval(2.0, &h, &h) - r(16.0 / 9.0)).norm() < 1e-15);
        let z = cvec(&[c(0.2, -0.5), c(0.1, 0.3)]);
        let k1 = kernel_eval(1.7, &z, &w);
        let k2 = kernel_eval(1.7, &w, &z);
        assert!((k1 - k2.conj()).norm() < 1e-15);
    }

    #[test]
    fn normalized_kernel_examples() {
        let k0 = KernelVector::normalized(3.0, BallPoint::origin(2));
        assert_eq!(k0.scale, r(1.0));
        assert_eq!(k0.eval(&cvec(&[r(0.4), r(0.1)])), r(1.0));
        let ka = KernelVector::normalized(3.0, point(&[r(0.5), r(0.0)]));
        assert!((ka.scale - r(0.649_519_052_838_329)).norm() < 1e-12);
        let ip = inner_product(&ka, &ka).unwrap();
        assert!((ip - r(1.0)).norm() < 1e-14);
        assert!((ka.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inner_product_examples() {
        let z = point(&[c(0.2, 0.3), c(-0.4, 0.1)]);
        let w = point(&[c(0.1, -0.1), c(0.3, 0.3)]);
        let kz = KernelVector::kernel(1.5, z.clone());
        let k0 = KernelVector::kernel(1.5, BallPoint::origin(2));
        assert_eq!(inner_product(&kz, &k0).unwrap(), r(1.0));
        let diag = inner_product(&kz, &kz).unwrap();
        assert!((diag - r((1.0 - z.norm().powi(2)).powf(-1.5))).norm() < 1e-14);
        let kw = KernelVector::kernel(1.5, w.clone());
        let ip = inner_product(&kz, &kw).unwrap();
        assert_eq!(ip, kernel_eval(1.5, z.coords(), w.coords()));
        assert_eq!(ip, kz.eval(w.coords()));
        let other = KernelVector::kernel(2.0, w);
        assert_eq!(inner_product(&kz, &other), Err(Error::GammaMismatch(1.5, 2.0)));
    }

    #[test]
    fn series_expansion_agrees_with_closed_form() {
        let params = SpaceParams::new(2, 1.3, 30).unwrap();
        let basis = Basis::for_params(params).unwrap();
        let z = point(&[c(0.2, 0.1), c(-0.25, 0.1)]);
        let w = cvec(&[c(0.3, -0.1), c(0.1, 0.2)]);
        let k = KernelVector::kernel(1.3, z);
        let s = k.to_series(&basis).unwrap();
        let exact = k.eval(&w);
        assert!((s.eval(w.as_slice()).unwrap() - exact).norm() / exact.norm() < 1e-6);
        // the H_gamma norm of the truncation approaches the closed-form norm from below
        assert!(s.norm() <= k.norm() + 1e-12);
        assert!((s.norm() - k.norm()).abs() < 1e-6);
    }

    #[test]
    fn gram_matrix_is_positive_semidefinite() {
        let pts = sampling::ball_points(3, 12, 0.9);
        let g = CMatrix::from_fn(12, 12, |i, j| kernel_eval(2.0, &pts[j], &pts[i]));
        assert!(linalg::hermitian_defect(&g) < 1e-12);
        let herm = nalgebra::DMatrix::from_fn(12, 12, |i, j| (g[(i, j)] + g[(j, i)].conj()) * 0.5);
        let ev = herm.symmetric_eigenvalues();
        assert!(ev.iter().all(|e| *e > -1e-12));
    }

    #[test]
    fn reciprocal_identity_examples() {
        let id = LinearFractionalMap::identity(2);
        assert_eq!(check_reciprocal_identity(&id, 2.0).unwrap(), 0.0);
        let phi = LinearFractionalMap::moebius_involution(&point(&[c(0.4, 0.2), c(0.0, -0.3)]));
        assert!(check_reciprocal_identity(&phi, 2.5).unwrap() < 1e-10);
        let mut rng = sampling::rng_from_seed(5);
        let psi = sampling::random_automorphism(&mut rng, 3, 0.8);
        assert!(check_reciprocal_identity(&psi, 1.0).unwrap() < 1e-10);
        assert!(check_automorphism_identity(&psi).unwrap() < 1e-10);
        let half = LinearFractionalMap::linear(CMatrix::identity(2, 2) * r(0.5)).unwrap();
        assert_eq!(check_reciprocal_identity(&half, 1.0), Err(Error::NotAutomorphism));
    }

    #[test]
    fn kernel_transform_examples() {
        let a = point(&[r(0.3)]);
        let (r1, r2) = check_kernel_transform(&LinearFractionalMap::identity(1), 2.0, &a).unwrap();
        assert!(r1 < 1e-15 && r2 < 1e-15);
        let par = LinearFractionalMap::parabolic_1d(r(1.0)).unwrap();
        let (r1, r2) = check_kernel_transform(&par, 1.5, &a).unwrap();
        assert!(r1 < 1e-10 && r2 < 1e-10);
        let half = LinearFractionalMap::linear(CMatrix::identity(2, 2) * r(0.5)).unwrap();
        let (r1, r2) = check_kernel_transform(&half, 3.0, &point(&[c(0.1, 0.2), r(-0.4)])).unwrap();
        assert!(r1 < 1e-10 && r2 < 1e-10);
    }
}
