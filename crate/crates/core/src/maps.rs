//! Linear fractional maps of the unit ball.
//!
//! A map phi(z) = (Az + B) / (<z, C> + d) is stored through its projective matrix
//! [[A, B], [C*, d]], scaled so that d = 1. Composition of maps is matrix multiplication.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::sampling::SphereSampler;

/// Default number of boundary samples used by [`LinearFractionalMap::is_self_map`].
pub const DEFAULT_SELF_MAP_SAMPLES: usize = 4096;
/// Slack allowed on sup |phi| before a map is rejected as a self-map.
pub const SELF_MAP_TOL: f64 = 1e-9;
/// Tolerance for projective identity checks in the automorphism test.
pub const PROJECTIVE_TOL: f64 = 1e-9;
/// Denominators smaller than this are treated as vanishing.
pub const DENOMINATOR_TOL: f64 = 1e-12;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A point of the open unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint(CVector);

impl BallPoint {
    pub fn new(coords: CVector) -> Result<Self> {
        let r = coords.norm();
        if !(r < 1.0) {
            return Err(Error::NotInBall(r));
        }
        Ok(BallPoint(coords))
    }

    pub fn from_slice(coords: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(coords))
    }

    pub fn origin(n: usize) -> Self {
        BallPoint(CVector::zeros(n))
    }

    pub fn coords(&self) -> &CVector {
        &self.0
    }

    pub fn into_inner(self) -> CVector {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// <z, w> = sum_j z_j conj(w_j).
pub fn inner(z: &CVector, w: &CVector) -> Complex64 {
    w.dotc(z)
}

/// Result of the sampled self-map test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfMapCheck {
    pub is_self_map: bool,
    /// Largest |phi(z)| found over the closed ball.
    pub sup_norm: f64,
    /// 1 - sup_norm.
    pub margin: f64,
}

#[derive(Clone, PartialEq)]
pub struct LinearFractionalMap {
    a: CMatrix,
    b: CVector,
    c: CVector,
}

impl fmt::Debug for LinearFractionalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearFractionalMap")
            .field("a", &self.a.as_slice())
            .field("b", &self.b.as_slice())
            .field("c", &self.c.as_slice())
            .field("d", &ONE)
            .finish()
    }
}

impl LinearFractionalMap {
    /// Builds (Az + B) / (<z, C> + d), rejecting data with |d| <= |C|.
    pub fn new(a: CMatrix, b: CVector, c: CVector, d: Complex64) -> Result<Self> {
        let n = a.nrows();
        if n == 0 {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.ncols(),
            });
        }
        for v in [&b, &c] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
        }
        let finite = |x: &Complex64| x.re.is_finite() && x.im.is_finite();
        if !(a.iter().all(finite) && b.iter().all(finite) && c.iter().all(finite) && finite(&d)) {
            return Err(Error::InvalidParams("map data must be finite".into()));
        }
        let dn = d.norm();
        if dn - c.norm() <= DENOMINATOR_TOL * dn.max(1.0) {
            return Err(Error::DenominatorVanishes);
        }
        let inv = ONE / d;
        Ok(LinearFractionalMap {
            a: a * inv,
            b: b * inv,
            c: c * inv.conj(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::linear(CMatrix::identity(n, n)).expect("identity is well formed")
    }

    /// z -> Az.
    pub fn linear(a: CMatrix) -> Result<Self> {
        let n = a.nrows();
        Self::new(a, CVector::zeros(n), CVector::zeros(n), ONE)
    }

    /// The involutive automorphism exchanging 0 and a:
    /// (a - P_a z - s_a Q_a z) / (1 - <z, a>) with s_a = sqrt(1 - |a|^2).
    pub fn moebius_involution(a: &BallPoint) -> Self {
        let n = a.dim();
        let av = a.coords();
        let r2 = av.norm_squared();
        let s = (1.0 - r2).sqrt();
        let mut lin = CMatrix::identity(n, n) * Complex64::from(s);
        if r2 > 0.0 {
            let proj = av * av.adjoint() / Complex64::from(r2);
            lin += proj * Complex64::from(1.0 - s);
        }
        LinearFractionalMap {
            a: -lin,
            b: av.clone(),
            c: -av.clone(),
        }
    }

    /// One-variable parabolic family ((2 - t) z + t) / (-t z + 2 + t), Re t >= 0.
    pub fn parabolic_1d(t: Complex64) -> Result<Self> {
        if t.re < 0.0 {
            return Err(Error::NegativeParabolic(t.re));
        }
        Self::new(
            CMatrix::from_element(1, 1, 2.0 - t),
            CVector::from_element(1, t),
            CVector::from_element(1, -t.conj()),
            2.0 + t,
        )
    }

    /// Reads (A, B, C, d) back from a projective matrix [[A, B], [C*, d]].
    pub fn from_projective(m: &CMatrix) -> Result<Self> {
        let k = m.nrows();
        if k < 2 || m.ncols() != k {
            return Err(Error::DimensionMismatch {
                expected: k.max(2),
                got: m.ncols(),
            });
        }
        let n = k - 1;
        let a = m.view((0, 0), (n, n)).into_owned();
        let b = CVector::from_fn(n, |i, _| m[(i, n)]);
        let c = CVector::from_fn(n, |i, _| m[(n, i)].conj());
        Self::new(a, b, c, m[(n, n)])
    }

    pub fn projective_matrix(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&self.a);
        m.view_mut((0, n), (n, 1)).copy_from(&self.b);
        m.view_mut((n, 0), (1, n)).copy_from(&self.c.adjoint());
        m[(n, n)] = ONE;
        m
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CVector {
        &self.b
    }

    pub fn c(&self) -> &CVector {
        &self.c
    }

    /// Always 1 after normalization.
    pub fn d(&self) -> Complex64 {
        ONE
    }

    /// phi(0) = B / d.
    pub fn at_origin(&self) -> CVector {
        self.b.clone()
    }

    /// <z, C> + d.
    pub fn denominator(&self, z: &CVector) -> Complex64 {
        inner(z, &self.c) + ONE
    }

    /// (Az + B) / (<z, C> + d) for any z in C^n where the denominator is nonzero.
    pub fn apply(&self, z: &CVector) -> Result<CVector> {
        self.check_dim(z.len())?;
        let den = self.denominator(z);
        if den.norm() < DENOMINATOR_TOL {
            return Err(Error::DenominatorVanishes);
        }
        Ok((&self.a * z + &self.b) / den)
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            })
        } else {
            Ok(())
        }
    }

    /// self o other.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Self::from_projective(&(self.projective_matrix() * other.projective_matrix()))
    }

    /// sigma(z) = (A* z - C) / (-<z, B> + conj(d)).
    ///
    /// Fails only when |phi(0)| >= 1, in which case phi is not a self-map anyway.
    pub fn adjoint(&self) -> Result<Self> {
        Self::new(self.a.adjoint(), -&self.c, -&self.b, ONE)
    }

    /// Projective inverse; fails when the projective matrix is singular or the inverse's
    /// denominator can vanish on the closed ball.
    pub fn inverse(&self) -> Result<Self> {
        let inv = self
            .projective_matrix()
            .try_inverse()
            .ok_or_else(|| Error::LinearAlgebra("projective matrix is singular".into()))?;
        Self::from_projective(&inv)
    }

    /// Largest entry difference between the normalized data of the two maps.
    pub fn projective_distance(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        linalg::max_abs(&(self.projective_matrix() - other.projective_matrix()))
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.projective_distance(&Self::identity(self.dim())) <= tol
    }

    /// Complex Jacobian of phi at p by the quotient rule.
    pub fn jacobian_at(&self, p: &CVector) -> Result<CMatrix> {
        self.check_dim(p.len())?;
        let den = self.denominator(p);
        if den.norm() < DENOMINATOR_TOL {
            return Err(Error::DenominatorVanishes);
        }
        let num = &self.a * p + &self.b;
        Ok((&self.a * den - num * self.c.adjoint()) / (den * den))
    }

    /// Samples sup |phi| over the closed ball: `samples` low-discrepancy points on the sphere,
    /// an interior grid, and a local ascent from the worst boundary points.
    pub fn is_self_map(&self, samples: usize) -> SelfMapCheck {
        let n = self.dim();
        let mut sampler = SphereSampler::new(n);
        let samples = samples.max(1);
        let mut scored: Vec<(f64, CVector)> = Vec::with_capacity(samples);
        let mut sup = 0.0_f64;
        let eval = |z: &CVector| -> f64 {
            match self.apply(z) {
                Ok(w) => w.norm(),
                Err(_) => f64::INFINITY,
            }
        };
        for _ in 0..samples {
            let z = sampler.next_point();
            let v = eval(&z);
            sup = sup.max(v);
            scored.push((v, z));
        }
        for (_, z) in scored.iter().take(256) {
            for r in [0.0, 0.25, 0.5, 0.75] {
                sup = sup.max(eval(&(z * Complex64::from(r))));
            }
        }
        scored.sort_by(|x, y| y.0.total_cmp(&x.0));
        for (v, z) in scored.into_iter().take(8) {
            if v.is_finite() {
                sup = sup.max(hill_climb(z, v, &eval));
            }
        }
        SelfMapCheck {
            is_self_map: sup <= 1.0 + SELF_MAP_TOL,
            sup_norm: sup,
            margin: 1.0 - sup,
        }
    }

    /// True when phi has a projective inverse that is again a self-map, with both composites
    /// projectively equal to the identity.
    pub fn is_automorphism(&self) -> bool {
        self.automorphism_inverse(DEFAULT_SELF_MAP_SAMPLES).is_some()
    }

    /// The inverse map when phi is an automorphism.
    pub fn automorphism_inverse(&self, samples: usize) -> Option<Self> {
        let inv = self.inverse().ok()?;
        if !self.is_self_map(samples).is_self_map || !inv.is_self_map(samples).is_self_map {
            return None;
        }
        let left = self.compose(&inv).ok()?;
        let right = inv.compose(self).ok()?;
        (left.is_identity(PROJECTIVE_TOL) && right.is_identity(PROJECTIVE_TOL)).then_some(inv)
    }

    /// All fixed points of phi in C^n that come from eigenvectors of the projective matrix with
    /// nonzero last coordinate, each refined by Newton steps.
    pub fn fixed_points(&self) -> Result<Vec<CVector>> {
        let m = self.projective_matrix();
        let scale = linalg::operator_norm(&m);
        let eigs = linalg::eigenvalues(&m)?;
        let emax = eigs.iter().fold(0.0_f64, |a, e| a.max(e.norm()));
        let n = self.dim();
        let mut out: Vec<CVector> = Vec::new();
        for mu in linalg::cluster_values(&eigs, 1e-6 * emax.max(1e-300)) {
            let shifted = &m - CMatrix::identity(n + 1, n + 1) * mu;
            let mut ns = linalg::nullspace(&shifted, 1e-7)?;
            if ns.ncols() == 0 {
                // Defective clusters can sit just above the cutoff; take the weakest direction.
                ns = weakest_direction(&shifted)?;
            }
            let last = ns.row(n).into_owned();
            let r2 = last.norm_squared();
            if r2 <= 1e-24 * scale.max(1.0) {
                continue;
            }
            // Minimal-norm combination with last coordinate 1.
            let v = &ns * last.adjoint() / Complex64::from(r2);
            let p = v.rows(0, n).into_owned();
            let p = self.newton_refine(p);
            if !out.iter().any(|q| (q - &p).norm() < 1e-9) {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// A fixed point with |p| < 1 - 1e-8 and residual at most 1e-9, preferring the one closest
    /// to the origin.
    pub fn fixed_point_in_ball(&self) -> Option<BallPoint> {
        let mut best: Option<CVector> = None;
        for p in self.fixed_points().ok()? {
            if p.norm() >= 1.0 - 1e-8 {
                continue;
            }
            let Ok(img) = self.apply(&p) else { continue };
            if (img - &p).norm() > 1e-9 {
                continue;
            }
            if best.as_ref().is_none_or(|q| p.norm() < q.norm()) {
                best = Some(p);
            }
        }
        best.and_then(|p| BallPoint::new(p).ok())
    }

    fn newton_refine(&self, mut p: CVector) -> CVector {
        let n = self.dim();
        let residual = |p: &CVector| self.apply(p).map(|w| (w - p).norm()).unwrap_or(f64::INFINITY);
        let mut res = residual(&p);
        for _ in 0..4 {
            if res == 0.0 || !res.is_finite() {
                break;
            }
            let Ok(j) = self.jacobian_at(&p) else { break };
            let Ok(w) = self.apply(&p) else { break };
            let Ok(step) = linalg::solve(&(j - CMatrix::identity(n, n)), &(w - &p)) else {
                break;
            };
            let cand = &p - step;
            let r = residual(&cand);
            if r < res {
                p = cand;
                res = r;
            } else {
                break;
            }
        }
        p
    }
}

fn weakest_direction(m: &CMatrix) -> Result<CMatrix> {
    let svd = nalgebra::SVD::try_new(m.clone(), false, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::LinearAlgebra("SVD did not converge".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::LinearAlgebra("SVD returned no right vectors".into()))?;
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc });
    Ok(CMatrix::from_columns(&[v_t.row(imin).adjoint()]))
}

/// Deterministic ascent of |phi| along the sphere, with step halving.
fn hill_climb<F: Fn(&CVector) -> f64>(mut z: CVector, mut best: f64, eval: &F) -> f64 {
    let n = z.len();
    let mut h = 0.05;
    let dirs = [ONE, Complex64::new(0.0, 1.0)];
    let mut iters = 0;
    while h > 1e-12 && iters < 400 {
        iters += 1;
        let mut improved = false;
        'search: for j in 0..n {
            for dir in dirs {
                for sign in [1.0, -1.0] {
                    let mut cand = z.clone();
                    cand[j] += dir * (sign * h);
                    let norm = cand.norm();
                    if norm == 0.0 {
                        continue;
                    }
                    cand /= Complex64::from(norm);
                    let v = eval(&cand);
                    if v > best {
                        best = v;
                        z = cand;
                        improved = true;
                        break 'search;
                    }
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    best
}

/// Helper for callers holding plain slices.
pub fn cvec(v: &[Complex64]) -> CVector {
    CVector::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(x: f64) -> Complex64 {
        c(x, 0.0)
    }

    fn map1(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> LinearFractionalMap {
        LinearFractionalMap::new(
            CMatrix::from_element(1, 1, a),
            CVector::from_element(1, b),
            CVector::from_element(1, cc),
            d,
        )
        .unwrap()
    }

    fn point(v: &[Complex64]) -> BallPoint {
        BallPoint::from_slice(v).unwrap()
    }

    #[test]
    fn rejects_bad_denominator() {
        let e = LinearFractionalMap::new(
            CMatrix::identity(1, 1),
            CVector::zeros(1),
            CVector::from_element(1, r(2.0)),
            r(1.0),
        );
        assert_eq!(e, Err(Error::DenominatorVanishes));
        assert_eq!(e.unwrap_err().to_string(), "denominator may vanish on the closed ball");
        assert!(BallPoint::from_slice(&[r(1.0)]).is_err());
    }

    #[test]
    fn apply_examples() {
        let z = cvec(&[c(0.3, 0.1), c(-0.2, 0.4)]);
        assert_eq!(LinearFractionalMap::identity(2).apply(&z).unwrap(), z);
        let phi0 = LinearFractionalMap::moebius_involution(&BallPoint::origin(2));
        assert!((phi0.apply(&z).unwrap() + &z).norm() < 1e-16);
        let par = LinearFractionalMap::parabolic_1d(r(1.0)).unwrap();
        assert!((par.apply(&cvec(&[r(1.0)])).unwrap()[0] - r(1.0)).norm() < 1e-15);
        // (z + 1) / (-z + 3) at z = 0.5 is 0.6
        assert!((par.apply(&cvec(&[r(0.5)])).unwrap()[0] - r(0.6)).norm() < 1e-15);
    }

    #[test]
    fn moebius_one_dimensional() {
        let phi = LinearFractionalMap::moebius_involution(&point(&[r(0.5)]));
        let expected = map1(r(-1.0), r(0.5), r(-0.5), r(1.0));
        assert!(phi.projective_distance(&expected) < 1e-15);
        assert!((phi.apply(&cvec(&[r(0.0)])).unwrap()[0] - r(0.5)).norm() < 1e-15);
        assert!(phi.apply(&cvec(&[r(0.5)])).unwrap()[0].norm() < 1e-15);
    }

    #[test]
    fn moebius_swaps_and_involutes() {
        let a = point(&[c(0.3, -0.2), c(0.1, 0.5), c(-0.25, 0.0)]);
        let phi = LinearFractionalMap::moebius_involution(&a);
        assert!((phi.apply(&CVector::zeros(3)).unwrap() - a.coords()).norm() < 1e-15);
        assert!(phi.apply(a.coords()).unwrap().norm() < 1e-15);
        assert!(phi.compose(&phi).unwrap().is_identity(1e-14));
        assert!(phi.adjoint().unwrap().projective_distance(&phi) < 1e-15);
    }

    #[test]
    fn composition_examples() {
        let phi = map1(c(0.4, 0.1), r(0.2), c(0.1, -0.3), r(1.2));
        let id = LinearFractionalMap::identity(1);
        assert!(phi.compose(&id).unwrap().projective_distance(&phi) < 1e-15);
        let par = LinearFractionalMap::parabolic_1d(r(1.0)).unwrap();
        // [[1, 1], [-1, 3]]^2 = [[0, 4], [-4, 8]], i.e. 1 / (2 - z)
        let sq = par.compose(&par).unwrap();
        assert!(sq.projective_distance(&map1(r(0.0), r(1.0), r(-1.0), r(2.0))) < 1e-15);
        assert!((sq.apply(&cvec(&[r(0.5)])).unwrap()[0] - r(1.0 / 1.5)).norm() < 1e-15);
    }

    #[test]
    fn adjoint_examples() {
        let par = LinearFractionalMap::parabolic_1d(r(1.0)).unwrap();
        assert!(par.adjoint().unwrap().projective_distance(&par) < 1e-15);
        let phi = map1(c(0.4, 0.1), c(0.2, 0.1), c(0.1, -0.3), c(1.2, 0.5));
        let sigma = phi.adjoint().unwrap();
        // sigma(z) = (conj(a) z - conj(c)) / (-conj(b) z + conj(d)) in the (a, b, c, d) convention
        let (a, b, cc, d) = (c(0.4, 0.1), c(0.2, 0.1), c(0.1, 0.3), c(1.2, 0.5));
        let z = c(0.3, -0.4);
        let want = (a.conj() * z - cc.conj()) / (-b.conj() * z + d.conj());
        assert!((sigma.apply(&cvec(&[z])).unwrap()[0] - want).norm() < 1e-15);
        assert!(sigma.adjoint().unwrap().projective_distance(&phi) < 1e-15);
    }

    #[test]
    fn self_map_examples() {
        let id = LinearFractionalMap::identity(2).is_self_map(DEFAULT_SELF_MAP_SAMPLES);
        assert!(id.is_self_map);
        assert!(id.margin.abs() < 1e-12);
        let phi = LinearFractionalMap::moebius_involution(&point(&[c(0.6, 0.1), c(0.0, -0.3)]));
        assert!(phi.is_self_map(DEFAULT_SELF_MAP_SAMPLES).is_self_map);
        let dbl = LinearFractionalMap::linear(CMatrix::from_element(1, 1, r(2.0))).unwrap();
        let chk = dbl.is_self_map(DEFAULT_SELF_MAP_SAMPLES);
        assert!(!chk.is_self_map);
        assert!((chk.sup_norm - 2.0).abs() < 1e-9);
        let half = LinearFractionalMap::linear(CMatrix::identity(3, 3) * r(0.5)).unwrap();
        assert!((half.is_self_map(64).margin - 0.5).abs() < 1e-9);
    }

    #[test]
    fn self_map_ascent_finds_narrow_excess() {
        // Slightly too large in one rotated direction only.
        let u = CMatrix::from_row_slice(2, 2, &[r(0.6), r(-0.8), r(0.8), r(0.6)]);
        let diag = CMatrix::from_diagonal(&cvec(&[r(1.0 + 1e-6), r(0.2)]));
        let phi = LinearFractionalMap::linear(&u * diag * u.adjoint()).unwrap();
        let chk = phi.is_self_map(256);
        assert!(!chk.is_self_map);
        assert!((chk.sup_norm - (1.0 + 1e-6)).abs() < 1e-9);
    }

    #[test]
    fn automorphism_examples() {
        let phi = LinearFractionalMap::moebius_involution(&point(&[c(0.2, 0.3), r(-0.4)]));
        assert!(phi.is_automorphism());
        let v = CMatrix::from_row_slice(2, 2, &[r(0.0), c(0.0, 1.0), r(1.0), r(0.0)]);
        assert!(LinearFractionalMap::linear(v).unwrap().is_automorphism());
        let half = LinearFractionalMap::linear(CMatrix::from_element(1, 1, r(0.5))).unwrap();
        assert!(!half.is_automorphism());
        let singular = LinearFractionalMap::linear(CMatrix::zeros(2, 2)).unwrap();
        assert!(!singular.is_automorphism());
    }

    #[test]
    fn fixed_point_examples() {
        let a = CMatrix::from_row_slice(2, 2, &[r(0.3), c(0.1, 0.2), r(0.0), c(-0.2, 0.1)]);
        let lin = LinearFractionalMap::linear(a).unwrap();
        assert!(lin.fixed_point_in_ball().unwrap().norm() < 1e-14);

        let phi = LinearFractionalMap::moebius_involution(&point(&[r(0.5)]));
        let p = phi.fixed_point_in_ball().unwrap();
        // 0.5 p^2 - 2 p + 0.5 = 0, root inside the disc
        let want = 2.0 - 3.0_f64.sqrt();
        assert!((p.coords()[0] - r(want)).norm() < 1e-12);

        let par = LinearFractionalMap::parabolic_1d(r(1.0)).unwrap();
        assert!(par.fixed_point_in_ball().is_none());
        let pts = par.fixed_points().unwrap();
        assert!(pts.iter().any(|q| (q[0] - r(1.0)).norm() < 1e-6));
    }

    #[test]
    fn fixed_point_of_identity_is_origin() {
        let id = LinearFractionalMap::identity(3);
        assert!(id.fixed_point_in_ball().unwrap().norm() < 1e-15);
    }

    #[test]
    fn jacobian_examples() {
        let p = cvec(&[c(0.1, 0.2), r(-0.3)]);
        let id = LinearFractionalMap::identity(2);
        assert!(linalg::max_abs(&(id.jacobian_at(&p).unwrap() - CMatrix::identity(2, 2))) < 1e-16);
        let a = CMatrix::from_row_slice(2, 2, &[r(0.3), c(0.1, 0.2), r(0.0), c(-0.2, 0.1)]);
        let lin = LinearFractionalMap::linear(a.clone()).unwrap();
        assert_eq!(lin.jacobian_at(&CVector::zeros(2)).unwrap(), a);

        let bp = point(&[c(0.3, -0.1), c(0.2, 0.4)]);
        let phi = LinearFractionalMap::moebius_involution(&bp);
        let prod = phi.jacobian_at(&CVector::zeros(2)).unwrap() * phi.jacobian_at(bp.coords()).unwrap();
        assert!(linalg::max_abs(&(prod - CMatrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let phi = LinearFractionalMap::new(
            CMatrix::from_row_slice(2, 2, &[c(0.3, 0.1), r(0.2), c(0.0, -0.1), r(0.4)]),
            cvec(&[r(0.1), c(0.0, 0.2)]),
            cvec(&[c(0.2, 0.1), r(-0.3)]),
            r(1.1),
        )
        .unwrap();
        let p = cvec(&[c(0.2, -0.1), c(0.1, 0.3)]);
        let j = phi.jacobian_at(&p).unwrap();
        let h = 1e-6;
        for k in 0..2 {
            let mut dp = CVector::zeros(2);
            dp[k] = r(h);
            let fd = (phi.apply(&(&p + &dp)).unwrap() - phi.apply(&(&p - &dp)).unwrap()) / r(2.0 * h);
            assert!((fd - j.column(k)).norm() < 1e-9);
        }
    }
}
