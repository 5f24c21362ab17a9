//! Deterministic point sets and seeded random generators for maps, matrices and points.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, CVector};
use crate::maps::{BallPoint, LinearFractionalMap};

/// The project-wide RNG: ChaCha8 seeded from a u64.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Halton points mapped onto the unit sphere of C^n (Box-Muller, then normalization).
pub struct SphereSampler {
    primes: Vec<u64>,
    index: u64,
}

impl SphereSampler {
    pub fn new(n: usize) -> Self {
        SphereSampler {
            primes: first_primes(2 * n + 1),
            index: 0,
        }
    }

    fn next_uniforms(&mut self) -> Vec<f64> {
        self.index += 1;
        self.primes
            .iter()
            .map(|&p| radical_inverse(self.index, p))
            .collect()
    }

    /// Next point on the sphere, plus one spare uniform in [0, 1) for radial placement.
    fn next_with_spare(&mut self) -> (CVector, f64) {
        loop {
            let u = self.next_uniforms();
            let n = (u.len() - 1) / 2;
            let z = CVector::from_fn(n, |j, _| {
                let r = (-2.0 * u[2 * j].ln()).sqrt();
                let theta = 2.0 * std::f64::consts::PI * u[2 * j + 1];
                Complex64::from_polar(r, theta)
            });
            let norm = z.norm();
            if norm > 0.0 && norm.is_finite() {
                return (z / Complex64::from(norm), u[2 * n]);
            }
        }
    }

    pub fn next_point(&mut self) -> CVector {
        self.next_with_spare().0
    }
}

/// `count` deterministic points of the sphere.
pub fn sphere_points(n: usize, count: usize) -> Vec<CVector> {
    let mut s = SphereSampler::new(n);
    (0..count).map(|_| s.next_point()).collect()
}

/// `count` deterministic points of the ball of radius `r_max`, roughly volume-uniform.
pub fn ball_points(n: usize, count: usize, r_max: f64) -> Vec<CVector> {
    let mut s = SphereSampler::new(n);
    (0..count)
        .map(|_| {
            let (z, u) = s.next_with_spare();
            z * Complex64::from(r_max * u.powf(1.0 / (2.0 * n as f64)))
        })
        .collect()
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    out
}

fn first_primes(k: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(k);
    let mut cand = 2u64;
    while out.len() < k {
        if out.iter().take_while(|p| *p * *p <= cand).all(|p| !cand.is_multiple_of(*p)) {
            out.push(cand);
        }
        cand += 1;
    }
    out
}

pub fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Uniform point of the disc |z| <= r_max.
pub fn random_in_disc<R: Rng + ?Sized>(rng: &mut R, r_max: f64) -> Complex64 {
    let r = r_max * rng.random::<f64>().sqrt();
    let t = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    Complex64::from_polar(r, t)
}

/// Complex number with modulus uniform in [r_min, r_max] and uniform argument.
pub fn random_annulus<R: Rng + ?Sized>(rng: &mut R, r_min: f64, r_max: f64) -> Complex64 {
    let r = rng.random_range(r_min..=r_max);
    let t = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    Complex64::from_polar(r, t)
}

/// Volume-uniform point of the ball of radius r_max.
pub fn random_ball_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, r_max: f64) -> CVector {
    let g = CVector::from_fn(n, |_, _| standard_complex(rng));
    let norm = g.norm().max(f64::MIN_POSITIVE);
    let r = r_max * rng.random::<f64>().powf(1.0 / (2.0 * n as f64));
    g * Complex64::from(r / norm)
}

pub fn random_ball_point<R: Rng + ?Sized>(rng: &mut R, n: usize, r_max: f64) -> BallPoint {
    BallPoint::new(random_ball_vector(rng, n, r_max.min(1.0 - 1e-12))).expect("radius below one")
}

/// Haar-distributed unitary matrix (QR of a Ginibre matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| standard_complex(rng));
    let (q, r) = g.qr().unpack();
    let phases = CVector::from_fn(n, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    });
    q * CMatrix::from_diagonal(&phases)
}

/// U diag(lambda) U* with eigenvalues uniform in the disc of radius `max_modulus`.
pub fn random_normal_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, max_modulus: f64) -> CMatrix {
    let u = random_unitary(rng, n);
    let lam = CVector::from_fn(n, |_, _| random_in_disc(rng, max_modulus));
    &u * CMatrix::from_diagonal(&lam) * u.adjoint()
}

/// Hermitian matrix with eigenvalues uniform in [-max_norm, max_norm].
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, max_norm: f64) -> CMatrix {
    let u = random_unitary(rng, n);
    let lam = CVector::from_fn(n, |_, _| Complex64::from(rng.random_range(-max_norm..=max_norm)));
    &u * CMatrix::from_diagonal(&lam) * u.adjoint()
}

/// Matrix with operator norm at most `max_norm` (random singular values, random unitaries).
pub fn random_contraction<R: Rng + ?Sized>(rng: &mut R, n: usize, max_norm: f64) -> CMatrix {
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    let s = CVector::from_fn(n, |_, _| Complex64::from(max_norm * rng.random::<f64>()));
    &u * CMatrix::from_diagonal(&s) * v.adjoint()
}

/// phi_b o V for a random unitary V and |b| <= r_max.
pub fn random_automorphism<R: Rng + ?Sized>(rng: &mut R, n: usize, r_max: f64) -> LinearFractionalMap {
    let b = random_ball_point(rng, n, r_max);
    let v = LinearFractionalMap::linear(random_unitary(rng, n)).expect("unitary map is well formed");
    LinearFractionalMap::moebius_involution(&b)
        .compose(&v)
        .expect("automorphisms compose")
}

/// phi_b o (z -> Tz) o phi_c with ||T|| <= t_max < 1: a linear fractional self-map whose image
/// stays a fixed distance inside the ball.
pub fn random_contractive_lfm<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    r_max: f64,
    t_max: f64,
) -> LinearFractionalMap {
    let b = random_ball_point(rng, n, r_max);
    let c = random_ball_point(rng, n, r_max);
    let t = LinearFractionalMap::linear(random_contraction(rng, n, t_max)).expect("well formed");
    LinearFractionalMap::moebius_involution(&b)
        .compose(&t)
        .and_then(|m| m.compose(&LinearFractionalMap::moebius_involution(&c)))
        .expect("self-maps compose")
}
