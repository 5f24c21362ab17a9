//! Multi-indices, the graded monomial ordering, and the H_gamma weights of the monomial basis.
//!
//! The reproducing kernel (1 - <w,z>)^(-gamma) expands as sum_m c_m w^m conj(z)^m with
//! c_m = Gamma(gamma + |m|) / (Gamma(gamma) m!), so ||z^m||^2 = 1 / c_m and the rescaled
//! monomials sqrt(c_m) z^m form an orthonormal basis.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Exponent vector m in N_0^n.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit multi-index e_j.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree |m|.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&k| (1..=k).map(f64::from).product::<f64>())
            .product()
    }
}

impl std::ops::Index<usize> for MultiIndex {
    type Output = u32;
    fn index(&self, j: usize) -> &u32 {
        &self.0[j]
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Working model of H_gamma: dimension n, kernel exponent gamma, truncation degree D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceParams {
    pub n: usize,
    pub gamma: f64,
    pub degree_cap: u32,
}

impl SpaceParams {
    pub fn new(n: usize, gamma: f64, degree_cap: u32) -> Result<Self> {
        let p = SpaceParams {
            n,
            gamma,
            degree_cap,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("dimension n must be at least 1".into()));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParams(format!(
                "gamma must be a positive real (got {})",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Number of multi-indices with |m| <= D, i.e. C(n + D, n).
    pub fn basis_len(&self) -> usize {
        binomial(self.n as u64 + u64::from(self.degree_cap), self.n as u64) as usize
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of ways to write `total` as an ordered sum of `parts` non-negative integers.
fn compositions(parts: usize, total: u32) -> u64 {
    if parts == 0 {
        return u64::from(total == 0);
    }
    binomial(u64::from(total) + parts as u64 - 1, parts as u64 - 1)
}

/// All m with |m| <= D, sorted by total degree and then lexicographically with the
/// first exponent most significant and larger exponents first: (0,0), (1,0), (0,1), (2,0), ...
pub fn enumerate_multiindices(n: usize, degree_cap: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut buf = vec![0u32; n];
    for d in 0..=degree_cap {
        push_degree(&mut out, &mut buf, 0, d);
    }
    out
}

fn push_degree(out: &mut Vec<MultiIndex>, buf: &mut [u32], pos: usize, remaining: u32) {
    if pos + 1 == buf.len() {
        buf[pos] = remaining;
        out.push(MultiIndex(buf.to_vec()));
        return;
    }
    for v in (0..=remaining).rev() {
        buf[pos] = v;
        push_degree(out, buf, pos + 1, remaining - v);
    }
}

/// Coefficient c_m of w^m conj(z)^m in (1 - <w,z>)^(-gamma).
///
/// Built from the recurrence c_{m+e_j} (m_j + 1) = c_m (gamma + |m|) rather than from Gamma
/// functions; signals [`Error::Range`] instead of returning infinity.
pub fn kernel_coefficient(m: &MultiIndex, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParams(format!("gamma must be positive (got {gamma})")));
    }
    let mut c = 1.0f64;
    let mut deg = 0u32;
    for &mj in m.exponents() {
        for t in 0..mj {
            c *= (gamma + f64::from(deg)) / f64::from(t + 1);
            deg += 1;
        }
    }
    if !c.is_finite() || c == 0.0 {
        return Err(Error::Range(format!("kernel coefficient for {m:?}, gamma = {gamma}")));
    }
    Ok(c)
}

/// ||z^m||^2 in H_gamma.
pub fn monomial_norm_sq(m: &MultiIndex, gamma: f64) -> Result<f64> {
    Ok(1.0 / kernel_coefficient(m, gamma)?)
}

/// Shared index machinery for one [`SpaceParams`]: the ordered multi-indices, rank lookup,
/// kernel weights, and the table of sums i + j used by series multiplication.
pub struct Basis {
    params: SpaceParams,
    indices: Vec<MultiIndex>,
    degrees: Vec<u32>,
    /// degree_start[k] is the position of the first index of degree k; has D + 2 entries.
    degree_start: Vec<usize>,
    /// (parent position, variable) with parent + e_var = this index; unused for the zero index.
    parents: Vec<(usize, usize)>,
    kernel_coeffs: Vec<f64>,
    sums: OnceLock<Vec<Vec<u32>>>,
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Basis")
            .field("params", &self.params)
            .field("len", &self.indices.len())
            .finish()
    }
}

type BasisKey = (usize, u64, u32);

fn basis_cache() -> &'static Mutex<HashMap<BasisKey, Arc<Basis>>> {
    static CACHE: OnceLock<Mutex<HashMap<BasisKey, Arc<Basis>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Basis {
    /// Shared basis for `params`; repeated calls with equal parameters return the same `Arc`.
    pub fn for_params(params: SpaceParams) -> Result<Arc<Basis>> {
        params.validate()?;
        let key = (params.n, params.gamma.to_bits(), params.degree_cap);
        if let Some(b) = basis_cache().lock().unwrap().get(&key) {
            return Ok(Arc::clone(b));
        }
        let basis = Arc::new(Basis::build(params)?);
        basis_cache()
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| Arc::clone(&basis));
        Ok(basis)
    }

    fn build(params: SpaceParams) -> Result<Basis> {
        let n = params.n;
        let dcap = params.degree_cap;
        let indices = enumerate_multiindices(n, dcap);
        let degrees: Vec<u32> = indices.iter().map(MultiIndex::degree).collect();
        let mut degree_start = vec![0usize; dcap as usize + 2];
        for k in 0..=dcap as usize {
            degree_start[k + 1] = degree_start[k] + compositions(n, k as u32) as usize;
        }
        let mut basis = Basis {
            params,
            indices,
            degrees,
            degree_start,
            parents: Vec::new(),
            kernel_coeffs: Vec::new(),
            sums: OnceLock::new(),
        };
        let len = basis.indices.len();
        let mut parents = vec![(0usize, 0usize); len];
        let mut coeffs = vec![1.0f64; len];
        for pos in 1..len {
            let m = &basis.indices[pos];
            let var = (0..n).rev().find(|&j| m[j] > 0).unwrap();
            let mut e = m.0.clone();
            e[var] -= 1;
            let parent = basis.rank_exponents(&e);
            parents[pos] = (parent, var);
            let parent_deg = f64::from(basis.degrees[parent]);
            let c = coeffs[parent] * (params.gamma + parent_deg) / f64::from(m[var]);
            if !c.is_finite() || c == 0.0 {
                return Err(Error::Range(format!(
                    "kernel coefficient for {m:?}, gamma = {}",
                    params.gamma
                )));
            }
            coeffs[pos] = c;
        }
        basis.parents = parents;
        basis.kernel_coeffs = coeffs;
        Ok(basis)
    }

    pub fn params(&self) -> SpaceParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn degree_cap(&self) -> u32 {
        self.params.degree_cap
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index(&self, pos: usize) -> &MultiIndex {
        &self.indices[pos]
    }

    pub fn degree(&self, pos: usize) -> u32 {
        self.degrees[pos]
    }

    /// Positions of all indices of total degree `k`.
    pub fn degree_range(&self, k: u32) -> std::ops::Range<usize> {
        let k = k as usize;
        self.degree_start[k]..self.degree_start[k + 1]
    }

    /// Positions of all indices of total degree at most `k` (a prefix of the ordering).
    pub fn up_to_degree(&self, k: u32) -> std::ops::Range<usize> {
        0..self.degree_start[k.min(self.degree_cap()) as usize + 1]
    }

    /// (parent position, variable j) with parent + e_j equal to the index at `pos` (pos > 0).
    pub fn parent(&self, pos: usize) -> (usize, usize) {
        self.parents[pos]
    }

    /// c_m for every position.
    pub fn kernel_coeffs(&self) -> &[f64] {
        &self.kernel_coeffs
    }

    /// Position of `m` in the ordering, or `None` if |m| > D or the dimension differs.
    pub fn rank(&self, m: &MultiIndex) -> Option<usize> {
        if m.dim() != self.n() || m.degree() > self.degree_cap() {
            return None;
        }
        Some(self.rank_exponents(m.exponents()))
    }

    fn rank_exponents(&self, m: &[u32]) -> usize {
        let n = m.len();
        let d: u32 = m.iter().sum();
        let mut pos = self.degree_start[d as usize] as u64;
        let mut remaining = d;
        for j in 0..n.saturating_sub(1) {
            for v in (m[j] + 1)..=remaining {
                pos += compositions(n - j - 1, remaining - v);
            }
            remaining -= m[j];
        }
        pos as usize
    }

    /// For each position i, the positions of i + j for every j in `up_to_degree(D - |i|)`.
    pub(crate) fn sums(&self) -> &[Vec<u32>] {
        self.sums.get_or_init(|| {
            let dcap = self.degree_cap();
            let mut buf = vec![0u32; self.n()];
            self.indices
                .iter()
                .enumerate()
                .map(|(i, mi)| {
                    let room = dcap - self.degrees[i];
                    self.up_to_degree(room)
                        .map(|j| {
                            for (b, (x, y)) in buf.iter_mut().zip(mi.0.iter().zip(&self.indices[j].0)) {
                                *b = x + y;
                            }
                            self.rank_exponents(&buf) as u32
                        })
                        .collect()
                })
                .collect()
        })
    }
}
