//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |acc, s| acc.max(*s))
}

/// Largest entry of |A* - A|.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs(&(m.adjoint() - m))
}

/// Largest entry of |A A* - A* A|.
pub fn normality_defect(m: &CMatrix) -> f64 {
    let adj = m.adjoint();
    max_abs(&(m * &adj - &adj * m))
}

/// M M* - M* M, computed through real and imaginary parts so that large products run on the
/// real matrix kernels.
pub fn self_commutator(m: &CMatrix) -> CMatrix {
    let x = m.map(|z| z.re);
    let y = m.map(|z| z.im);
    let (xt, yt) = (x.transpose(), y.transpose());
    // M M* = X X' + Y Y' + i (Y X' - X Y'),  M* M = X' X + Y' Y + i (X' Y - Y' X)
    let re = &x * &xt + &y * &yt - &xt * &x - &yt * &y;
    let im = &y * &xt - &x * &yt - &xt * &y + &yt * &x;
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)]))
}

/// Largest entry of |U* U - I|.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.ncols();
    max_abs(&(m.adjoint() * m - CMatrix::identity(n, n)))
}

/// Complex Schur decomposition M = Q T Q*, T upper triangular.
pub fn schur(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((m.clone(), m.clone()));
    }
    let s = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 10_000 * n.max(1))
        .ok_or_else(|| Error::LinearAlgebra("Schur iteration did not converge".into()))?;
    let (q, t) = s.unpack();
    Ok((q, t))
}

/// Eigenvalues, read off the diagonal of the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let (_, t) = schur(m)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Groups values that agree within `tol` (single linkage), returning one representative
/// (the cluster mean) per group.
pub fn cluster_values(values: &[Complex64], tol: f64) -> Vec<Complex64> {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &v in values {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|w| (w - v).norm() <= tol))
        {
            Some(g) => g.push(v),
            None => groups.push(vec![v]),
        }
    }
    groups
        .into_iter()
        .map(|g| g.iter().sum::<Complex64>() / g.len() as f64)
        .collect()
}

/// Orthonormal basis (as columns) of the numerical nullspace: right singular vectors whose
/// singular values are at most `rel_tol` times the largest one.
pub fn nullspace(m: &CMatrix, rel_tol: f64) -> Result<CMatrix> {
    let ncols = m.ncols();
    // Pad to a square matrix so nalgebra returns a full set of right singular vectors.
    let rows = m.nrows().max(ncols);
    let mut sq = CMatrix::zeros(rows, ncols);
    sq.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
    let svd = nalgebra::SVD::try_new(sq, false, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::LinearAlgebra("SVD did not converge".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::LinearAlgebra("SVD returned no right vectors".into()))?;
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, s| a.max(*s));
    let cutoff = rel_tol * smax.max(f64::MIN_POSITIVE);
    let cols: Vec<CVector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cutoff)
        .map(|(i, _)| v_t.row(i).adjoint())
        .collect();
    if cols.is_empty() {
        return Ok(CMatrix::zeros(ncols, 0));
    }
    Ok(CMatrix::from_columns(&cols))
}

/// Solves M x = b, failing on a numerically singular matrix.
pub fn solve(m: &CMatrix, b: &CVector) -> Result<CVector> {
    m.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::LinearAlgebra("singular linear system".into()))
}
