//! Triangular-orthogonal factorizations and Haar sampling on orthogonal groups.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// `M = R·Q` with `R` upper triangular (positive diagonal) and `Q` orthogonal.
#[derive(Debug, Clone)]
pub struct RqFactors {
    pub r: DMatrix<f64>,
    pub q: DMatrix<f64>,
    /// Diagonal of `R`.
    pub u: DVector<f64>,
    /// `log` of the diagonal of `R`.
    pub log_u: DVector<f64>,
}

/// `M = L·Q` with `L` lower triangular (positive diagonal) and `Q` orthogonal.
#[derive(Debug, Clone)]
pub struct LqFactors {
    pub l: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    Ok(m.nrows())
}

fn singular_threshold(m: &DMatrix<f64>) -> f64 {
    let scale = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    scale * f64::EPSILON * (m.nrows() as f64) * 16.0
}

/// Exchange matrix: ones on the anti-diagonal.
fn exchange(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if i + j == n - 1 { 1.0 } else { 0.0 })
}

/// RQ factorization through a reversed QR: `(J·M)ᵀ = q·r` gives
/// `M = (J·rᵀ·J)·(J·qᵀ)`, and `J·rᵀ·J` is upper triangular.
pub fn rq_decompose(m: &DMatrix<f64>) -> Result<RqFactors> {
    let n = check_square(m)?;
    let j = exchange(n);
    let qr = (&j * m).transpose().qr();
    let mut r = &j * qr.r().transpose() * &j;
    let mut q = &j * qr.q().transpose();
    let tol = singular_threshold(m);
    for k in 0..n {
        let d = r[(k, k)];
        if d.abs() <= tol || !d.is_finite() {
            return Err(Error::Singular);
        }
        if d < 0.0 {
            r.column_mut(k).neg_mut();
            q.row_mut(k).neg_mut();
        }
    }
    let u = r.diagonal();
    let log_u = u.map(f64::ln);
    Ok(RqFactors { r, q, u, log_u })
}

/// LQ factorization via the QR factorization of `Mᵀ`.
pub fn lq_decompose(m: &DMatrix<f64>) -> Result<LqFactors> {
    let n = check_square(m)?;
    let qr = m.transpose().qr();
    let mut l = qr.r().transpose();
    let mut q = qr.q().transpose();
    let tol = singular_threshold(m);
    for k in 0..n {
        let d = l[(k, k)];
        if d.abs() <= tol || !d.is_finite() {
            return Err(Error::Singular);
        }
        if d < 0.0 {
            l.column_mut(k).neg_mut();
            q.row_mut(k).neg_mut();
        }
    }
    Ok(LqFactors { l, q })
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// sign-of-diagonal correction. With `special`, one column is flipped when
/// needed so the result lies in `SO(n)`.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, special: bool, rng: &mut R) -> DMatrix<f64> {
    assert!(n >= 1, "haar_orthogonal needs n >= 1");
    let z = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    if special && q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Rotation in `SO(n)` mapping `e₁` to the unit vector `u` (`n ≥ 2`).
///
/// Product of the Householder reflection `e₁ ↦ u` and a reflection that
/// fixes `u`.
pub fn rotation_e1_to(u: &DVector<f64>) -> DMatrix<f64> {
    let n = u.len();
    let mut e1 = DVector::zeros(n);
    e1[0] = 1.0;
    let v = u - &e1;
    let vv = v.norm_squared();
    if vv < 1e-28 {
        return DMatrix::identity(n, n);
    }
    let house = DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / vv);
    // pick the coordinate axis least aligned with u, orthogonalize
    let k = (0..n)
        .min_by(|&a, &b| u[a].abs().partial_cmp(&u[b].abs()).unwrap())
        .unwrap_or(0);
    let mut w = DVector::zeros(n);
    w[k] = 1.0;
    w -= u * u[k];
    let w = w.normalize();
    let fix = DMatrix::identity(n, n) - (&w * w.transpose()) * 2.0;
    fix * house
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}
