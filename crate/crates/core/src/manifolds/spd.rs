//! Symmetric positive-definite matrices with the affine-invariant metric.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::linalg::max_abs;

const SYM_TOL: f64 = 1e-12;

/// A `d × d` symmetric positive-definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdPoint {
    s: DMatrix<f64>,
}

impl SpdPoint {
    pub fn new(s: DMatrix<f64>) -> Result<Self> {
        if s.nrows() != s.ncols() || s.nrows() == 0 {
            return Err(Error::InvalidPoint(format!(
                "SPD point must be square, got {}x{}",
                s.nrows(),
                s.ncols()
            )));
        }
        if s.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPoint("non-finite entry".into()));
        }
        let asym = max_abs(&(&s - s.transpose()));
        if asym > SYM_TOL * max_abs(&s).max(1.0) {
            return Err(Error::InvalidPoint(format!("matrix is not symmetric (|S - S^T| = {asym:e})")));
        }
        let s = (&s + s.transpose()) * 0.5;
        if s.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { s })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidPoint("SPD rows must form a square matrix".into()));
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn identity(d: usize) -> Self {
        Self {
            s: DMatrix::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.s.row(i).iter().copied().collect())
            .collect()
    }

    /// Lower-triangular Cholesky factor `C` with `C·Cᵀ = S`.
    pub fn cholesky_factor(&self) -> DMatrix<f64> {
        self.s
            .clone()
            .cholesky()
            .expect("validated at construction")
            .unpack()
    }

    pub(crate) fn from_matrix_unchecked(s: DMatrix<f64>) -> Self {
        Self {
            s: (&s + s.transpose()) * 0.5,
        }
    }
}

/// Eigenvalues of `S₁^{−1/2} S₂ S₁^{−1/2}`, computed as those of the
/// congruent matrix `C₁⁻¹ S₂ C₁⁻ᵀ`.
pub fn relative_eigenvalues(s1: &SpdPoint, s2: &SpdPoint) -> Result<Vec<f64>> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.dim(),
            got: s2.dim(),
        });
    }
    let c1 = s1.cholesky_factor();
    let c1_inv = c1
        .solve_lower_triangular(&DMatrix::identity(s1.dim(), s1.dim()))
        .ok_or(Error::Singular)?;
    let m = &c1_inv * s2.matrix() * c1_inv.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let eig = m.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&e| e <= 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(eig.eigenvalues.iter().copied().collect())
}

/// Affine-invariant distance `‖log(S₁^{−1/2} S₂ S₁^{−1/2})‖_F`.
pub fn dist_spd(s1: &SpdPoint, s2: &SpdPoint) -> Result<f64> {
    let eig = relative_eigenvalues(s1, s2)?;
    Ok(eig.iter().map(|e| e.ln().powi(2)).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    pub(crate) fn random_spd(d: usize, rng: &mut ChaCha8Rng) -> SpdPoint {
        let a = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
        SpdPoint::new(&a * a.transpose() + DMatrix::identity(d, d) * 0.2).unwrap()
    }

    #[test]
    fn distance_examples() {
        let i2 = SpdPoint::identity(2);
        assert_eq!(dist_spd(&i2, &i2).unwrap(), 0.0);
        let e = SpdPoint::new(DMatrix::identity(2, 2) * std::f64::consts::E).unwrap();
        assert!((dist_spd(&i2, &e).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid() {
        assert!(SpdPoint::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_err());
        assert!(SpdPoint::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0])).is_err());
    }

    #[test]
    fn affine_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let s1 = random_spd(3, &mut rng);
            let s2 = random_spd(3, &mut rng);
            let a = DMatrix::<f64>::from_fn(3, 3, |_, _| rng.sample(StandardNormal));
            let t1 = SpdPoint::new(&a * s1.matrix() * a.transpose()).unwrap();
            let t2 = SpdPoint::new(&a * s2.matrix() * a.transpose()).unwrap();
            let d0 = dist_spd(&s1, &s2).unwrap();
            assert!((dist_spd(&t1, &t2).unwrap() - d0).abs() < 1e-8);
            assert!((dist_spd(&s2, &s1).unwrap() - d0).abs() < 1e-9);
        }
    }

    #[test]
    fn triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let a = random_spd(2, &mut rng);
            let b = random_spd(2, &mut rng);
            let c = random_spd(2, &mut rng);
            let lhs = dist_spd(&a, &c).unwrap();
            let rhs = dist_spd(&a, &b).unwrap() + dist_spd(&b, &c).unwrap();
            assert!(lhs <= rhs + 1e-9);
        }
    }
}
