//! Harish-Chandra c-functions and the polynomial parts of `|c(λ)|⁻²` on `H_n`.

use std::f64::consts::PI;

use super::SpectralPoint;
use crate::error::{Error, Result};
use crate::manifolds::Space;

/// Coefficients (indexed by power of `|λ|`) of the polynomial part of
/// `|c(λ)|⁻²` on `H_n`: `|λ|·Π_{j=2}^{m}(λ² + (2j−3)²/4)` for `n = 2m`,
/// `Π_{j=0}^{m−1}(λ² + j²)` for `n = 2m+1`. All values are dyadic rationals
/// of moderate size and are exact in `f64`.
pub fn hyp_polynomial_coeffs(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("H_n needs n >= 2, got {n}")));
    }
    let (mut poly, roots): (Vec<f64>, Vec<f64>) = if n % 2 == 0 {
        let m = n / 2;
        (vec![0.0, 1.0], (2..=m).map(|j| (2.0 * j as f64 - 3.0).powi(2) / 4.0).collect())
    } else {
        let m = (n - 1) / 2;
        (vec![1.0], (0..m).map(|j| (j * j) as f64).collect())
    };
    for c in roots {
        // multiply by (λ² + c)
        let mut next = vec![0.0; poly.len() + 2];
        for (k, &a) in poly.iter().enumerate() {
            next[k] += c * a;
            next[k + 2] += a;
        }
        poly = next;
    }
    Ok(poly)
}

/// `|c(λ)|⁻²` on `H_n`, unnormalized.
pub fn c_inv_sq_hyp(lambda: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("H_n needs n >= 2, got {n}")));
    }
    let l = lambda.abs();
    let l2 = l * l;
    Ok(if n % 2 == 0 {
        let m = n / 2;
        let poly: f64 = (2..=m).map(|j| l2 + (2.0 * j as f64 - 3.0).powi(2) / 4.0).product();
        l * (PI * l).tanh() * poly
    } else {
        let m = (n - 1) / 2;
        (0..m).map(|j| l2 + (j * j) as f64).product()
    })
}

/// Factor contributed by one root `δ = λ_i − λ_j` on `SPD(d)`:
/// `π|δ|·tanh(π|δ|/2)`.
pub(crate) fn spd_root_factor(delta: f64) -> f64 {
    let x = PI * delta.abs();
    x * (0.5 * x).tanh()
}

/// `|c(λ)|⁻² = Π_{i<j} π|λ_i−λ_j|·tanh(π|λ_i−λ_j|/2)` on `SPD(d)`.
pub fn c_inv_sq_spd(lambda: &[f64]) -> Result<f64> {
    if lambda.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "SPD(d) needs d >= 2, got {}",
            lambda.len()
        )));
    }
    let mut p = 1.0;
    for i in 0..lambda.len() {
        for j in i + 1..lambda.len() {
            p *= spd_root_factor(lambda[i] - lambda[j]);
        }
    }
    Ok(p)
}

/// Dispatch on `space`, checking the length of `λ`.
pub fn c_inv_sq(space: Space, lambda: &SpectralPoint) -> Result<f64> {
    let k = space.rank();
    if lambda.0.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: lambda.0.len() });
    }
    match space {
        Space::Hyperbolic { n } => c_inv_sq_hyp(lambda.0[0], n),
        Space::Spd { .. } => c_inv_sq_spd(&lambda.0),
    }
}
