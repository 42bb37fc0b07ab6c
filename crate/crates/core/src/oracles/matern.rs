//! Matérn kernels as heat-kernel mixtures:
//! `k(x, y) ∝ ∫₀^∞ u^{ν−1+n/2} e^{−2νu/κ²} P(u, x, y) du`.

use super::heat::HeatSolution;
use super::shift_factor;
use crate::error::{Error, Result};
use crate::manifolds::ManifoldPoint;
use crate::quadrature::{integrate_to_infinity, Tolerance};
use crate::spectral::Laplacian;

const TOL: Tolerance = Tolerance { abs: 0.0, rel: 1e-9 };

/// Unnormalized mixture integral at fixed pair invariants.
///
/// For `ν < 1` the substitution `w = u^ν` removes the `u^{ν−1}` endpoint
/// singularity that appears at coincident points.
fn mixture_integral(
    heat: &dyn HeatSolution,
    nu: f64,
    kappa: f64,
    laplacian: Laplacian,
    inv: &[f64],
) -> Result<f64> {
    let n = heat.manifold_dim() as f64;
    let rate = 2.0 * nu / (kappa * kappa);
    let rho_sq = heat.rho_sq();
    let integrand = |u: f64| -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let p = heat.solution(u, inv).unwrap_or(f64::NAN) * shift_factor(laplacian, rho_sq, u);
        ((nu - 1.0 + n / 2.0) * u.ln() - rate * u).exp() * p
    };
    let scale = (kappa * kappa / 2.0).min(1.0 / rate.max(1e-300)).max(1e-6);
    if nu < 1.0 {
        let g = |w: f64| {
            if w <= 0.0 {
                return 0.0;
            }
            let u = w.powf(1.0 / nu);
            // du = (1/ν) u / w dw
            integrand(u) * u / (nu * w)
        };
        integrate_to_infinity(g, 0.0, scale.powf(nu), TOL)
    } else {
        integrate_to_infinity(integrand, 0.0, scale, TOL)
    }
}

/// Matérn kernel from a heat solution, normalized to 1 at coincident points.
pub fn matern_from_heat(
    heat: &dyn HeatSolution,
    nu: f64,
    kappa: f64,
    laplacian: Laplacian,
    x: &ManifoldPoint,
    y: &ManifoldPoint,
) -> Result<f64> {
    let inv = heat.invariants(x, y)?;
    matern_from_heat_at(heat, nu, kappa, laplacian, &inv)
}

/// [`matern_from_heat`] at precomputed pair invariants.
pub fn matern_from_heat_at(
    heat: &dyn HeatSolution,
    nu: f64,
    kappa: f64,
    laplacian: Laplacian,
    inv: &[f64],
) -> Result<f64> {
    if !(nu > 0.0 && nu.is_finite()) || !(kappa > 0.0) {
        return Err(Error::InvalidSpec(format!("Matérn oracle needs finite nu > 0 and kappa > 0, got nu={nu}, kappa={kappa}")));
    }
    let num = mixture_integral(heat, nu, kappa, laplacian, inv)?;
    let den = mixture_integral(heat, nu, kappa, laplacian, &heat.coincident())?;
    if !num.is_finite() || !(den > 0.0) {
        return Err(Error::Quadrature(format!("Matérn mixture gave {num}/{den}")));
    }
    Ok(num / den)
}
