//! Reference kernels: closed forms and quadratures for the heat kernel on
//! every `H_n` and on `SPD(2)`, and the Matérn kernel as a
//! heat-kernel mixture.
//!
//! Every oracle is a function of point-pair invariants only. Normalized
//! oracles equal 1 at coincident points.

mod heat;
mod matern;

pub use heat::{
    heat_h2, heat_h3, heat_hn_millson, heat_spd2, spd2_invariants, HeatSolution, HyperbolicHeat,
    MillsonChain, Spd2Heat, SpectralHeat,
};
pub use matern::{matern_from_heat, matern_from_heat_at};

use crate::error::Result;
use crate::manifolds::{ManifoldPoint, Space};
use crate::spectral::{KernelSpec, Laplacian};

/// `log sinh x` for `x > 0`, stable for large `x`.
pub(crate) fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `log cosh x`, stable for large `x`.
pub(crate) fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a - std::f64::consts::LN_2 + (-2.0 * a).exp().ln_1p()
}

/// Normalized reference kernel `k(x, y)/σ²` for the spaces and specs that
/// have one: heat and Matérn on every `H_n` and on `SPD(2)`.
pub fn reference_kernel(spec: &KernelSpec, x: &ManifoldPoint, y: &ManifoldPoint) -> Result<f64> {
    let sol = solution_for(x.space())?;
    if spec.is_heat() {
        // the spectral gap only rescales the heat kernel
        let inv = sol.invariants(x, y)?;
        let t = spec.kappa * spec.kappa / 2.0;
        Ok(sol.solution(t, &inv)? / sol.solution(t, &sol.coincident())?)
    } else {
        matern_from_heat(sol.as_ref(), spec.nu, spec.kappa, spec.laplacian, x, y)
    }
}

/// Heat solution object for a space, if an oracle exists.
pub fn solution_for(space: Space) -> Result<Box<dyn HeatSolution>> {
    match space {
        Space::Hyperbolic { n } => Ok(Box::new(HyperbolicHeat::new(n)?)),
        Space::Spd { d: 2 } => Ok(Box::new(Spd2Heat)),
        Space::Spd { d } => Err(crate::error::Error::Unsupported(format!(
            "no reference kernel for SPD({d})"
        ))),
    }
}

/// `e^{t‖ρ‖²}` factor turning the ordinary heat solution into the shifted one.
pub(crate) fn shift_factor(laplacian: Laplacian, rho_sq: f64, t: f64) -> f64 {
    match laplacian {
        Laplacian::Ordinary => 1.0,
        Laplacian::Shifted => (t * rho_sq).exp(),
    }
}

#[cfg(test)]
mod tests;
