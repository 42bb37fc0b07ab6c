//! Spectral measures of heat and Matérn kernels on `H_n` and `SPD(d)`:
//! densities, Harish-Chandra c-functions and exact samplers.
//!
//! The spectral measure of a kernel is `base_density(λ)·|c(λ)|⁻²` on `𝔞*`.
//! None of the normalizing constants are computed; samplers are exact
//! without them.

mod cfunc;
mod samplers;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifolds::Space;

pub use cfunc::{c_inv_sq, c_inv_sq_hyp, c_inv_sq_spd, hyp_polynomial_coeffs};
pub use samplers::{
    acceptance_rate, rejection_sample_hyp, rejection_sample_spd, sample_goe_eigs,
    sample_hyp_heat_mixture, sample_hyp_matern_mixture, AcceptanceRate, HypMixture,
    ImportanceProposal, SpectralSampler, REJECTION_CAP,
};

/// Laplacian variant used to define the kernel family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Laplacian {
    #[default]
    Ordinary,
    /// `Δ` shifted by the spectral gap `‖ρ‖²`.
    Shifted,
}

impl fmt::Display for Laplacian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Laplacian::Ordinary => f.write_str("ordinary"),
            Laplacian::Shifted => f.write_str("shifted"),
        }
    }
}

/// Heat (`nu = ∞`) or Matérn kernel hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct KernelSpec {
    /// Smoothness `ν ∈ (0, ∞]`; `f64::INFINITY` is the heat kernel.
    pub nu: f64,
    /// Length scale `κ > 0`.
    pub kappa: f64,
    /// Variance `σ² > 0`.
    pub sigma2: f64,
    pub laplacian: Laplacian,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NuRepr {
    Number(f64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    nu: NuRepr,
    kappa: f64,
    #[serde(default = "one")]
    sigma2: f64,
    #[serde(default)]
    laplacian: Laplacian,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<SpecRepr> for KernelSpec {
    type Error = Error;

    fn try_from(r: SpecRepr) -> Result<Self> {
        let nu = match r.nu {
            NuRepr::Number(x) => x,
            NuRepr::Text(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => f64::INFINITY,
            NuRepr::Text(s) => s
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("nu must be a number or \"inf\", got {s:?}")))?,
        };
        KernelSpec::new(nu, r.kappa, r.sigma2, r.laplacian)
    }
}

impl From<KernelSpec> for SpecRepr {
    fn from(s: KernelSpec) -> Self {
        SpecRepr {
            nu: if s.nu.is_infinite() {
                NuRepr::Text("inf".into())
            } else {
                NuRepr::Number(s.nu)
            },
            kappa: s.kappa,
            sigma2: s.sigma2,
            laplacian: s.laplacian,
        }
    }
}

impl KernelSpec {
    pub fn new(nu: f64, kappa: f64, sigma2: f64, laplacian: Laplacian) -> Result<Self> {
        let s = Self { nu, kappa, sigma2, laplacian };
        s.validate()?;
        Ok(s)
    }

    pub fn heat(kappa: f64, sigma2: f64) -> Result<Self> {
        Self::new(f64::INFINITY, kappa, sigma2, Laplacian::Ordinary)
    }

    pub fn matern(nu: f64, kappa: f64, sigma2: f64) -> Result<Self> {
        Self::new(nu, kappa, sigma2, Laplacian::Ordinary)
    }

    pub fn with_laplacian(mut self, laplacian: Laplacian) -> Self {
        self.laplacian = laplacian;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::InvalidSpec(format!("nu must be in (0, inf], got {}", self.nu)));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidSpec(format!("kappa must be positive, got {}", self.kappa)));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::InvalidSpec(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        Ok(())
    }

    pub fn is_heat(&self) -> bool {
        self.nu.is_infinite()
    }

    /// `‖ρ‖²` as it enters the density: zero for the shifted Laplacian.
    pub fn effective_rho_sq(&self, rho: &RhoData) -> f64 {
        match self.laplacian {
            Laplacian::Ordinary => rho.rho_norm_sq,
            Laplacian::Shifted => 0.0,
        }
    }
}

/// An element `λ ∈ 𝔞*`: length 1 for `H_n`, length `d` for `SPD(d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpectralPoint(pub Vec<f64>);

impl SpectralPoint {
    pub fn scalar(x: f64) -> Self {
        Self(vec![x])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

/// Half-sum of positive roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoData {
    pub rho: Vec<f64>,
    pub rho_norm_sq: f64,
}

impl RhoData {
    /// `(n−1)/2` for `H_n`; `ρ_j = j − (d+1)/2`, `j = 1..d`, for `SPD(d)`.
    pub fn for_space(space: Space) -> Self {
        let rho: Vec<f64> = match space {
            Space::Hyperbolic { n } => vec![(n as f64 - 1.0) / 2.0],
            Space::Spd { d } => (1..=d).map(|j| j as f64 - (d as f64 + 1.0) / 2.0).collect(),
        };
        let rho_norm_sq = rho.iter().map(|x| x * x).sum();
        Self { rho, rho_norm_sq }
    }
}

/// Unnormalized base density: `exp(−κ²(‖λ‖²+‖ρ‖²)/2)` for the heat kernel,
/// `(2ν/κ² + ‖λ‖² + ‖ρ‖²)^{−ν−n_dim/2}` for Matérn. The shifted Laplacian
/// drops `‖ρ‖²`.
pub fn base_density(spec: &KernelSpec, lambda: &SpectralPoint, rho: &RhoData, n_dim: usize) -> f64 {
    let r2 = spec.effective_rho_sq(rho);
    let l2 = lambda.norm_sq();
    if spec.is_heat() {
        (-0.5 * spec.kappa * spec.kappa * (l2 + r2)).exp()
    } else {
        (2.0 * spec.nu / (spec.kappa * spec.kappa) + l2 + r2).powf(-spec.nu - n_dim as f64 / 2.0)
    }
}

/// Unnormalized spectral density `base_density(λ)·|c(λ)|⁻²` on `space`.
pub fn spectral_density(spec: &KernelSpec, space: Space, lambda: &SpectralPoint) -> Result<f64> {
    let rho = RhoData::for_space(space);
    Ok(base_density(spec, lambda, &rho, space.manifold_dim()) * c_inv_sq(space, lambda)?)
}
