//! Exact samplers for the normalized spectral measures: chi / beta-prime
//! mixtures with a tanh rejection step on `H_n`, GOE eigenvalues with a tanh
//! rejection step on `SPD(d)`, and the smooth proposals used for importance
//! sampling.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use rand_distr::weighted::WeightedIndex;
use rand_distr::{ChiSquared, Distribution, Gamma, StandardNormal};
use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;

use super::cfunc::{hyp_polynomial_coeffs, spd_root_factor};
use super::{KernelSpec, Laplacian, RhoData, SpectralPoint};
use crate::error::{Error, Result};
use crate::manifolds::Space;

/// Proposals allowed per accepted draw before giving up.
pub const REJECTION_CAP: usize = 1_000_000;

#[derive(Debug, Clone)]
enum Component {
    /// `λ = χ_{j+1}/κ`, drawn as `√Gamma((j+1)/2, 2)/κ`.
    Chi { chi_sq: Gamma<f64>, inv_kappa: f64 },
    /// `λ = √(γx)`, `x ~ BetaPrime(a, b)` as a ratio of Gamma draws.
    BetaPrime { num: Gamma<f64>, den: Gamma<f64>, gamma: f64 },
}

impl Component {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Component::Chi { chi_sq, inv_kappa } => chi_sq.sample(rng).sqrt() * inv_kappa,
            Component::BetaPrime { num, den, gamma } => {
                let x = num.sample(rng) / den.sample(rng);
                (gamma * x).sqrt()
            }
        }
    }
}

/// Finite mixture on `λ ≥ 0` with density `∝ Σ_j α_j λ^j · base(λ)`.
#[derive(Debug, Clone)]
pub struct HypMixture {
    weights: Vec<f64>,
    index: WeightedIndex<f64>,
    components: Vec<Component>,
}

fn check_coeffs(coeffs: &[f64]) -> Result<()> {
    if coeffs.iter().any(|&a| !(a >= 0.0) || !a.is_finite()) {
        return Err(Error::InvalidArgument("mixture coefficients must be finite and >= 0".into()));
    }
    if coeffs.iter().all(|&a| a == 0.0) {
        return Err(Error::InvalidArgument("mixture coefficients are all zero".into()));
    }
    Ok(())
}

impl HypMixture {
    fn from_log_weights(log_w: Vec<(usize, f64, Component)>, len: usize) -> Result<Self> {
        let max = log_w.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        let mut weights = vec![0.0; len];
        let mut active = Vec::with_capacity(log_w.len());
        let mut components = Vec::with_capacity(log_w.len());
        for (j, lw, c) in log_w {
            let w = (lw - max).exp();
            weights[j] = w;
            active.push(w);
            components.push(c);
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let index = WeightedIndex::new(&active)
            .map_err(|e| Error::InvalidArgument(format!("mixture weights: {e}")))?;
        Ok(Self { weights, index, components })
    }

    /// Target `Σ α_j λ^j e^{−κ²λ²/2}`: component `j` is `χ_{j+1}/κ` with
    /// weight `∝ α_j·2^{(j−1)/2}·Γ((j+1)/2)·κ^{−(j+1)}`.
    pub fn heat(coeffs: &[f64], kappa: f64) -> Result<Self> {
        check_coeffs(coeffs)?;
        if !(kappa > 0.0) {
            return Err(Error::InvalidSpec(format!("kappa must be positive, got {kappa}")));
        }
        let mut parts = Vec::new();
        for (j, &a) in coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let half = (j as f64 + 1.0) / 2.0;
            let lw = a.ln() + (half - 1.0) * 2f64.ln() + ln_gamma(half) - 2.0 * half * kappa.ln();
            let chi_sq = Gamma::new(half, 2.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            parts.push((j, lw, Component::Chi { chi_sq, inv_kappa: 1.0 / kappa }));
        }
        Self::from_log_weights(parts, coeffs.len())
    }

    /// Target `Σ α_j λ^j (γ + λ²)^{−ν−n/2}`, `γ = 2ν/κ² + ((n−1)/2)²`
    /// (`2ν/κ²` for the shifted Laplacian): component `j` is `√(γx)` with
    /// `x ~ BetaPrime((j+1)/2, ν+(n−j−1)/2)` and weight
    /// `∝ α_j·½B((j+1)/2, ν+(n−j−1)/2)·γ^{−(ν+(n−j−1)/2)}`.
    pub fn matern(coeffs: &[f64], nu: f64, kappa: f64, n: usize, laplacian: Laplacian) -> Result<Self> {
        check_coeffs(coeffs)?;
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidSpec(format!("Matérn mixture needs finite nu > 0, got {nu}")));
        }
        if !(kappa > 0.0) {
            return Err(Error::InvalidSpec(format!("kappa must be positive, got {kappa}")));
        }
        if coeffs.len() > n {
            return Err(Error::InvalidArgument(format!(
                "coefficient of power {} exceeds n-1 = {}",
                coeffs.len() - 1,
                n - 1
            )));
        }
        let rho = (n as f64 - 1.0) / 2.0;
        let gamma = 2.0 * nu / (kappa * kappa)
            + match laplacian {
                Laplacian::Ordinary => rho * rho,
                Laplacian::Shifted => 0.0,
            };
        let mut parts = Vec::new();
        for (j, &a) in coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let pa = (j as f64 + 1.0) / 2.0;
            let pb = nu + (n as f64 - j as f64 - 1.0) / 2.0;
            let lw = a.ln() + 0.5f64.ln() + ln_beta(pa, pb) - pb * gamma.ln();
            let num = Gamma::new(pa, 1.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let den = Gamma::new(pb, 1.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            parts.push((j, lw, Component::BetaPrime { num, den, gamma }));
        }
        Self::from_log_weights(parts, coeffs.len())
    }

    /// Normalized mixture weights, indexed by power `j`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let k = self.index.sample(rng);
        self.components[k].sample(rng)
    }
}

/// One draw from the heat mixture with the given coefficients.
pub fn sample_hyp_heat_mixture<R: Rng + ?Sized>(coeffs: &[f64], kappa: f64, rng: &mut R) -> Result<f64> {
    Ok(HypMixture::heat(coeffs, kappa)?.sample(rng))
}

/// One draw from the Matérn mixture with the given coefficients.
pub fn sample_hyp_matern_mixture<R: Rng + ?Sized>(
    coeffs: &[f64],
    nu: f64,
    kappa: f64,
    n: usize,
    laplacian: Laplacian,
    rng: &mut R,
) -> Result<f64> {
    Ok(HypMixture::matern(coeffs, nu, kappa, n, laplacian)?.sample(rng))
}

/// Eigenvalues of `(X + Xᵀ)/2`, `X` with i.i.d. standard Gaussian entries,
/// sorted ascending. Joint density `∝ exp(−‖λ‖²/2)·Π_{i<j}|λ_i − λ_j|`.
pub fn sample_goe_eigs<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let x = nalgebra::DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let m = (&x + x.transpose()) * 0.5;
    let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Exact sampler for the normalized spectral measure of a kernel on a space.
#[derive(Debug, Clone)]
pub enum SpectralSampler {
    Hyperbolic { n: usize, mixture: HypMixture },
    /// `λ = λ_GOE·scale / y` with `y ~ χ_{2ν}` for Matérn (`y = 1` for heat).
    Spd { d: usize, scale: f64, chi_sq: Option<Gamma<f64>> },
}

impl SpectralSampler {
    pub fn new(spec: &KernelSpec, space: Space) -> Result<Self> {
        spec.validate()?;
        match space {
            Space::Hyperbolic { n } => {
                let coeffs = hyp_polynomial_coeffs(n)?;
                let mixture = if spec.is_heat() {
                    HypMixture::heat(&coeffs, spec.kappa)?
                } else {
                    HypMixture::matern(&coeffs, spec.nu, spec.kappa, n, spec.laplacian)?
                };
                Ok(SpectralSampler::Hyperbolic { n, mixture })
            }
            Space::Spd { d } => {
                if spec.is_heat() {
                    return Ok(SpectralSampler::Spd { d, scale: 1.0 / spec.kappa, chi_sq: None });
                }
                let rho = RhoData::for_space(space);
                let s2 = 2.0 * spec.nu / (spec.kappa * spec.kappa) + spec.effective_rho_sq(&rho);
                let chi_sq = Gamma::new(spec.nu, 2.0).map_err(|e| Error::InvalidSpec(e.to_string()))?;
                Ok(SpectralSampler::Spd { d, scale: s2.sqrt(), chi_sq: Some(chi_sq) })
            }
        }
    }

    /// One proposal and its acceptance probability. Hyperbolic proposals
    /// carry a uniform random sign; SPD proposals are randomly permuted.
    pub fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> (SpectralPoint, f64) {
        match self {
            SpectralSampler::Hyperbolic { n, mixture } => {
                let l = mixture.sample(rng);
                let p = if n % 2 == 0 { (PI * l).tanh() } else { 1.0 };
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                (SpectralPoint::scalar(sign * l), p)
            }
            SpectralSampler::Spd { d, scale, chi_sq } => {
                let mut eig = sample_goe_eigs(*d, rng);
                eig.shuffle(rng);
                let y = chi_sq.as_ref().map_or(1.0, |g| g.sample(rng).sqrt());
                let lambda: Vec<f64> = eig.iter().map(|x| x * scale / y).collect();
                let mut p = 1.0;
                for i in 0..lambda.len() {
                    for j in i + 1..lambda.len() {
                        let delta = (lambda[i] - lambda[j]).abs();
                        p *= spd_root_factor(delta) / (PI * delta);
                    }
                }
                (SpectralPoint(lambda), p)
            }
        }
    }

    /// Exact draw; also returns the number of proposals used.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(SpectralPoint, usize)> {
        for k in 1..=REJECTION_CAP {
            let (lambda, p) = self.propose(rng);
            if p >= 1.0 || rng.random::<f64>() < p {
                return Ok((lambda, k));
            }
        }
        Err(Error::RejectionCap(REJECTION_CAP))
    }
}

/// Algorithm for `H_n`: mixture draw, tanh acceptance for even `n`, random sign.
pub fn rejection_sample_hyp<R: Rng + ?Sized>(spec: &KernelSpec, n: usize, rng: &mut R) -> Result<(f64, usize)> {
    let s = SpectralSampler::new(spec, Space::hyperbolic(n)?)?;
    let (l, k) = s.sample(rng)?;
    Ok((l.0[0], k))
}

/// Algorithm for `SPD(d)`: scaled GOE eigenvalues with tanh acceptance.
pub fn rejection_sample_spd<R: Rng + ?Sized>(spec: &KernelSpec, d: usize, rng: &mut R) -> Result<(Vec<f64>, usize)> {
    let s = SpectralSampler::new(spec, Space::spd(d)?)?;
    let (l, k) = s.sample(rng)?;
    Ok((l.0, k))
}

/// Monte-Carlo acceptance probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AcceptanceRate {
    pub rate: f64,
    pub stderr: f64,
    pub trials: usize,
}

pub fn acceptance_rate<R: Rng + ?Sized>(
    spec: &KernelSpec,
    space: Space,
    trials: usize,
    rng: &mut R,
) -> Result<AcceptanceRate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let s = SpectralSampler::new(spec, space)?;
    let mut accepted = 0usize;
    for _ in 0..trials {
        let (_, p) = s.propose(rng);
        if p >= 1.0 || rng.random::<f64>() < p {
            accepted += 1;
        }
    }
    let rate = accepted as f64 / trials as f64;
    Ok(AcceptanceRate {
        rate,
        stderr: (rate * (1.0 - rate) / trials as f64).sqrt(),
        trials,
    })
}

/// Smooth proposal `p(λ)` for importance sampling, without the c-function:
/// Gaussian `N(0, κ⁻²I)` for heat, multivariate Student-t with density
/// `∝ (γ + ‖λ‖²)^{−ν−n_dim/2}` for Matérn.
#[derive(Debug, Clone)]
pub enum ImportanceProposal {
    Gaussian { rank: usize, sd: f64 },
    StudentT { rank: usize, gamma: f64, chi_sq: ChiSquared<f64> },
}

impl ImportanceProposal {
    pub fn new(spec: &KernelSpec, space: Space) -> Result<Self> {
        spec.validate()?;
        let rank = space.rank();
        if spec.is_heat() {
            return Ok(ImportanceProposal::Gaussian { rank, sd: 1.0 / spec.kappa });
        }
        let rho = RhoData::for_space(space);
        let gamma = 2.0 * spec.nu / (spec.kappa * spec.kappa) + spec.effective_rho_sq(&rho);
        let df = 2.0 * spec.nu + space.manifold_dim() as f64 - rank as f64;
        let chi_sq = ChiSquared::new(df).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        Ok(ImportanceProposal::StudentT { rank, gamma, chi_sq })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SpectralPoint {
        match self {
            ImportanceProposal::Gaussian { rank, sd } => {
                SpectralPoint((0..*rank).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect())
            }
            ImportanceProposal::StudentT { rank, gamma, chi_sq } => {
                let w = chi_sq.sample(rng);
                let s = (gamma / w).sqrt();
                SpectralPoint((0..*rank).map(|_| s * rng.sample::<f64, _>(StandardNormal)).collect())
            }
        }
    }
}
