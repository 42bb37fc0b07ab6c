//! Random spherical Fourier features: feature bases, pointwise and PSD
//! kernel estimators, prior paths, zonal spherical functions and the
//! limiting kernel.
//!
//! A basis holds `L` triples `(λ_l, h_l, w_l)`. The feature of a point `x`
//! is `√(σ²/L)·c_l·exp((iλ_l + ρ)·a(h_l·g))` with `g·x₀ = x` and `c_l` the
//! importance weight (1 for rejection-sampled bases).

mod zonal;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifolds::{ensure_same_space, ManifoldPoint, Space};
use crate::spectral::{c_inv_sq, ImportanceProposal, KernelSpec, RhoData, SpectralPoint, SpectralSampler};

pub use zonal::{
    limiting_kernel, log_feature_exponent, relative_point, zonal_spherical_hyp_ball, zonal_spherical_mc,
    zonal_spherical_mc_estimate, McEstimate,
};
use zonal::{exponent, plane_wave, IsotropyDraw};

/// Current version of the serialized basis document.
pub const BASIS_FORMAT_VERSION: u32 = 1;

const ORTHO_TOL: f64 = 1e-10;

/// How spectral samples are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisMethod {
    /// Exact draws from the normalized spectral measure.
    Rejection,
    /// Draws from the smooth base density, reweighted by `|c(λ)|⁻¹`.
    Importance,
}

impl std::str::FromStr for BasisMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rejection" => Ok(BasisMethod::Rejection),
            "importance" => Ok(BasisMethod::Importance),
            _ => Err(Error::InvalidArgument(format!("unknown method '{s}'"))),
        }
    }
}

/// Kernel estimator variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorMode {
    /// `Re⟨φ(x), φ(x′)⟩`: symmetric positive semi-definite Gram matrices.
    Psd,
    /// Single exponential at `g₂⁻¹g₁`: bounded variance, not PSD.
    Plain,
}

/// Random feature basis. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BasisDocument", into = "BasisDocument")]
pub struct FeatureBasis {
    space: Space,
    spec: KernelSpec,
    method: BasisMethod,
    lambdas: Vec<SpectralPoint>,
    haars: Vec<DMatrix<f64>>,
    weights: Vec<Complex64>,
    rho: RhoData,
    importance_weights: Option<Vec<f64>>,
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct BasisDocument {
    version: u32,
    space: Space,
    spec: KernelSpec,
    method: BasisMethod,
    #[serde(rename = "L")]
    l: usize,
    lambdas: Vec<Vec<f64>>,
    /// Row-major isotropy matrices, one flat array each.
    haars: Vec<Vec<f64>>,
    /// `[re, im]` pairs.
    weights: Vec<[f64; 2]>,
    rho: RhoData,
    importance_weights: Option<Vec<f64>>,
    seed: Option<u64>,
}

impl From<FeatureBasis> for BasisDocument {
    fn from(b: FeatureBasis) -> Self {
        BasisDocument {
            version: BASIS_FORMAT_VERSION,
            space: b.space,
            spec: b.spec,
            method: b.method,
            l: b.lambdas.len(),
            lambdas: b.lambdas.into_iter().map(|l| l.0).collect(),
            haars: b
                .haars
                .iter()
                .map(|h| h.transpose().as_slice().to_vec())
                .collect(),
            weights: b.weights.iter().map(|w| [w.re, w.im]).collect(),
            rho: b.rho,
            importance_weights: b.importance_weights,
            seed: b.seed,
        }
    }
}

impl TryFrom<BasisDocument> for FeatureBasis {
    type Error = Error;

    fn try_from(d: BasisDocument) -> Result<Self> {
        if d.version != BASIS_FORMAT_VERSION {
            return Err(Error::Unsupported(format!("basis format version {}", d.version)));
        }
        let k = d.space.isotropy_dim();
        let haars = d
            .haars
            .iter()
            .map(|flat| {
                if flat.len() != k * k {
                    return Err(Error::DimensionMismatch { expected: k * k, got: flat.len() });
                }
                Ok(DMatrix::from_row_slice(k, k, flat))
            })
            .collect::<Result<Vec<_>>>()?;
        FeatureBasis::from_parts(
            d.space,
            d.spec,
            d.method,
            d.lambdas.into_iter().map(SpectralPoint).collect(),
            haars,
            d.weights.iter().map(|w| Complex64::new(w[0], w[1])).collect(),
            d.importance_weights,
            d.seed,
        )
        .and_then(|b| {
            if b.lambdas.len() != d.l {
                return Err(Error::DimensionMismatch { expected: d.l, got: b.lambdas.len() });
            }
            Ok(b)
        })
    }
}

impl FeatureBasis {
    /// Assembles and validates a basis from its parts.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        space: Space,
        spec: KernelSpec,
        method: BasisMethod,
        lambdas: Vec<SpectralPoint>,
        haars: Vec<DMatrix<f64>>,
        weights: Vec<Complex64>,
        importance_weights: Option<Vec<f64>>,
        seed: Option<u64>,
    ) -> Result<Self> {
        spec.validate()?;
        let l = lambdas.len();
        if l == 0 {
            return Err(Error::InvalidArgument("a basis needs L >= 1".into()));
        }
        if haars.len() != l || weights.len() != l {
            return Err(Error::DimensionMismatch { expected: l, got: haars.len().min(weights.len()) });
        }
        let k = space.isotropy_dim();
        for lam in &lambdas {
            if lam.0.len() != space.rank() || !lam.is_finite() {
                return Err(Error::InvalidArgument("spectral point of wrong length or non-finite".into()));
            }
        }
        for h in &haars {
            if h.nrows() != k || h.ncols() != k {
                return Err(Error::DimensionMismatch { expected: k, got: h.nrows() });
            }
            let err = (h.transpose() * h - DMatrix::identity(k, k)).amax();
            if err > ORTHO_TOL {
                return Err(Error::InvalidArgument(format!("isotropy element not orthogonal ({err:e})")));
            }
        }
        if let Some(iw) = &importance_weights {
            if iw.len() != l || iw.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
                return Err(Error::InvalidArgument("importance weights must be positive and finite".into()));
            }
        }
        Ok(Self {
            space,
            spec,
            method,
            lambdas,
            haars,
            weights,
            rho: RhoData::for_space(space),
            importance_weights,
            seed,
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn method(&self) -> BasisMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambdas(&self) -> &[SpectralPoint] {
        &self.lambdas
    }

    pub fn haars(&self) -> &[DMatrix<f64>] {
        &self.haars
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn rho(&self) -> &RhoData {
        &self.rho
    }

    pub fn importance_weights(&self) -> Option<&[f64]> {
        self.importance_weights.as_deref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Records the seed the basis was drawn from.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// The basis made of the first `l` features. Importance weights are
    /// renormalized over the prefix.
    pub fn prefix(&self, l: usize) -> Result<FeatureBasis> {
        if l == 0 || l > self.len() {
            return Err(Error::InvalidArgument(format!("prefix length {l} outside 1..={}", self.len())));
        }
        let iw = self.importance_weights.as_ref().map(|w| {
            let ms = w[..l].iter().map(|v| v * v).sum::<f64>() / l as f64;
            w[..l].iter().map(|v| v / ms.sqrt()).collect()
        });
        FeatureBasis::from_parts(
            self.space,
            self.spec,
            self.method,
            self.lambdas[..l].to_vec(),
            self.haars[..l].to_vec(),
            self.weights[..l].to_vec(),
            iw,
            self.seed,
        )
    }

    fn amplitude(&self, l: usize) -> f64 {
        let base = (self.spec.sigma2 / self.len() as f64).sqrt();
        match &self.importance_weights {
            Some(iw) => base * iw[l],
            None => base,
        }
    }

    fn exponent_at(&self, x: &ManifoldPoint, l: usize) -> Result<Vec<f64>> {
        let h = &self.haars[l];
        match self.space {
            Space::Hyperbolic { .. } => {
                let row: Vec<f64> = h.row(0).iter().copied().collect();
                exponent(x, IsotropyDraw::Row(&row))
            }
            Space::Spd { .. } => exponent(x, IsotropyDraw::Matrix(h)),
        }
    }
}

/// Draws a basis of `L` features.
pub fn build_basis<R: Rng + ?Sized>(
    spec: &KernelSpec,
    space: Space,
    l: usize,
    method: BasisMethod,
    rng: &mut R,
) -> Result<FeatureBasis> {
    spec.validate()?;
    if l == 0 {
        return Err(Error::InvalidArgument("L must be >= 1".into()));
    }
    let mut lambdas = Vec::with_capacity(l);
    let mut importance = None;
    match method {
        BasisMethod::Rejection => {
            let sampler = SpectralSampler::new(spec, space)?;
            for _ in 0..l {
                lambdas.push(sampler.sample(rng)?.0);
            }
        }
        BasisMethod::Importance => {
            let proposal = ImportanceProposal::new(spec, space)?;
            let mut c = Vec::with_capacity(l);
            for _ in 0..l {
                let lam = proposal.sample(rng);
                c.push(c_inv_sq(space, &lam)?);
                lambdas.push(lam);
            }
            let c_mean = c.iter().sum::<f64>() / l as f64;
            if !(c_mean > 0.0) {
                return Err(Error::InvalidArgument("importance weights vanish for every draw".into()));
            }
            // a draw exactly at a c-function zero carries no weight; nudge it
            let floor = 1e-300;
            importance = Some(c.iter().map(|v| (v / c_mean).max(floor).sqrt()).collect());
        }
    }
    let haars = (0..l).map(|_| space.haar_isotropy(rng)).collect();
    let weights = (0..l).map(|_| complex_normal(rng)).collect();
    FeatureBasis::from_parts(space, *spec, method, lambdas, haars, weights, importance, None)
}

/// `w = a + ib` with `a, b` independent standard normals.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Feature vector of `x` (weights `w_l` excluded).
pub fn feature_map(basis: &FeatureBasis, x: &ManifoldPoint) -> Result<DVector<Complex64>> {
    ensure_same_space(basis.space, x.space())?;
    let mut out = DVector::zeros(basis.len());
    for l in 0..basis.len() {
        let a = basis.exponent_at(x, l)?;
        out[l] = plane_wave(&basis.lambdas[l].0, &basis.rho.rho, &a) * basis.amplitude(l);
    }
    Ok(out)
}

/// Feature matrix with one row per point.
pub fn feature_matrix(basis: &FeatureBasis, points: &[ManifoldPoint]) -> Result<DMatrix<Complex64>> {
    let mut m = DMatrix::zeros(points.len(), basis.len());
    for (i, p) in points.iter().enumerate() {
        m.set_row(i, &feature_map(basis, p)?.transpose());
    }
    Ok(m)
}

/// Kernel estimate `k̂(x, x′)`.
pub fn kernel_estimate(
    basis: &FeatureBasis,
    x: &ManifoldPoint,
    y: &ManifoldPoint,
    mode: EstimatorMode,
) -> Result<f64> {
    match mode {
        EstimatorMode::Psd => {
            let fx = feature_map(basis, x)?;
            let fy = feature_map(basis, y)?;
            Ok(fx.iter().zip(fy.iter()).map(|(a, b)| (a * b.conj()).re).sum())
        }
        EstimatorMode::Plain => {
            ensure_same_space(basis.space, x.space())?;
            let rel = relative_point(x, y)?;
            let mut sum = 0.0;
            for l in 0..basis.len() {
                let a = basis.exponent_at(&rel, l)?;
                sum += plane_wave(&basis.lambdas[l].0, &basis.rho.rho, &a).re * basis.amplitude(l).powi(2);
            }
            Ok(sum)
        }
    }
}

/// `Re(Φ_x Φ_yᵀ*)` for two point lists.
pub fn kernel_cross(basis: &FeatureBasis, xs: &[ManifoldPoint], ys: &[ManifoldPoint]) -> Result<DMatrix<f64>> {
    let fx = feature_matrix(basis, xs)?;
    let fy = feature_matrix(basis, ys)?;
    Ok((fx * fy.adjoint()).map(|z| z.re))
}

/// PSD Gram matrix `Re(ΦΦ*)`, exactly symmetric.
pub fn kernel_matrix(basis: &FeatureBasis, points: &[ManifoldPoint]) -> Result<DMatrix<f64>> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("kernel_matrix needs at least one point".into()));
    }
    let f = feature_matrix(basis, points)?;
    let k = (&f * f.adjoint()).map(|z| z.re);
    Ok((&k + k.transpose()) * 0.5)
}

/// Prior path `f(x) = Re Σ_l w_l φ_l(x)` with the basis's own weights.
pub fn prior_sample(basis: &FeatureBasis, points: &[ManifoldPoint]) -> Result<Vec<f64>> {
    prior_sample_with_weights(basis, points, &basis.weights)
}

/// Prior path with externally supplied weights (length `L`).
pub fn prior_sample_with_weights(
    basis: &FeatureBasis,
    points: &[ManifoldPoint],
    weights: &[Complex64],
) -> Result<Vec<f64>> {
    if weights.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), got: weights.len() });
    }
    let w = DVector::from_column_slice(weights);
    let f = feature_matrix(basis, points)?;
    Ok((f * w).iter().map(|z| z.re).collect())
}
