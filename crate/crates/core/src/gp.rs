//! Gaussian-process regression with manifold inputs: exact posterior
//! moments, pathwise-conditioned posterior samples and the log marginal
//! likelihood.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{complex_normal, feature_matrix, kernel_cross, kernel_matrix, FeatureBasis};
use crate::manifolds::{ensure_same_space, ManifoldPoint, Space};
use crate::oracles::reference_kernel;
use crate::spectral::KernelSpec;

/// Jitter levels tried in turn, relative to the mean diagonal of `K + Σ`.
pub const JITTER_LADDER: [f64; 4] = [0.0, 1e-10, 1e-8, 1e-6];

/// Observations `y_i = f(x_i) + ε_i`, `ε_i ~ N(0, noise_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DatasetRepr", into = "DatasetRepr")]
pub struct Dataset {
    points: Vec<ManifoldPoint>,
    y: Vec<f64>,
    noise: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DatasetRepr {
    points: Vec<ManifoldPoint>,
    y: Vec<f64>,
    noise: Vec<f64>,
}

impl TryFrom<DatasetRepr> for Dataset {
    type Error = Error;

    fn try_from(r: DatasetRepr) -> Result<Self> {
        Dataset::new(r.points, r.y, r.noise)
    }
}

impl From<Dataset> for DatasetRepr {
    fn from(d: Dataset) -> Self {
        DatasetRepr { points: d.points, y: d.y, noise: d.noise }
    }
}

impl Dataset {
    pub fn new(points: Vec<ManifoldPoint>, y: Vec<f64>, noise: Vec<f64>) -> Result<Self> {
        if y.len() != points.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: y.len() });
        }
        if noise.len() != points.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: noise.len() });
        }
        if let Some(v) = noise.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!("noise variances must be positive, got {v}")));
        }
        if let Some(v) = y.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite observation {v}")));
        }
        if let Some(first) = points.first() {
            for p in &points[1..] {
                ensure_same_space(first.space(), p.space())?;
            }
        }
        Ok(Self { points, y, noise })
    }

    /// Same noise variance for every observation.
    pub fn homoscedastic(points: Vec<ManifoldPoint>, y: Vec<f64>, noise: f64) -> Result<Self> {
        let n = points.len();
        Self::new(points, y, vec![noise; n])
    }

    pub fn empty() -> Self {
        Self { points: Vec::new(), y: Vec::new(), noise: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ManifoldPoint] {
        &self.points
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn noise(&self) -> &[f64] {
        &self.noise
    }

    /// `None` for an empty dataset.
    pub fn space(&self) -> Option<Space> {
        self.points.first().map(|p| p.space())
    }

    /// Column names of the flat row layout: point coordinates, `y`, `noise`.
    pub fn column_labels(space: Space) -> Vec<String> {
        let mut cols = ManifoldPoint::coord_labels(space);
        cols.push("y".into());
        cols.push("noise".into());
        cols
    }

    /// One flat row per observation, matching [`Dataset::column_labels`].
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|i| {
                let mut row = self.points[i].flat_coords();
                row.push(self.y[i]);
                row.push(self.noise[i]);
                row
            })
            .collect()
    }

    pub fn from_rows(space: Space, rows: &[Vec<f64>]) -> Result<Self> {
        let width = Self::column_labels(space).len();
        let mut points = Vec::with_capacity(rows.len());
        let mut y = Vec::with_capacity(rows.len());
        let mut noise = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != width {
                return Err(Error::DimensionMismatch { expected: width, got: row.len() });
            }
            points.push(ManifoldPoint::from_flat_coords(space, &row[..width - 2])?);
            y.push(row[width - 2]);
            noise.push(row[width - 1]);
        }
        Self::new(points, y, noise)
    }

    fn check_space(&self, space: Space) -> Result<()> {
        match self.space() {
            Some(s) => ensure_same_space(s, space),
            None => Ok(()),
        }
    }
}

/// Where kernel values come from.
pub enum KernelSource<'a> {
    /// PSD random-feature Gram matrices.
    Basis(&'a FeatureBasis),
    /// Any kernel function, e.g. a closed-form oracle.
    Function(Box<dyn Fn(&ManifoldPoint, &ManifoldPoint) -> Result<f64> + 'a>),
}

impl<'a> KernelSource<'a> {
    /// `σ²·k(x, y)` from the reference oracles.
    pub fn reference(spec: KernelSpec) -> Self {
        KernelSource::Function(Box::new(move |x, y| Ok(spec.sigma2 * reference_kernel(&spec, x, y)?)))
    }

    pub fn cross(&self, xs: &[ManifoldPoint], ys: &[ManifoldPoint]) -> Result<DMatrix<f64>> {
        match self {
            KernelSource::Basis(b) => kernel_cross(b, xs, ys),
            KernelSource::Function(f) => {
                let mut k = DMatrix::zeros(xs.len(), ys.len());
                for (i, x) in xs.iter().enumerate() {
                    for (j, y) in ys.iter().enumerate() {
                        k[(i, j)] = f(x, y)?;
                    }
                }
                Ok(k)
            }
        }
    }

    /// Symmetric Gram matrix.
    pub fn gram(&self, xs: &[ManifoldPoint]) -> Result<DMatrix<f64>> {
        if xs.is_empty() {
            return Ok(DMatrix::zeros(0, 0));
        }
        match self {
            KernelSource::Basis(b) => kernel_matrix(b, xs),
            KernelSource::Function(f) => {
                let n = xs.len();
                let mut k = DMatrix::zeros(n, n);
                for i in 0..n {
                    for j in i..n {
                        let v = f(&xs[i], &xs[j])?;
                        k[(i, j)] = v;
                        k[(j, i)] = v;
                    }
                }
                Ok(k)
            }
        }
    }

    fn space(&self) -> Option<Space> {
        match self {
            KernelSource::Basis(b) => Some(b.space()),
            KernelSource::Function(_) => None,
        }
    }
}

/// Cholesky factor of `K_xx + Σ_ε (+ jitter·I)`.
#[derive(Debug, Clone)]
pub struct TrainingFactor {
    chol: Cholesky<f64, Dyn>,
    /// Absolute jitter that was added to the diagonal.
    pub jitter: f64,
}

impl TrainingFactor {
    /// Factorizes `K + diag(noise)`, escalating the jitter along
    /// [`JITTER_LADDER`].
    pub fn new(k: &DMatrix<f64>, noise: &[f64]) -> Result<Self> {
        let n = k.nrows();
        let mut a = k.clone();
        for i in 0..n {
            a[(i, i)] += noise[i];
        }
        let scale = if n == 0 { 1.0 } else { a.diagonal().mean().abs().max(f64::MIN_POSITIVE) };
        for rel in JITTER_LADDER {
            let jitter = rel * scale;
            let mut m = a.clone();
            for i in 0..n {
                m[(i, i)] += jitter;
            }
            if let Some(chol) = m.cholesky() {
                return Ok(Self { chol, jitter });
            }
        }
        Err(Error::Factorization(JITTER_LADDER[JITTER_LADDER.len() - 1] * scale))
    }

    pub fn solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(b)
    }

    pub fn solve_vec(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self.chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>()
    }
}

/// Posterior mean and covariance at the query points.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorMoments {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl PosteriorMoments {
    /// Marginal standard deviations, with tiny negative variances clipped.
    pub fn std(&self) -> DVector<f64> {
        self.cov.diagonal().map(|v| v.max(0.0).sqrt())
    }
}

fn check_inputs(src: &KernelSource<'_>, data: &Dataset, query: &[ManifoldPoint]) -> Result<()> {
    let space = src.space().or(data.space()).or(query.first().map(|q| q.space()));
    if let Some(space) = space {
        data.check_space(space)?;
        for q in query {
            ensure_same_space(space, q.space())?;
        }
    }
    Ok(())
}

/// `mean = K_{*x}(K_{xx}+Σ)⁻¹y`, `cov = K_{**} − K_{*x}(K_{xx}+Σ)⁻¹K_{x*}`.
pub fn posterior_moments(src: &KernelSource<'_>, data: &Dataset, query: &[ManifoldPoint]) -> Result<PosteriorMoments> {
    check_inputs(src, data, query)?;
    let kqq = src.gram(query)?;
    if data.is_empty() {
        return Ok(PosteriorMoments { mean: DVector::zeros(query.len()), cov: kqq });
    }
    let factor = TrainingFactor::new(&src.gram(data.points())?, data.noise())?;
    let kxq = src.cross(data.points(), query)?;
    let y = DVector::from_column_slice(data.y());
    let mean = kxq.transpose() * factor.solve_vec(&y);
    let cov = &kqq - kxq.transpose() * factor.solve(&kxq);
    let cov = (&cov + cov.transpose()) * 0.5;
    Ok(PosteriorMoments { mean, cov })
}

/// Pathwise conditioning with the training system factorized once: each
/// sample costs `O(L·(N + Q) + N² + N·Q)`.
pub struct PathwiseSampler<'a> {
    basis: &'a FeatureBasis,
    phi_x: DMatrix<Complex64>,
    phi_q: DMatrix<Complex64>,
    factor: Option<TrainingFactor>,
    k_qx: DMatrix<f64>,
    y: DVector<f64>,
    noise_sd: DVector<f64>,
}

impl<'a> PathwiseSampler<'a> {
    pub fn new(basis: &'a FeatureBasis, data: &Dataset, query: &[ManifoldPoint]) -> Result<Self> {
        check_inputs(&KernelSource::Basis(basis), data, query)?;
        let phi_x = feature_matrix(basis, data.points())?;
        let phi_q = feature_matrix(basis, query)?;
        let (factor, k_qx) = if data.is_empty() {
            (None, DMatrix::zeros(query.len(), 0))
        } else {
            let kxx = (&phi_x * phi_x.adjoint()).map(|z| z.re);
            let kxx = (&kxx + kxx.transpose()) * 0.5;
            let k_qx = (&phi_q * phi_x.adjoint()).map(|z| z.re);
            (Some(TrainingFactor::new(&kxx, data.noise())?), k_qx)
        };
        Ok(Self {
            basis,
            phi_x,
            phi_q,
            factor,
            k_qx,
            y: DVector::from_column_slice(data.y()),
            noise_sd: DVector::from_iterator(data.len(), data.noise().iter().map(|v| v.sqrt())),
        })
    }

    /// One posterior path `f(·) + K_{(·)x}(K_{xx}+Σ)⁻¹(y − f(x) − ε)` at the
    /// query points, with fresh prior weights and noise.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let w = DVector::from_iterator(self.basis.len(), (0..self.basis.len()).map(|_| complex_normal(rng)));
        let f_q = (&self.phi_q * &w).map(|z| z.re);
        let Some(factor) = &self.factor else {
            return f_q.as_slice().to_vec();
        };
        let f_x = (&self.phi_x * &w).map(|z| z.re);
        let eps = DVector::from_iterator(
            self.noise_sd.len(),
            self.noise_sd.iter().map(|s| s * rng.sample::<f64, _>(StandardNormal)),
        );
        let resid = &self.y - f_x - eps;
        (f_q + &self.k_qx * factor.solve_vec(&resid)).as_slice().to_vec()
    }
}

/// A single pathwise-conditioned posterior sample.
pub fn posterior_sample<R: Rng + ?Sized>(
    basis: &FeatureBasis,
    data: &Dataset,
    query: &[ManifoldPoint],
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(PathwiseSampler::new(basis, data, query)?.sample(rng))
}

/// `−½yᵀ(K+Σ)⁻¹y − ½log det(K+Σ) − (N/2) log 2π`.
pub fn log_marginal_likelihood(src: &KernelSource<'_>, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("log marginal likelihood needs data".into()));
    }
    check_inputs(src, data, &[])?;
    let factor = TrainingFactor::new(&src.gram(data.points())?, data.noise())?;
    let y = DVector::from_column_slice(data.y());
    let quad = y.dot(&factor.solve_vec(&y));
    Ok(-0.5 * quad - 0.5 * factor.log_det() - 0.5 * data.len() as f64 * (2.0 * PI).ln())
}
