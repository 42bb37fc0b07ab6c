//! Abelian Iwasawa coordinates of `h·g`, zonal spherical functions and the
//! limiting kernel `π⁽⁰⁾`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::manifolds::{
    embed_rotation, ensure_same_space, iwasawa_so1n, lq_decompose, minkowski_gram, point_to_group,
    HyperbolicPoint, ManifoldPoint, Space, SpdPoint,
};
use crate::spectral::{RhoData, SpectralPoint};

/// `a(h·g)` with `g·x₀ = x`, through the explicit group decomposition.
///
/// `H_n`: embed `h ∈ SO(n)` into `SO₀(1, n)` and return the Iwasawa `t` of
/// `h·g`. `SPD(d)`: with `C` the Cholesky factor of `x`, factor `h·C = L·Q`
/// and return `log diag(L)`.
pub fn log_feature_exponent(x: &ManifoldPoint, h: &DMatrix<f64>) -> Result<Vec<f64>> {
    let g = point_to_group(x);
    match x {
        ManifoldPoint::Hyperbolic(p) => {
            check_isotropy(h, p.dim())?;
            let m = embed_rotation(h) * g.matrix();
            let hg = crate::manifolds::GroupElement::new(x.space(), m)?;
            Ok(iwasawa_so1n(&hg)?.coords)
        }
        ManifoldPoint::Spd(s) => {
            check_isotropy(h, s.dim())?;
            let f = lq_decompose(&(h * g.matrix()))?;
            Ok(f.l.diagonal().iter().map(|v| v.ln()).collect())
        }
    }
}

fn check_isotropy(h: &DMatrix<f64>, k: usize) -> Result<()> {
    if h.nrows() != k || h.ncols() != k {
        return Err(Error::DimensionMismatch { expected: k, got: h.nrows() });
    }
    Ok(())
}

/// Closed form of the hyperbolic exponent: with `b = kᵀe₁` a unit vector,
/// `e^{t} = 1/(x₀ − ⟨b, x̄⟩)`, the boundary Poisson kernel.
pub(crate) fn hyp_exponent(x: &HyperbolicPoint, b: &[f64]) -> f64 {
    let v = x.as_slice();
    let dot: f64 = v[1..].iter().zip(b).map(|(a, c)| a * c).sum();
    // x₀ − ⟨b, x̄⟩ = (1 + |x̄ − ⟨b, x̄⟩b|²)/(x₀ + ⟨b, x̄⟩) avoids cancellation
    let perp: f64 = v[1..].iter().zip(b).map(|(a, c)| (a - dot * c).powi(2)).sum();
    let denom = if dot > 0.0 {
        (1.0 + perp) / (v[0] + dot)
    } else {
        v[0] - dot
    };
    -denom.ln()
}

/// Closed form of the SPD exponent: `log diag(chol(h·S·hᵀ))`.
pub(crate) fn spd_exponent(s: &SpdPoint, h: &DMatrix<f64>) -> Result<Vec<f64>> {
    let m = h * s.matrix() * h.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let c = m.cholesky().ok_or(Error::NotPositiveDefinite)?;
    Ok(c.l().diagonal().iter().map(|v| v.ln()).collect())
}

/// Either an isotropy element or, for `H_n`, just its first row.
pub(crate) enum IsotropyDraw<'a> {
    Row(&'a [f64]),
    Matrix(&'a DMatrix<f64>),
}

pub(crate) fn exponent(x: &ManifoldPoint, h: IsotropyDraw<'_>) -> Result<Vec<f64>> {
    match (x, h) {
        (ManifoldPoint::Hyperbolic(p), IsotropyDraw::Row(b)) => Ok(vec![hyp_exponent(p, b)]),
        (ManifoldPoint::Hyperbolic(p), IsotropyDraw::Matrix(m)) => {
            let row: Vec<f64> = m.row(0).iter().copied().collect();
            Ok(vec![hyp_exponent(p, &row)])
        }
        (ManifoldPoint::Spd(s), IsotropyDraw::Matrix(m)) => spd_exponent(s, m),
        (ManifoldPoint::Spd(_), IsotropyDraw::Row(_)) => {
            Err(Error::InvalidArgument("SPD exponents need the full isotropy element".into()))
        }
    }
}

/// `exp((iλ + ρ)·a)`.
pub(crate) fn plane_wave(lambda: &[f64], rho: &[f64], a: &[f64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for ((l, r), x) in lambda.iter().zip(rho).zip(a) {
        re += r * x;
        im += l * x;
    }
    Complex64::from_polar(re.exp(), im)
}

fn uniform_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Monte-Carlo mean with the standard error of its real part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate<T> {
    pub value: T,
    pub stderr: f64,
}

fn mc_mean(values: &[Complex64]) -> McEstimate<Complex64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<Complex64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v.re - mean.re).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    McEstimate { value: mean, stderr: (var / n).sqrt() }
}

fn zonal_samples<R: Rng + ?Sized>(
    lambda: &SpectralPoint,
    x: &ManifoldPoint,
    l: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if l == 0 {
        return Err(Error::InvalidArgument("L must be >= 1".into()));
    }
    let space = x.space();
    if lambda.0.len() != space.rank() {
        return Err(Error::DimensionMismatch { expected: space.rank(), got: lambda.0.len() });
    }
    let rho = RhoData::for_space(space);
    let mut out = Vec::with_capacity(l);
    for _ in 0..l {
        let a = match space {
            Space::Hyperbolic { n } => exponent(x, IsotropyDraw::Row(&uniform_sphere(n, rng)))?,
            Space::Spd { .. } => exponent(x, IsotropyDraw::Matrix(&space.haar_isotropy(rng)))?,
        };
        out.push(plane_wave(&lambda.0, &rho.rho, &a));
    }
    Ok(out)
}

/// `(1/L) Σ_l exp((iλ+ρ)·a(h_l·g))` with Haar `h_l`: unbiased for `π^{(λ)}(g)`.
pub fn zonal_spherical_mc<R: Rng + ?Sized>(
    lambda: &SpectralPoint,
    x: &ManifoldPoint,
    l: usize,
    rng: &mut R,
) -> Result<Complex64> {
    Ok(zonal_spherical_mc_estimate(lambda, x, l, rng)?.value)
}

/// [`zonal_spherical_mc`] together with the standard error of the real part.
pub fn zonal_spherical_mc_estimate<R: Rng + ?Sized>(
    lambda: &SpectralPoint,
    x: &ManifoldPoint,
    l: usize,
    rng: &mut R,
) -> Result<McEstimate<Complex64>> {
    Ok(mc_mean(&zonal_samples(lambda, x, l, rng)?))
}

/// Zonal spherical function on the Poincaré ball: Monte-Carlo average of
/// `((1−‖b‖²)/‖b−ω‖²)^{iλ+(n−1)/2}` over uniform `ω` on the unit sphere.
pub fn zonal_spherical_hyp_ball<R: Rng + ?Sized>(
    lambda: f64,
    b: &[f64],
    l: usize,
    rng: &mut R,
) -> Result<McEstimate<Complex64>> {
    if l == 0 {
        return Err(Error::InvalidArgument("L must be >= 1".into()));
    }
    let n = b.len();
    let nb2: f64 = b.iter().map(|x| x * x).sum();
    if n < 2 || nb2 >= 1.0 {
        return Err(Error::InvalidPoint(format!("ball point of norm {} (dimension {n})", nb2.sqrt())));
    }
    let rho = (n as f64 - 1.0) / 2.0;
    let vals: Vec<Complex64> = (0..l)
        .map(|_| {
            let w = uniform_sphere(n, rng);
            let d2: f64 = b.iter().zip(&w).map(|(x, y)| (x - y).powi(2)).sum();
            let p = (1.0 - nb2) / d2;
            Complex64::from_polar(p.powf(rho), lambda * p.ln())
        })
        .collect();
    Ok(mc_mean(&vals))
}

/// The point `g₂⁻¹·x₁` with `g₂·x₀ = x₂`; kernels are functions of it alone.
pub fn relative_point(x1: &ManifoldPoint, x2: &ManifoldPoint) -> Result<ManifoldPoint> {
    ensure_same_space(x1.space(), x2.space())?;
    match (x1, x2) {
        (ManifoldPoint::Hyperbolic(p1), ManifoldPoint::Hyperbolic(_)) => {
            let g = point_to_group(x2);
            let b = minkowski_gram(p1.dim());
            let v: DVector<f64> = &b * g.matrix().transpose() * &b * p1.coords();
            let mut v = v;
            // re-project onto the sheet to absorb rounding
            let s2: f64 = v.rows(1, p1.dim()).norm_squared();
            v[0] = (1.0 + s2).sqrt();
            Ok(ManifoldPoint::Hyperbolic(HyperbolicPoint::new(v.as_slice().to_vec())?))
        }
        (ManifoldPoint::Spd(s1), ManifoldPoint::Spd(s2)) => {
            let c2 = s2.cholesky_factor();
            let y = c2
                .solve_lower_triangular(s1.matrix())
                .ok_or(Error::Singular)?;
            let y = c2.solve_lower_triangular(&y.transpose()).ok_or(Error::Singular)?;
            let y = (&y + y.transpose()) * 0.5;
            Ok(ManifoldPoint::Spd(SpdPoint::new(y)?))
        }
        _ => unreachable!("spaces checked above"),
    }
}

/// Monte-Carlo estimate of the limiting kernel `π⁽⁰⁾(g₂⁻¹g₁)`.
pub fn limiting_kernel<R: Rng + ?Sized>(
    x1: &ManifoldPoint,
    x2: &ManifoldPoint,
    l: usize,
    rng: &mut R,
) -> Result<McEstimate<f64>> {
    let y = relative_point(x1, x2)?;
    let zero = SpectralPoint(vec![0.0; y.space().rank()]);
    let est = zonal_spherical_mc_estimate(&zero, &y, l, rng)?;
    Ok(McEstimate { value: est.value.re, stderr: est.stderr })
}
