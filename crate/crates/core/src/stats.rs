//! Kolmogorov–Smirnov tests and small summary statistics used by the
//! validation suites and the CLI.

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Outcome of a Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution, `P(K > x)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.3 {
        // series below converges slowly here; the true value is within 1e-7 of 1
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

/// One-sample test of `samples` against the continuous CDF `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("KS test needs at least one sample".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(KsResult {
        statistic: d,
        p_value: ks_p_value(d, n),
    })
}

/// Two-sample test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("KS test needs non-empty samples".into()));
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(KsResult {
        statistic: d,
        p_value: ks_p_value(d, na * nb / (na + nb)),
    })
}

/// CDF of an unnormalized density, tabulated by adaptive quadrature between
/// grid nodes and linearly interpolated.
///
/// On a finite interval the grid is uniform in `x`. On `[0, ∞)` it is uniform
/// in `u = x/(x + scale)`, so heavy tails are covered without truncation.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    grid: Vec<f64>,
    cdf: Vec<f64>,
    half_line_scale: Option<f64>,
}

impl TabulatedCdf {
    pub fn new<F: Fn(f64) -> f64>(density: F, lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        Self::build(density, lo, hi, nodes, None)
    }

    /// Table for a density on `[0, ∞)` whose tail decays at least like `x^{−1−ε}`.
    pub fn half_line<F: Fn(f64) -> f64>(density: F, scale: f64, nodes: usize) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument("CDF scale must be positive".into()));
        }
        let g = |u: f64| {
            let x = scale * u / (1.0 - u);
            let v = density(x) * scale / (1.0 - u).powi(2);
            if v.is_finite() { v } else { 0.0 }
        };
        Self::build(g, 0.0, 1.0, nodes, Some(scale))
    }

    fn build<F: Fn(f64) -> f64>(density: F, lo: f64, hi: f64, nodes: usize, half_line_scale: Option<f64>) -> Result<Self> {
        if !(hi > lo) || nodes < 2 {
            return Err(Error::InvalidArgument("CDF table needs lo < hi and >= 2 nodes".into()));
        }
        let h = (hi - lo) / (nodes - 1) as f64;
        let grid: Vec<f64> = (0..nodes).map(|i| lo + h * i as f64).collect();
        let tol = Tolerance { abs: 1e-15, rel: 1e-10 };
        let mut cdf = Vec::with_capacity(nodes);
        cdf.push(0.0);
        for w in grid.windows(2) {
            let part = integrate(&density, w[0], w[1], tol)?;
            cdf.push(cdf.last().copied().unwrap_or(0.0) + part);
        }
        let total = *cdf.last().unwrap_or(&0.0);
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidArgument("density integrates to a non-positive value".into()));
        }
        for c in &mut cdf {
            *c /= total;
        }
        Ok(Self { grid, cdf, half_line_scale })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = match self.half_line_scale {
            Some(s) if x > 0.0 => x / (x + s),
            Some(_) => return 0.0,
            None => x,
        };
        let lo = self.grid[0];
        let hi = *self.grid.last().unwrap_or(&lo);
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let h = (hi - lo) / (self.grid.len() - 1) as f64;
        let k = (((x - lo) / h) as usize).min(self.grid.len() - 2);
        let t = (x - self.grid[k]) / h;
        self.cdf[k] * (1.0 - t) + self.cdf[k + 1] * t
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Standard error of the mean.
pub fn std_err(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Linear-interpolation quantile (type 7), `q ∈ [0, 1]`.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let k = pos.floor() as usize;
    let frac = pos - k as f64;
    if k + 1 < v.len() {
        v[k] * (1.0 - frac) + v[k + 1] * frac
    } else {
        v[k]
    }
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
