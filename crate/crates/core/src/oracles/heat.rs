//! Heat kernels `P(t, x, y)` of the Laplace–Beltrami operator.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use super::{ln_cosh, ln_sinh};
use crate::error::{Error, Result};
use crate::manifolds::{ensure_same_space, distance, ManifoldPoint, Space, SpdPoint};
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};
use crate::spectral::hyp_polynomial_coeffs;

const TOL: Tolerance = Tolerance { abs: 0.0, rel: 1e-10 };

/// Unnormalized heat solution on one space, as a function of the pair
/// invariants returned by [`HeatSolution::invariants`].
pub trait HeatSolution {
    /// Manifold dimension (enters the Matérn mixing weight).
    fn manifold_dim(&self) -> usize;
    /// `‖ρ‖²`, the bottom of the spectrum of `−Δ`.
    fn rho_sq(&self) -> f64;
    fn invariants(&self, x: &ManifoldPoint, y: &ManifoldPoint) -> Result<Vec<f64>>;
    /// Invariants of a coincident pair.
    fn coincident(&self) -> Vec<f64>;
    /// `P(t, ·)` for the ordinary Laplacian.
    fn solution(&self, t: f64, inv: &[f64]) -> Result<f64>;
}

/// `(ρ/sinh ρ)·exp(−ρ²/2κ²)`, equal to 1 at `ρ = 0`.
pub fn heat_h3(rho: f64, kappa: f64) -> f64 {
    let r = rho.abs();
    let ratio = if r < 1e-8 { 1.0 - r * r / 6.0 } else { r / r.sinh() };
    ratio * (-r * r / (2.0 * kappa * kappa)).exp()
}

/// `∫_r^∞ s e^{−s²/4t}/√(cosh s − cosh r) ds` by the substitution
/// `s = r + u²`, which removes the endpoint singularity.
pub(crate) fn h2_profile(t: f64, r: f64) -> Result<f64> {
    let f = |u: f64| {
        if u == 0.0 {
            return 0.0;
        }
        let u2 = u * u;
        let s = r + u2;
        // cosh s − cosh r = 2 sinh(r + u²/2) sinh(u²/2)
        let ln_den = 0.5 * (std::f64::consts::LN_2 + ln_sinh(r + 0.5 * u2) + ln_sinh(0.5 * u2));
        let ln_num = (2.0 * u * s).ln() - (s * s) / (4.0 * t);
        (ln_num - ln_den).exp()
    };
    let width = (4.0 * t).powf(0.25).min((2.0 * t / r.max(1e-300)).sqrt());
    integrate_to_infinity(f, 0.0, width.max(1e-6), TOL)
}

/// Heat kernel on `H₂`, normalized at `ρ = 0`.
pub fn heat_h2(rho: f64, kappa: f64) -> Result<f64> {
    let t = kappa * kappa / 2.0;
    Ok(h2_profile(t, rho.abs())? / h2_profile(t, 0.0)?)
}

/// Symbolic term `coef · t^{−p} · r^a · cosh(r)^b · sinh(r)^{−c} · e^{−r²/4t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    coef: f64,
    p: i32,
    a: i32,
    b: i32,
    c: i32,
}

/// Heat kernels on odd-dimensional `H_n` from the `H₃` closed form by
/// repeated application of `P_{n+2} = −e^{−nt}/(2π sinh r)·∂_r P_n`.
#[derive(Debug, Clone)]
pub struct MillsonChain {
    n: usize,
    terms: Vec<Term>,
    /// `Σ` of the `e^{−nt}` exponents accumulated along the chain.
    gap: f64,
    /// Constant matching the coincident-point closed form to the chain.
    origin_const: f64,
    coeffs: Vec<f64>,
}

const SMALL_R: f64 = 0.05;

impl MillsonChain {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::Unsupported(format!(
                "the Millson chain covers odd n >= 3, got {n}"
            )));
        }
        let mut terms = vec![Term { coef: 1.0, p: 0, a: 1, b: 0, c: 1 }];
        let mut gap = 1.0;
        let mut dim = 3;
        while dim < n {
            terms = Self::step(&terms);
            gap += dim as f64;
            dim += 2;
        }
        let mut chain = Self { n, terms, gap, origin_const: 1.0, coeffs: hyp_polynomial_coeffs(n)? };
        // fix the constant of the coincident closed form by extrapolation at t = 1
        let direct = chain.extrapolate_to_zero(1.0);
        chain.origin_const = direct / chain.origin_shape(1.0);
        Ok(chain)
    }

    /// `−1/(2π sinh r) · ∂_r`, applied termwise.
    fn step(terms: &[Term]) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        let mut push = |t: Term| {
            if t.coef == 0.0 {
                return;
            }
            if let Some(e) = out.iter_mut().find(|e| (e.p, e.a, e.b, e.c) == (t.p, t.a, t.b, t.c)) {
                e.coef += t.coef;
            } else {
                out.push(t);
            }
        };
        let k = -1.0 / (2.0 * PI);
        for t in terms {
            // d/dr of r^a, cosh^b, sinh^{−c}, e^{−r²/4t}; then divide by sinh
            if t.a > 0 {
                push(Term { coef: k * t.coef * t.a as f64, a: t.a - 1, c: t.c + 1, ..*t });
            }
            if t.b > 0 {
                push(Term { coef: k * t.coef * t.b as f64, b: t.b - 1, c: t.c, ..*t });
            }
            if t.c > 0 {
                push(Term { coef: -k * t.coef * t.c as f64, b: t.b + 1, c: t.c + 2, ..*t });
            }
            push(Term { coef: -0.5 * k * t.coef, p: t.p + 1, a: t.a + 1, c: t.c + 1, ..*t });
        }
        out.retain(|t| t.coef != 0.0);
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn prefactor_ln(&self, t: f64) -> f64 {
        -1.5 * (4.0 * PI * t).ln() - self.gap * t
    }

    /// Direct evaluation of the symbolic chain, accurate for `r ≳ 0.05`.
    fn direct(&self, t: f64, r: f64) -> f64 {
        let (lr, lc, ls, lt) = (r.ln(), ln_cosh(r), ln_sinh(r), t.ln());
        let base = self.prefactor_ln(t) - r * r / (4.0 * t);
        self.terms
            .iter()
            .map(|term| {
                let l = base - term.p as f64 * lt + term.a as f64 * lr + term.b as f64 * lc
                    - term.c as f64 * ls;
                term.coef * l.exp()
            })
            .sum()
    }

    /// Richardson extrapolation of `direct(t, ·)` to `r = 0` in powers of `r²`.
    fn extrapolate_to_zero(&self, t: f64) -> f64 {
        let hs = [16.0 * SMALL_R, 8.0 * SMALL_R, 4.0 * SMALL_R, 2.0 * SMALL_R, SMALL_R];
        let mut v: Vec<f64> = hs.iter().map(|&h| self.direct(t, h)).collect();
        // each halving of h divides the r² error term by 4
        for level in 1..v.len() {
            let f = 4f64.powi(level as i32);
            for i in (level..v.len()).rev() {
                v[i] = (f * v[i] - v[i - 1]) / (f - 1.0);
            }
        }
        v[v.len() - 1]
    }

    /// `e^{−t‖ρ‖²}·Σ_j a_j ∫₀^∞ λ^j e^{−tλ²} dλ`: the coincident-point value
    /// up to a constant, from the spectral side.
    fn origin_shape(&self, t: f64) -> f64 {
        let rho = (self.n as f64 - 1.0) / 2.0;
        let s: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(j, a)| {
                let h = (j as f64 + 1.0) / 2.0;
                a * 0.5 * (ln_gamma(h) - h * t.ln()).exp()
            })
            .sum();
        (-t * rho * rho).exp() * s
    }

    /// `P_n(t, r)`.
    pub fn eval(&self, t: f64, r: f64) -> f64 {
        let r = r.abs();
        let p0 = self.origin_const * self.origin_shape(t);
        if r == 0.0 {
            return p0;
        }
        if r >= SMALL_R {
            return self.direct(t, r);
        }
        // cubic interpolation in r² through the exact origin value and three
        // direct evaluations
        let xs = [0.0, SMALL_R.powi(2), (2.0 * SMALL_R).powi(2), (3.0 * SMALL_R).powi(2)];
        let ys = [p0, self.direct(t, SMALL_R), self.direct(t, 2.0 * SMALL_R), self.direct(t, 3.0 * SMALL_R)];
        let x = r * r;
        let mut acc = 0.0;
        for i in 0..4 {
            let mut w = 1.0;
            for j in 0..4 {
                if i != j {
                    w *= (x - xs[j]) / (xs[i] - xs[j]);
                }
            }
            acc += w * ys[i];
        }
        acc
    }
}

/// `H_n` heat solution from the spectral side, for any `n ≥ 2`:
/// `e^{−tρ²} ∫₀^∞ e^{−tλ²} φ_λ(r) |c(λ)|⁻² dλ` with the zonal spherical
/// function in its integral form
/// `φ_λ(r) = ∫₀^π (cosh r − sinh r cos θ)^{−iλ−ρ} sin^{n−2}θ dθ / ∫₀^π sin^{n−2}θ dθ`.
#[derive(Debug, Clone)]
pub struct SpectralHeat {
    n: usize,
    coeffs: Vec<f64>,
    sphere_norm: f64,
}

const SPECTRAL_TOL: Tolerance = Tolerance { abs: 1e-14, rel: 1e-10 };

impl SpectralHeat {
    pub fn new(n: usize) -> Result<Self> {
        let coeffs = hyp_polynomial_coeffs(n)?;
        let sphere_norm = integrate(|th: f64| th.sin().powi(n as i32 - 2), 0.0, PI, SPECTRAL_TOL)?;
        Ok(Self { n, coeffs, sphere_norm })
    }

    fn rho(&self) -> f64 {
        (self.n as f64 - 1.0) / 2.0
    }

    fn c_inv_sq(&self, lam: f64) -> f64 {
        let poly: f64 = self.coeffs.iter().rev().fold(0.0, |acc, a| acc * lam + a);
        if self.n % 2 == 0 {
            poly * (PI * lam).tanh()
        } else {
            poly
        }
    }

    /// `Re φ_λ(r)`.
    pub fn zonal(&self, lam: f64, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(1.0);
        }
        let (ch, sh, rho, k) = (r.cosh(), r.sinh(), self.rho(), self.n as i32 - 2);
        let v = integrate(
            |th: f64| {
                let z = ch - sh * th.cos();
                let lz = z.ln();
                (-rho * lz).exp() * (lam * lz).cos() * th.sin().powi(k)
            },
            0.0,
            PI,
            SPECTRAL_TOL,
        )?;
        Ok(v / self.sphere_norm)
    }

    pub fn eval(&self, t: f64, r: f64) -> Result<f64> {
        let rho = self.rho();
        let r = r.abs();
        let f = |lam: f64| match self.zonal(lam, r) {
            Ok(z) => (-t * lam * lam).exp() * self.c_inv_sq(lam) * z,
            Err(_) => f64::NAN,
        };
        let v = integrate_to_infinity(f, 0.0, 1.0 / t.sqrt(), SPECTRAL_TOL)?;
        Ok((-t * rho * rho).exp() * v)
    }
}

/// Heat kernel on odd `H_n`, normalized at `ρ = 0`.
pub fn heat_hn_millson(n: usize, rho: f64, kappa: f64) -> Result<f64> {
    let chain = MillsonChain::new(n)?;
    let t = kappa * kappa / 2.0;
    Ok(chain.eval(t, rho) / chain.eval(t, 0.0))
}

/// Heat solution on `H_n` for `n = 2` (quadrature), `n = 3` (closed form),
/// odd `n ≥ 5` (Millson chain) and even `n ≥ 4` (spectral quadrature).
#[derive(Debug, Clone)]
pub enum HyperbolicHeat {
    H2,
    H3,
    Odd(MillsonChain),
    Spectral(SpectralHeat),
}

impl HyperbolicHeat {
    pub fn new(n: usize) -> Result<Self> {
        match n {
            2 => Ok(HyperbolicHeat::H2),
            3 => Ok(HyperbolicHeat::H3),
            n if n % 2 == 1 => Ok(HyperbolicHeat::Odd(MillsonChain::new(n)?)),
            n => Ok(HyperbolicHeat::Spectral(SpectralHeat::new(n)?)),
        }
    }

    fn n(&self) -> usize {
        match self {
            HyperbolicHeat::H2 => 2,
            HyperbolicHeat::H3 => 3,
            HyperbolicHeat::Odd(c) => c.dim(),
            HyperbolicHeat::Spectral(q) => q.n,
        }
    }

    /// `P(t, r)` as a function of geodesic distance.
    pub fn at_distance(&self, t: f64, r: f64) -> Result<f64> {
        let r = r.abs();
        Ok(match self {
            HyperbolicHeat::H2 => {
                std::f64::consts::SQRT_2 * (-t / 4.0).exp() * (4.0 * PI * t).powf(-1.5) * h2_profile(t, r)?
            }
            HyperbolicHeat::H3 => {
                let ratio = if r < 1e-8 { 1.0 } else { r / r.sinh() };
                ratio * (-1.5 * (4.0 * PI * t).ln() - t - r * r / (4.0 * t)).exp()
            }
            HyperbolicHeat::Odd(c) => c.eval(t, r),
            HyperbolicHeat::Spectral(q) => q.eval(t, r)?,
        })
    }
}

impl HeatSolution for HyperbolicHeat {
    fn manifold_dim(&self) -> usize {
        self.n()
    }

    fn rho_sq(&self) -> f64 {
        ((self.n() as f64 - 1.0) / 2.0).powi(2)
    }

    fn invariants(&self, x: &ManifoldPoint, y: &ManifoldPoint) -> Result<Vec<f64>> {
        ensure_same_space(x.space(), Space::Hyperbolic { n: self.n() })?;
        Ok(vec![distance(x, y)?])
    }

    fn coincident(&self) -> Vec<f64> {
        vec![0.0]
    }

    fn solution(&self, t: f64, inv: &[f64]) -> Result<f64> {
        self.at_distance(t, inv[0])
    }
}

/// `(H₁, H₂)`, `H₁ ≥ H₂`: log singular values of `L_Y⁻¹·L_X` with lower
/// Cholesky factors.
pub fn spd2_invariants(x: &SpdPoint, y: &SpdPoint) -> Result<(f64, f64)> {
    if x.dim() != 2 || y.dim() != 2 {
        return Err(Error::Unsupported("the SPD closed form needs d = 2".into()));
    }
    let lx = x.cholesky_factor();
    let ly = y.cholesky_factor();
    let m = ly.solve_lower_triangular(&lx).ok_or(Error::Singular)?;
    let sv = m.singular_values();
    let (a, b) = (sv[0].ln(), sv[1].ln());
    Ok((a.max(b), a.min(b)))
}

/// `∫₀^∞ (2s+α)e^{−s(s+α)/κ²}/√(sinh s·sinh(s+α)) ds` with `s = u²`.
fn spd2_profile(alpha: f64, kappa: f64) -> Result<f64> {
    let k2 = kappa * kappa;
    let f = |u: f64| {
        if u == 0.0 {
            return 0.0;
        }
        let s = u * u;
        let ln_den = 0.5 * (ln_sinh(s) + ln_sinh(s + alpha));
        ((2.0 * u * (2.0 * s + alpha)).ln() - s * (s + alpha) / k2 - ln_den).exp()
    };
    let width = kappa.sqrt().min(kappa / alpha.max(1e-300).sqrt()).max(1e-6);
    integrate_to_infinity(f, 0.0, width, TOL)
}

/// Heat kernel on `SPD(2)`, normalized at `X = Y`.
pub fn heat_spd2(x: &SpdPoint, y: &SpdPoint, kappa: f64) -> Result<f64> {
    let (h1, h2) = spd2_invariants(x, y)?;
    let alpha = h1 - h2;
    let pref = (-(h1 * h1 + h2 * h2) / (2.0 * kappa * kappa)).exp();
    Ok(pref * spd2_profile(alpha, kappa)? / spd2_profile(0.0, kappa)?)
}

/// Heat solution on `SPD(2) ≅ ℝ × SSPD(2)`: a one-dimensional heat kernel in
/// the trace direction times the `H₂` heat kernel of the traceless part,
/// whose metric is half the hyperbolic one.
#[derive(Debug, Clone, Copy)]
pub struct Spd2Heat;

impl HeatSolution for Spd2Heat {
    fn manifold_dim(&self) -> usize {
        3
    }

    fn rho_sq(&self) -> f64 {
        0.5
    }

    fn invariants(&self, x: &ManifoldPoint, y: &ManifoldPoint) -> Result<Vec<f64>> {
        match (x, y) {
            (ManifoldPoint::Spd(a), ManifoldPoint::Spd(b)) => {
                let (h1, h2) = spd2_invariants(a, b)?;
                Ok(vec![h1, h2])
            }
            _ => Err(Error::SpaceMismatch(x.space().to_string(), "spd2".into())),
        }
    }

    fn coincident(&self) -> Vec<f64> {
        vec![0.0, 0.0]
    }

    fn solution(&self, t: f64, inv: &[f64]) -> Result<f64> {
        let (h1, h2) = (inv[0], inv[1]);
        let trace = (4.0 * PI * t).powf(-0.5) * (-(h1 + h2).powi(2) / (8.0 * t)).exp();
        Ok(trace * 2.0 * HyperbolicHeat::H2.at_distance(2.0 * t, h1 - h2)?)
    }
}
