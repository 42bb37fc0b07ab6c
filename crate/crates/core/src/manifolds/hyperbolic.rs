//! Hyperboloid model of `H_n`: the forward sheet `{⟨v,v⟩_M = −1, v₀ > 0}` in
//! Minkowski space with `B = diag(−1, 1, …, 1)`, base point `(1, 0, …, 0)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-10;
/// Arguments of `arccosh` within this distance below 1 are clamped.
pub const ACOSH_CLAMP: f64 = 1e-9;

/// Minkowski bilinear form `−u₀v₀ + Σ_{i≥1} u_i v_i`.
pub fn minkowski_form(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    if u.is_empty() {
        return Err(Error::InvalidArgument("empty vector".into()));
    }
    let spatial: f64 = u[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum();
    Ok(spatial - u[0] * v[0])
}

/// A point of `H_n` in hyperboloid coordinates (length `n + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicPoint {
    v: DVector<f64>,
}

impl HyperbolicPoint {
    /// Validates the Minkowski norm and the forward-sheet condition.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.len() < 2 {
            return Err(Error::InvalidPoint(format!(
                "hyperboloid coordinates need length >= 2, got {}",
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        let q = minkowski_form(&v, &v)?;
        // relative tolerance: rounding in −v₀² + |v̄|² scales with v₀²
        if (q + 1.0).abs() > NORM_TOL * v[0].powi(2).max(1.0) {
            return Err(Error::InvalidPoint(format!("Minkowski norm {q} != -1")));
        }
        if v[0] < 1.0 - NORM_TOL {
            return Err(Error::InvalidPoint(format!("v0 = {} is not on the forward sheet", v[0])));
        }
        Ok(Self { v: DVector::from_vec(v) })
    }

    /// Builds a point from its spatial part `v̄`, setting `v₀ = √(1 + |v̄|²)`.
    pub fn from_spatial(spatial: &[f64]) -> Self {
        let s2: f64 = spatial.iter().map(|x| x * x).sum();
        let mut v = Vec::with_capacity(spatial.len() + 1);
        v.push((1.0 + s2).sqrt());
        v.extend_from_slice(spatial);
        Self { v: DVector::from_vec(v) }
    }

    pub fn base(n: usize) -> Self {
        let mut v = DVector::zeros(n + 1);
        v[0] = 1.0;
        Self { v }
    }

    /// Intrinsic dimension `n`.
    pub fn dim(&self) -> usize {
        self.v.len() - 1
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn as_slice(&self) -> &[f64] {
        self.v.as_slice()
    }

    pub(crate) fn from_vector_unchecked(v: DVector<f64>) -> Self {
        Self { v }
    }

    /// Poincaré-ball preimage `b_i = v_i / (1 + v₀)`.
    pub fn to_ball(&self) -> Vec<f64> {
        let denom = 1.0 + self.v[0];
        self.v.iter().skip(1).map(|x| x / denom).collect()
    }

    /// Image of a Poincaré-ball point on the hyperboloid.
    pub fn from_ball(b: &[f64]) -> Result<Self> {
        let nb2: f64 = b.iter().map(|x| x * x).sum();
        if b.is_empty() {
            return Err(Error::InvalidPoint("empty ball point".into()));
        }
        if nb2 >= 1.0 || !nb2.is_finite() {
            return Err(Error::InvalidPoint(format!("ball point has norm {} >= 1", nb2.sqrt())));
        }
        let denom = 1.0 - nb2;
        let mut v = Vec::with_capacity(b.len() + 1);
        v.push((1.0 + nb2) / denom);
        v.extend(b.iter().map(|x| 2.0 * x / denom));
        Ok(Self { v: DVector::from_vec(v) })
    }
}

/// Geodesic distance `arccosh(−⟨x, x′⟩_M)`.
///
/// Evaluated through `2·asinh(½·√⟨x−x′, x−x′⟩_M)`, which equals the arccosh
/// form but keeps full precision for nearby points.
pub fn dist_hyperbolic(x: &HyperbolicPoint, y: &HyperbolicPoint) -> Result<f64> {
    let arg = -minkowski_form(x.as_slice(), y.as_slice())?;
    let scale = x.v[0].abs().max(y.v[0].abs()).max(1.0);
    if arg < 1.0 - ACOSH_CLAMP * scale * scale {
        return Err(Error::InvalidPoint(format!("arccosh argument {arg} < 1")));
    }
    let diff = &x.v - &y.v;
    let chord = minkowski_form(diff.as_slice(), diff.as_slice())?.max(0.0);
    Ok(2.0 * (0.5 * chord.sqrt()).asinh())
}

/// Boost `A_t` in the `(0, 1)` plane, embedded in `SO₀(1, n)`.
pub fn boost(n: usize, t: f64) -> DMatrix<f64> {
    let mut a = DMatrix::identity(n + 1, n + 1);
    a[(0, 0)] = t.cosh();
    a[(1, 1)] = t.cosh();
    a[(0, 1)] = t.sinh();
    a[(1, 0)] = t.sinh();
    a
}

/// Embeds `h ∈ SO(n)` block-diagonally as `diag(1, h)`.
pub fn embed_rotation(h: &DMatrix<f64>) -> DMatrix<f64> {
    let n = h.nrows();
    let mut m = DMatrix::identity(n + 1, n + 1);
    m.view_mut((1, 1), (n, n)).copy_from(h);
    m
}

/// Minkowski Gram matrix `diag(−1, 1, …, 1)`.
pub fn minkowski_gram(n: usize) -> DMatrix<f64> {
    let mut b = DMatrix::identity(n + 1, n + 1);
    b[(0, 0)] = -1.0;
    b
}
