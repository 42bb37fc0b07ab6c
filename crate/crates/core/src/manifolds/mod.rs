//! Points, distances, group actions and Iwasawa decompositions for `H_n`
//! and `SPD(d)`.

mod hyperbolic;
mod linalg;
mod spd;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use hyperbolic::{
    boost, dist_hyperbolic, embed_rotation, minkowski_form, minkowski_gram, HyperbolicPoint,
    ACOSH_CLAMP,
};
pub use linalg::{haar_orthogonal, lq_decompose, rotation_e1_to, rq_decompose, LqFactors, RqFactors};
pub use spd::{dist_spd, relative_eigenvalues, SpdPoint};

const GROUP_TOL: f64 = 1e-10;

/// The two supported symmetric spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    /// `H_n`, `n ≥ 2`.
    Hyperbolic { n: usize },
    /// `SPD(d)`, `d ≥ 2`.
    Spd { d: usize },
}

impl Space {
    pub fn hyperbolic(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("H_n needs n >= 2, got {n}")));
        }
        Ok(Space::Hyperbolic { n })
    }

    pub fn spd(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!("SPD(d) needs d >= 2, got {d}")));
        }
        Ok(Space::Spd { d })
    }

    /// Manifold dimension: `n` for `H_n`, `d(d+1)/2` for `SPD(d)`.
    pub fn manifold_dim(&self) -> usize {
        match *self {
            Space::Hyperbolic { n } => n,
            Space::Spd { d } => d * (d + 1) / 2,
        }
    }

    /// Dimension of `𝔞*` (the spectral variable).
    pub fn rank(&self) -> usize {
        match *self {
            Space::Hyperbolic { .. } => 1,
            Space::Spd { d } => d,
        }
    }

    /// Size of the isotropy group's defining representation.
    pub fn isotropy_dim(&self) -> usize {
        match *self {
            Space::Hyperbolic { n } => n,
            Space::Spd { d } => d,
        }
    }

    pub fn base_point(&self) -> ManifoldPoint {
        match *self {
            Space::Hyperbolic { n } => ManifoldPoint::Hyperbolic(HyperbolicPoint::base(n)),
            Space::Spd { d } => ManifoldPoint::Spd(SpdPoint::identity(d)),
        }
    }

    /// Haar sample from the isotropy group: `SO(n)` for `H_n`, `O(d)` for `SPD(d)`.
    pub fn haar_isotropy<R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<f64> {
        match *self {
            Space::Hyperbolic { n } => haar_orthogonal(n, true, rng),
            Space::Spd { d } => haar_orthogonal(d, false, rng),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Hyperbolic { n } => write!(f, "h{n}"),
            Space::Spd { d } => write!(f, "spd{d}"),
        }
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let bad = || Error::InvalidArgument(format!("unknown space '{s}' (expected hN or spdD)"));
        if let Some(rest) = s.strip_prefix("spd") {
            Space::spd(rest.parse().map_err(|_| bad())?)
        } else if let Some(rest) = s.strip_prefix('h') {
            Space::hyperbolic(rest.parse().map_err(|_| bad())?)
        } else {
            Err(bad())
        }
    }
}

impl Serialize for Space {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Space {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A point on one of the supported spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub enum ManifoldPoint {
    Hyperbolic(HyperbolicPoint),
    Spd(SpdPoint),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "lowercase")]
enum PointRepr {
    Hyperbolic {
        n: usize,
        v: Vec<f64>,
    },
    Spd {
        d: usize,
        #[serde(rename = "S")]
        s: Vec<Vec<f64>>,
    },
}

impl TryFrom<PointRepr> for ManifoldPoint {
    type Error = Error;

    fn try_from(r: PointRepr) -> Result<Self> {
        match r {
            PointRepr::Hyperbolic { n, v } => {
                if v.len() != n + 1 {
                    return Err(Error::DimensionMismatch {
                        expected: n + 1,
                        got: v.len(),
                    });
                }
                Ok(ManifoldPoint::Hyperbolic(HyperbolicPoint::new(v)?))
            }
            PointRepr::Spd { d, s } => {
                if s.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, got: s.len() });
                }
                Ok(ManifoldPoint::Spd(SpdPoint::from_rows(&s)?))
            }
        }
    }
}

impl From<ManifoldPoint> for PointRepr {
    fn from(p: ManifoldPoint) -> Self {
        match p {
            ManifoldPoint::Hyperbolic(h) => PointRepr::Hyperbolic {
                n: h.dim(),
                v: h.as_slice().to_vec(),
            },
            ManifoldPoint::Spd(s) => PointRepr::Spd {
                d: s.dim(),
                s: s.to_rows(),
            },
        }
    }
}

impl ManifoldPoint {
    pub fn space(&self) -> Space {
        match self {
            ManifoldPoint::Hyperbolic(h) => Space::Hyperbolic { n: h.dim() },
            ManifoldPoint::Spd(s) => Space::Spd { d: s.dim() },
        }
    }

    /// Flat coordinate list used for CSV output: hyperboloid coordinates, or
    /// the row-major upper triangle of `S`.
    pub fn flat_coords(&self) -> Vec<f64> {
        match self {
            ManifoldPoint::Hyperbolic(h) => h.as_slice().to_vec(),
            ManifoldPoint::Spd(s) => {
                let d = s.dim();
                let m = s.matrix();
                let mut out = Vec::with_capacity(d * (d + 1) / 2);
                for i in 0..d {
                    for j in i..d {
                        out.push(m[(i, j)]);
                    }
                }
                out
            }
        }
    }

    /// Column labels matching [`ManifoldPoint::flat_coords`].
    pub fn coord_labels(space: Space) -> Vec<String> {
        match space {
            Space::Hyperbolic { n } => (0..=n).map(|i| format!("v{i}")).collect(),
            Space::Spd { d } => {
                let mut out = Vec::new();
                for i in 0..d {
                    for j in i..d {
                        out.push(format!("s{i}{j}"));
                    }
                }
                out
            }
        }
    }
}

impl ManifoldPoint {
    /// Inverse of [`ManifoldPoint::flat_coords`].
    pub fn from_flat_coords(space: Space, coords: &[f64]) -> Result<Self> {
        let expected = Self::coord_labels(space).len();
        if coords.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: coords.len() });
        }
        match space {
            Space::Hyperbolic { .. } => Ok(ManifoldPoint::Hyperbolic(HyperbolicPoint::new(coords.to_vec())?)),
            Space::Spd { d } => {
                let mut m = DMatrix::zeros(d, d);
                let mut k = 0;
                for i in 0..d {
                    for j in i..d {
                        m[(i, j)] = coords[k];
                        m[(j, i)] = coords[k];
                        k += 1;
                    }
                }
                Ok(ManifoldPoint::Spd(SpdPoint::new(m)?))
            }
        }
    }
}

pub(crate) fn ensure_same_space(a: Space, b: Space) -> Result<()> {
    if a != b {
        return Err(Error::SpaceMismatch(a.to_string(), b.to_string()));
    }
    Ok(())
}

/// Geodesic distance between two points of the same space.
pub fn distance(x: &ManifoldPoint, y: &ManifoldPoint) -> Result<f64> {
    match (x, y) {
        (ManifoldPoint::Hyperbolic(a), ManifoldPoint::Hyperbolic(b)) => {
            ensure_same_space(x.space(), y.space())?;
            dist_hyperbolic(a, b)
        }
        (ManifoldPoint::Spd(a), ManifoldPoint::Spd(b)) => {
            ensure_same_space(x.space(), y.space())?;
            dist_spd(a, b)
        }
        _ => Err(Error::SpaceMismatch(x.space().to_string(), y.space().to_string())),
    }
}

/// Matrix representative of an element of `SO₀(1, n)` or `GL(d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    space: Space,
    m: DMatrix<f64>,
}

impl GroupElement {
    /// Validates the group invariants for the given space.
    pub fn new(space: Space, m: DMatrix<f64>) -> Result<Self> {
        match space {
            Space::Hyperbolic { n } => {
                if m.nrows() != n + 1 || m.ncols() != n + 1 {
                    return Err(Error::DimensionMismatch { expected: n + 1, got: m.nrows() });
                }
                let b = minkowski_gram(n);
                let scale = linalg::max_abs(&m).powi(2).max(1.0);
                let err = linalg::max_abs(&(m.transpose() * &b * &m - &b));
                if err > GROUP_TOL * scale {
                    return Err(Error::InvalidGroupElement(format!(
                        "M^T B M differs from B by {err:e}"
                    )));
                }
                let det = m.determinant();
                if (det - 1.0).abs() > GROUP_TOL * scale {
                    return Err(Error::InvalidGroupElement(format!("det M = {det}")));
                }
                if m[(0, 0)] <= 0.0 {
                    return Err(Error::InvalidGroupElement("M00 must be positive".into()));
                }
            }
            Space::Spd { d } => {
                if m.nrows() != d || m.ncols() != d {
                    return Err(Error::DimensionMismatch { expected: d, got: m.nrows() });
                }
                if m.determinant() == 0.0 || !m.iter().all(|x| x.is_finite()) {
                    return Err(Error::InvalidGroupElement("singular matrix".into()));
                }
            }
        }
        Ok(Self { space, m })
    }

    pub(crate) fn from_matrix_unchecked(space: Space, m: DMatrix<f64>) -> Self {
        Self { space, m }
    }

    pub fn identity(space: Space) -> Self {
        let k = match space {
            Space::Hyperbolic { n } => n + 1,
            Space::Spd { d } => d,
        };
        Self {
            space,
            m: DMatrix::identity(k, k),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        ensure_same_space(self.space, other.space)?;
        Ok(Self {
            space: self.space,
            m: &self.m * &other.m,
        })
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        let m = match self.space {
            Space::Hyperbolic { n } => {
                let b = minkowski_gram(n);
                &b * self.m.transpose() * &b
            }
            Space::Spd { .. } => self.m.clone().try_inverse().ok_or(Error::Singular)?,
        };
        Ok(Self { space: self.space, m })
    }

    /// Group action: `M·v` on the hyperboloid, `M·S·Mᵀ` on `SPD(d)`.
    pub fn act(&self, x: &ManifoldPoint) -> Result<ManifoldPoint> {
        ensure_same_space(self.space, x.space())?;
        Ok(match x {
            ManifoldPoint::Hyperbolic(h) => {
                let v = &self.m * h.coords();
                ManifoldPoint::Hyperbolic(HyperbolicPoint::from_vector_unchecked(v))
            }
            ManifoldPoint::Spd(s) => {
                let t = &self.m * s.matrix() * self.m.transpose();
                ManifoldPoint::Spd(SpdPoint::from_matrix_unchecked(t))
            }
        })
    }
}

/// Iwasawa factors `M = N·A·H` with `A = exp(a)`.
#[derive(Debug, Clone)]
pub struct IwasawaData {
    /// Abelian coordinates: `[t]` for `H_n`, `(log u₁, …, log u_d)` for `SPD(d)`.
    pub coords: Vec<f64>,
    pub n_part: DMatrix<f64>,
    pub a_part: DMatrix<f64>,
    pub h_part: DMatrix<f64>,
}

impl IwasawaData {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.n_part * &self.a_part * &self.h_part
    }
}

/// Orthogonal change of basis to light-cone coordinates ordered
/// `(e₊, e₂, …, e_n, e₋)` with `e± = (e₀ ± e₁)/√2`. In this ordering the
/// `N·A` factors of `SO₀(1, n)` are upper triangular.
fn light_cone_basis(n: usize) -> DMatrix<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut q = DMatrix::zeros(n + 1, n + 1);
    q[(0, 0)] = s;
    q[(1, 0)] = s;
    q[(0, n)] = s;
    q[(1, n)] = -s;
    for k in 2..=n {
        q[(k, k - 1)] = 1.0;
    }
    q
}

/// Iwasawa decomposition in `SO₀(1, n)`: conjugate into light-cone
/// coordinates, factor as `R·Q` in `SL(n+1)`, conjugate back. `A(M)` is the
/// boost `A_t` with `t = log R₀₀`.
pub fn iwasawa_so1n(g: &GroupElement) -> Result<IwasawaData> {
    let n = match g.space {
        Space::Hyperbolic { n } => n,
        Space::Spd { .. } => {
            return Err(Error::InvalidGroupElement("expected an element of SO0(1,n)".into()))
        }
    };
    let q = light_cone_basis(n);
    let conj = q.transpose() * &g.m * &q;
    let f = rq_decompose(&conj)?;
    let u = &f.u;
    let a_diag = DMatrix::from_diagonal(u);
    let n_conj = &f.r * DMatrix::from_diagonal(&u.map(|x| 1.0 / x));
    Ok(IwasawaData {
        coords: vec![f.log_u[0]],
        n_part: &q * n_conj * q.transpose(),
        a_part: &q * a_diag * q.transpose(),
        h_part: &q * f.q * q.transpose(),
    })
}

/// RQ-based decomposition in `GL(d)`: `M = N·A·H`, `N` upper unitriangular.
pub fn iwasawa_gl(g: &GroupElement) -> Result<IwasawaData> {
    let f = rq_decompose(&g.m)?;
    let inv_u = f.u.map(|x| 1.0 / x);
    Ok(IwasawaData {
        coords: f.log_u.iter().copied().collect(),
        n_part: &f.r * DMatrix::from_diagonal(&inv_u),
        a_part: DMatrix::from_diagonal(&f.u),
        h_part: f.q,
    })
}

/// Decomposition dispatch on the element's space.
pub fn iwasawa(g: &GroupElement) -> Result<IwasawaData> {
    match g.space {
        Space::Hyperbolic { .. } => iwasawa_so1n(g),
        Space::Spd { .. } => iwasawa_gl(g),
    }
}

/// A group element `g` with `g·x₀ = x`.
///
/// `H_n`: `x = (cosh r, sinh r·ū)` gives `Rot(e₁ → ū)·A_r`.
/// `SPD(d)`: the lower Cholesky factor of `x`.
pub fn point_to_group(x: &ManifoldPoint) -> GroupElement {
    match x {
        ManifoldPoint::Hyperbolic(h) => {
            let n = h.dim();
            let spatial = h.coords().rows(1, n).into_owned();
            let sinh_r = spatial.norm();
            let space = Space::Hyperbolic { n };
            if sinh_r < 1e-300 {
                return GroupElement::identity(space);
            }
            let r = sinh_r.asinh();
            let rot = rotation_e1_to(&(spatial / sinh_r));
            GroupElement::from_matrix_unchecked(space, embed_rotation(&rot) * boost(n, r))
        }
        ManifoldPoint::Spd(s) => {
            GroupElement::from_matrix_unchecked(Space::Spd { d: s.dim() }, s.cholesky_factor())
        }
    }
}

/// Random isometry: a Haar rotation times a boost with `t ~ U(0, 2)` on `H_n`;
/// a Gaussian matrix with `|det| > 1e−6` acting by congruence on `SPD(d)`.
pub fn random_isometry<R: Rng + ?Sized>(space: Space, rng: &mut R) -> GroupElement {
    match space {
        Space::Hyperbolic { n } => {
            let rot = embed_rotation(&haar_orthogonal(n, true, rng));
            let t = rng.random_range(0.0..2.0);
            GroupElement::from_matrix_unchecked(space, rot * boost(n, t))
        }
        Space::Spd { d } => loop {
            let a = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
            if a.determinant().abs() > 1e-6 {
                break GroupElement::from_matrix_unchecked(space, a);
            }
        },
    }
}

/// Random point at a controlled spread around the base point, used by tests,
/// the CLI grids and validation suites.
pub fn random_point<R: Rng + ?Sized>(space: Space, scale: f64, rng: &mut R) -> ManifoldPoint {
    match space {
        Space::Hyperbolic { n } => {
            let s: Vec<f64> = (0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
            ManifoldPoint::Hyperbolic(HyperbolicPoint::from_spatial(&s))
        }
        Space::Spd { d } => {
            // exp of a random symmetric matrix
            let a = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
            let sym = (&a + a.transpose()) * (0.5 * scale);
            let eig = sym.symmetric_eigen();
            let exp_vals = eig.eigenvalues.map(f64::exp);
            let s = &eig.eigenvectors * DMatrix::from_diagonal(&exp_vals) * eig.eigenvectors.transpose();
            ManifoldPoint::Spd(SpdPoint::from_matrix_unchecked(s))
        }
    }
}

/// Point at geodesic distance `r` from the base point along the first axis
/// (`H_n`), or `diag(e^{r/√2}, e^{−r/√2}, 1, …)` for `SPD(d)`.
pub fn point_at_distance(space: Space, r: f64) -> ManifoldPoint {
    match space {
        Space::Hyperbolic { n } => {
            let mut s = vec![0.0; n];
            s[0] = r.sinh();
            ManifoldPoint::Hyperbolic(HyperbolicPoint::from_spatial(&s))
        }
        Space::Spd { d } => {
            let mut diag = DVector::from_element(d, 1.0);
            let c = r / std::f64::consts::SQRT_2;
            diag[0] = c.exp();
            diag[1] = (-c).exp();
            ManifoldPoint::Spd(SpdPoint::from_matrix_unchecked(DMatrix::from_diagonal(&diag)))
        }
    }
}

#[cfg(test)]
mod tests;
