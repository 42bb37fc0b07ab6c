//! Stationary Gaussian-process kernels on the non-compact symmetric spaces
//! `H_n` (hyperbolic space, hyperboloid model) and `SPD(d)` (positive-definite
//! matrices with the affine-invariant metric).
//!
//! The crate is organized as:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`manifolds`] | points, distances, group elements, Iwasawa/RQ factorizations, Haar sampling |
//! | [`spectral`] | heat/Matérn spectral densities, c-functions, exact rejection samplers |
//! | [`features`] | zonal spherical functions, random feature bases, kernel estimators, prior paths |
//! | [`oracles`] | closed-form and quadrature reference kernels |
//! | [`gp`] | posterior moments, pathwise-conditioned posterior samples, marginal likelihood |
//! | [`quadrature`] | adaptive Gauss–Kronrod integration used by the oracles |
//! | [`stats`] | KS tests and small summary helpers used by the validation suites |
//! | [`rng`] | per-component random streams derived from one seed |
//!
//! Kernels are evaluated through random spherical Fourier features: a spectral
//! sample `λ`, a Haar-random isotropy element `h` and the abelian Iwasawa
//! coordinate `a(h·g)` give one feature `exp((iλ + ρ)·a(h·g))`.

pub mod error;
pub mod features;
pub mod gp;
pub mod manifolds;
pub mod oracles;
pub mod quadrature;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use features::{build_basis, BasisMethod, EstimatorMode, FeatureBasis};
pub use gp::{Dataset, KernelSource};
pub use manifolds::{GroupElement, HyperbolicPoint, ManifoldPoint, Space, SpdPoint};
pub use spectral::{KernelSpec, Laplacian, RhoData};
