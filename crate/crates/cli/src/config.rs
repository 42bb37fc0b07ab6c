//! Run configuration: one JSON document, every field defaulted, flags
//! override. The fully resolved config is echoed into each output header.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use symgp::features::{BasisMethod, EstimatorMode};
use symgp::manifolds::{point_at_distance, random_point, ManifoldPoint, Space};
use symgp::spectral::KernelSpec;

/// Points a command evaluates at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Grid {
    /// `count` points along a geodesic from the base point, distances
    /// evenly spaced in `[0, max_distance]`.
    Geodesic { count: usize, max_distance: f64 },
    /// `count` random points at the given spread.
    Random { count: usize, scale: f64 },
    /// Explicit points.
    Points { points: Vec<ManifoldPoint> },
}

impl Default for Grid {
    fn default() -> Self {
        Grid::Geodesic { count: 21, max_distance: 3.0 }
    }
}

impl Grid {
    pub fn points<R: Rng + ?Sized>(&self, space: Space, rng: &mut R) -> Result<Vec<ManifoldPoint>> {
        Ok(match self {
            Grid::Geodesic { count, max_distance } => {
                if *count == 0 {
                    bail!("geodesic grid needs count >= 1");
                }
                let step = if *count > 1 { max_distance / (*count - 1) as f64 } else { 0.0 };
                (0..*count).map(|i| point_at_distance(space, step * i as f64)).collect()
            }
            Grid::Random { count, scale } => (0..*count).map(|_| random_point(space, *scale, rng)).collect(),
            Grid::Points { points } => {
                for p in points {
                    if p.space() != space {
                        bail!("grid point on {} but the run is on {space}", p.space());
                    }
                }
                points.clone()
            }
        })
    }
}

/// Kernel used for posterior moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentKernel {
    /// PSD Gram matrices of the feature basis.
    Features,
    /// Closed-form or quadrature reference kernel.
    Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub space: Space,
    pub spec: KernelSpec,
    pub method: BasisMethod,
    pub estimator: EstimatorMode,
    #[serde(rename = "L")]
    pub l: usize,
    pub seed: u64,
    pub grid: Grid,
    /// Evaluation point the grid is compared against; base point if absent.
    pub anchor: Option<ManifoldPoint>,
    /// Independent bases per estimate (standard errors come from these).
    pub bases: usize,
    /// Prior paths (`sample-prior`) or posterior sample columns (`gp-posterior`).
    pub paths: usize,
    /// Dataset file for `gp-posterior`: `.json` or `.csv`.
    pub dataset: Option<PathBuf>,
    pub moment_kernel: MomentKernel,
    /// Feature counts for `error-curve`.
    pub ls: Vec<usize>,
    /// Seeds per feature count for `error-curve`.
    pub seeds: usize,
    /// Length scales for `accept-rate` and `range-curve`.
    pub kappas: Vec<f64>,
    /// Proposals per length scale for `accept-rate`.
    pub trials: usize,
    /// Pair distance for `range-curve`.
    pub distance: f64,
    /// Monte-Carlo samples of the limiting kernel.
    pub limit_samples: usize,
    /// Draws for `spectral-sample`.
    pub draws: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            space: Space::Hyperbolic { n: 2 },
            spec: KernelSpec::heat(1.0, 1.0).expect("valid default spec"),
            method: BasisMethod::Rejection,
            estimator: EstimatorMode::Psd,
            l: 1000,
            seed: 0,
            grid: Grid::default(),
            anchor: None,
            bases: 10,
            paths: 5,
            dataset: None,
            moment_kernel: MomentKernel::Features,
            ls: (6..=13).map(|p| 1usize << p).collect(),
            seeds: 20,
            kappas: vec![0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0],
            trials: 20_000,
            distance: 1.0,
            limit_samples: 100_000,
            draws: 10_000,
        }
    }
}

/// Flag overrides applied on top of the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub space: Option<Space>,
    pub method: Option<BasisMethod>,
}

impl Config {
    pub fn load(path: Option<&std::path::Path>, overrides: &Overrides) -> Result<Self> {
        let mut cfg: Config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => Config::default(),
        };
        if let Some(s) = overrides.seed {
            cfg.seed = s;
        }
        if let Some(s) = overrides.space {
            cfg.space = s;
            // points of another space would no longer fit
            if cfg.anchor.as_ref().is_some_and(|a| a.space() != s) {
                cfg.anchor = None;
            }
        }
        if let Some(m) = overrides.method {
            cfg.method = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.l == 0 || self.bases == 0 {
            bail!("L and bases must be >= 1");
        }
        if let Some(a) = &self.anchor {
            if a.space() != self.space {
                bail!("anchor on {} but the run is on {}", a.space(), self.space);
            }
        }
        if self.kappas.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            bail!("kappas must be positive and finite");
        }
        if !(self.distance >= 0.0 && self.distance.is_finite()) {
            bail!("distance must be non-negative");
        }
        Ok(())
    }

    pub fn anchor(&self) -> ManifoldPoint {
        self.anchor.clone().unwrap_or_else(|| self.space.base_point())
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<KernelSpec> {
        Ok(KernelSpec::new(self.spec.nu, kappa, self.spec.sigma2, self.spec.laplacian)?)
    }
}
