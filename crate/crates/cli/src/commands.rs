//! One function per subcommand, each returning the output table.

use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;
use symgp::features::{build_basis, kernel_estimate, kernel_matrix, limiting_kernel, prior_sample, BasisMethod};
use symgp::gp::{posterior_moments, Dataset, KernelSource, PathwiseSampler};
use symgp::manifolds::{distance, point_at_distance, ManifoldPoint};
use symgp::oracles::reference_kernel;
use symgp::rng::{stream_rng, Stream};
use symgp::spectral::{acceptance_rate, c_inv_sq, ImportanceProposal, SpectralSampler};
use symgp::stats::{mean, median, quantile, std_err};

use crate::config::{Config, MomentKernel};
use crate::output::{num, nums, Table};

fn coord_columns(cfg: &Config) -> Vec<String> {
    ManifoldPoint::coord_labels(cfg.space)
}

fn grid(cfg: &Config) -> Result<Vec<ManifoldPoint>> {
    cfg.grid.points(cfg.space, &mut stream_rng(cfg.seed, Stream::Points, 0))
}

fn basis(cfg: &Config, index: u64, l: usize) -> Result<symgp::FeatureBasis> {
    let mut rng = stream_rng(cfg.seed, Stream::Basis, index);
    Ok(build_basis(&cfg.spec, cfg.space, l, cfg.method, &mut rng)?.with_seed(cfg.seed))
}

/// `k̂(x, anchor)` over the grid, mean and standard error over `bases`
/// independent bases, plus the reference value where one exists.
pub fn kernel_eval(cfg: &Config) -> Result<Table> {
    let pts = grid(cfg)?;
    let anchor = cfg.anchor();
    let mut cols = coord_columns(cfg);
    cols.extend(["distance", "k_hat", "stderr", "k_ref"].map(String::from));
    let mut vals = vec![Vec::with_capacity(cfg.bases); pts.len()];
    for b in 0..cfg.bases {
        let basis = basis(cfg, b as u64, cfg.l)?;
        for (i, p) in pts.iter().enumerate() {
            vals[i].push(kernel_estimate(&basis, p, &anchor, cfg.estimator)?);
        }
    }
    let mut t = Table::new(cols);
    for (p, v) in pts.iter().zip(&vals) {
        let mut row = nums(&p.flat_coords());
        row.push(num(distance(p, &anchor)?));
        row.push(num(mean(v)));
        row.push(num(std_err(v)));
        row.push(match reference_kernel(&cfg.spec, p, &anchor) {
            Ok(k) => num(cfg.spec.sigma2 * k),
            Err(_) => String::new(),
        });
        t.push(row);
    }
    Ok(t)
}

/// Prior paths over the grid, one column per path, each path with its own basis.
pub fn sample_prior(cfg: &Config) -> Result<Table> {
    let pts = grid(cfg)?;
    let mut cols = coord_columns(cfg);
    cols.extend((0..cfg.paths).map(|p| format!("f_{p}")));
    let mut paths = Vec::with_capacity(cfg.paths);
    for p in 0..cfg.paths {
        paths.push(prior_sample(&basis(cfg, p as u64, cfg.l)?, &pts)?);
    }
    let mut t = Table::new(cols);
    for (i, p) in pts.iter().enumerate() {
        let mut row = nums(&p.flat_coords());
        row.extend(paths.iter().map(|f| num(f[i])));
        t.push(row);
    }
    Ok(t)
}

pub fn load_dataset(path: &Path, space: symgp::Space) -> Result<Dataset> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let data = match ext {
        "json" => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        "csv" => {
            let mut r = csv::ReaderBuilder::new()
                .comment(Some(b'#'))
                .from_path(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let expected = Dataset::column_labels(space);
            let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
            if header != expected {
                bail!("dataset columns {header:?} do not match {expected:?} for {space}");
            }
            let mut rows = Vec::new();
            for rec in r.records() {
                let rec = rec?;
                rows.push(rec.iter().map(|f| f.trim().parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>()?);
            }
            Dataset::from_rows(space, &rows)?
        }
        _ => bail!("dataset must be .json or .csv, got {}", path.display()),
    };
    if let Some(s) = data.space() {
        if s != space {
            bail!("dataset lives on {s} but the run is on {space}");
        }
    }
    Ok(data)
}

/// Posterior mean and standard deviation over the grid plus pathwise samples.
pub fn gp_posterior(cfg: &Config) -> Result<Table> {
    let data = match &cfg.dataset {
        Some(p) => load_dataset(p, cfg.space)?,
        None => Dataset::empty(),
    };
    let pts = grid(cfg)?;
    let basis = basis(cfg, 0, cfg.l)?;
    let moments = match cfg.moment_kernel {
        MomentKernel::Features => posterior_moments(&KernelSource::Basis(&basis), &data, &pts)?,
        MomentKernel::Reference => posterior_moments(&KernelSource::reference(cfg.spec), &data, &pts)?,
    };
    let sampler = PathwiseSampler::new(&basis, &data, &pts)?;
    let mut rng = stream_rng(cfg.seed, Stream::Posterior, 0);
    let samples: Vec<Vec<f64>> = (0..cfg.paths).map(|_| sampler.sample(&mut rng)).collect();
    let mut cols = coord_columns(cfg);
    cols.extend(["mean", "std"].map(String::from));
    cols.extend((0..cfg.paths).map(|s| format!("sample_{s}")));
    let std = moments.std();
    let mut t = Table::new(cols);
    for (i, p) in pts.iter().enumerate() {
        let mut row = nums(&p.flat_coords());
        row.push(num(moments.mean[i]));
        row.push(num(std[i]));
        row.extend(samples.iter().map(|s| num(s[i])));
        t.push(row);
    }
    Ok(t)
}

/// Relative Frobenius error of the Gram matrix on the grid against the
/// reference kernel, per feature count, with quantiles over seeds.
pub fn error_curve(cfg: &Config) -> Result<Table> {
    let mut ls = cfg.ls.clone();
    ls.sort_unstable();
    ls.dedup();
    let Some(&l_max) = ls.last() else { bail!("error-curve needs a non-empty ls") };
    if ls[0] == 0 || cfg.seeds == 0 {
        bail!("feature counts and seeds must be >= 1");
    }
    let pts = grid(cfg)?;
    let n = pts.len();
    let mut exact = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let k = cfg.spec.sigma2
                * reference_kernel(&cfg.spec, &pts[i], &pts[j]).context("error-curve needs a reference kernel")?;
            exact[(i, j)] = k;
            exact[(j, i)] = k;
        }
    }
    let norm = exact.norm();
    let mut errs = vec![Vec::with_capacity(cfg.seeds); ls.len()];
    for s in 0..cfg.seeds {
        let full = basis(cfg, s as u64, l_max)?;
        for (i, &l) in ls.iter().enumerate() {
            let k = kernel_matrix(&full.prefix(l)?, &pts)?;
            errs[i].push((k - &exact).norm() / norm);
        }
    }
    let mut t = Table::new(["L", "relative_error", "q10", "q25", "q75", "q90"].map(String::from).to_vec());
    for (l, e) in ls.iter().zip(&errs) {
        let mut row = vec![l.to_string(), num(median(e))];
        row.extend([0.1, 0.25, 0.75, 0.9].iter().map(|q| num(quantile(e, *q))));
        t.push(row);
    }
    Ok(t)
}

/// Rejection-sampler acceptance probability per length scale.
pub fn accept_rate(cfg: &Config) -> Result<Table> {
    let mut t = Table::new(["kappa", "rate", "stderr"].map(String::from).to_vec());
    for (k, &kappa) in cfg.kappas.iter().enumerate() {
        let spec = cfg.with_kappa(kappa)?;
        let a = acceptance_rate(&spec, cfg.space, cfg.trials, &mut stream_rng(cfg.seed, Stream::Spectral, k as u64))?;
        t.push(vec![num(kappa), num(a.rate), num(a.stderr)]);
    }
    Ok(t)
}

/// `k̂(x, x′)/σ²` at a fixed pair against the limiting kernel, per length scale.
pub fn range_curve(cfg: &Config) -> Result<Table> {
    let x = cfg.space.base_point();
    let y = point_at_distance(cfg.space, cfg.distance);
    let limit = limiting_kernel(&y, &x, cfg.limit_samples, &mut stream_rng(cfg.seed, Stream::Oracle, 0))?;
    let mut t = Table::new(["kappa", "k_hat", "stderr", "limit", "limit_stderr"].map(String::from).to_vec());
    for (k, &kappa) in cfg.kappas.iter().enumerate() {
        let spec = cfg.with_kappa(kappa)?;
        let mut vals = Vec::with_capacity(cfg.bases);
        for b in 0..cfg.bases {
            let index = ((k as u64) << 24) | b as u64;
            let mut rng = stream_rng(cfg.seed, Stream::Basis, index);
            let basis = build_basis(&spec, cfg.space, cfg.l, cfg.method, &mut rng)?;
            vals.push(kernel_estimate(&basis, &y, &x, cfg.estimator)? / spec.sigma2);
        }
        t.push(vec![num(kappa), num(mean(&vals)), num(std_err(&vals)), num(limit.value), num(limit.stderr)]);
    }
    Ok(t)
}

/// Raw spectral draws: exact draws with their proposal counts, or
/// importance proposals with their `|c(λ)|⁻²` weights.
pub fn spectral_sample(cfg: &Config) -> Result<Table> {
    let rank = cfg.space.rank();
    let mut cols: Vec<String> = (0..rank).map(|i| format!("lambda_{i}")).collect();
    let mut rng = stream_rng(cfg.seed, Stream::Spectral, 0);
    let mut t;
    match cfg.method {
        BasisMethod::Rejection => {
            cols.push("proposals".into());
            t = Table::new(cols);
            let s = SpectralSampler::new(&cfg.spec, cfg.space)?;
            for _ in 0..cfg.draws {
                let (l, k) = s.sample(&mut rng)?;
                let mut row = nums(l.as_slice());
                row.push(k.to_string());
                t.push(row);
            }
        }
        BasisMethod::Importance => {
            cols.push("c_inv_sq".into());
            t = Table::new(cols);
            let p = ImportanceProposal::new(&cfg.spec, cfg.space)?;
            for _ in 0..cfg.draws {
                let l = p.sample(&mut rng);
                let mut row = nums(l.as_slice());
                row.push(num(c_inv_sq(cfg.space, &l)?));
                t.push(row);
            }
        }
    }
    Ok(t)
}
