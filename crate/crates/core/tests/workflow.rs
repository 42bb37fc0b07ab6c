//! End-to-end use of the public API: build a basis, persist it, regress.

use symgp::features::{build_basis, kernel_estimate, prior_sample, BasisMethod, EstimatorMode, FeatureBasis};
use symgp::gp::{log_marginal_likelihood, posterior_moments, Dataset, KernelSource, PathwiseSampler};
use symgp::manifolds::{distance, point_at_distance, random_isometry, random_point, Space};
use symgp::rng::{stream_rng, Stream};
use symgp::spectral::KernelSpec;

#[test]
fn persisted_basis_reproduces_samples() {
    for (space, method) in [
        (Space::Hyperbolic { n: 2 }, BasisMethod::Rejection),
        (Space::Hyperbolic { n: 4 }, BasisMethod::Importance),
        (Space::Spd { d: 3 }, BasisMethod::Rejection),
    ] {
        let spec = KernelSpec::matern(1.5, 0.8, 1.3).unwrap();
        let basis = build_basis(&spec, space, 64, method, &mut stream_rng(1, Stream::Basis, 0)).unwrap();
        let back: FeatureBasis = serde_json::from_str(&serde_json::to_string(&basis).unwrap()).unwrap();
        let mut r = stream_rng(1, Stream::Points, 0);
        let pts: Vec<_> = (0..6).map(|_| random_point(space, 0.5, &mut r)).collect();
        assert_eq!(prior_sample(&basis, &pts).unwrap(), prior_sample(&back, &pts).unwrap());
        let x = space.base_point();
        assert!((kernel_estimate(&back, &x, &x, EstimatorMode::Psd).unwrap() - 1.3).abs() < 1e-12);
    }
}

#[test]
fn regression_on_h2_recovers_a_smooth_function() {
    let space = Space::Hyperbolic { n: 2 };
    let spec = KernelSpec::heat(1.0, 1.0).unwrap();
    let target = |p: &symgp::ManifoldPoint| (distance(p, &space.base_point()).unwrap()).cos();
    let mut r = stream_rng(2, Stream::Points, 0);
    let train: Vec<_> = (0..40).map(|_| random_point(space, 0.8, &mut r)).collect();
    let y: Vec<f64> = train.iter().map(target).collect();
    let data = Dataset::homoscedastic(train, y, 1e-4).unwrap();
    let query: Vec<_> = (0..5).map(|i| point_at_distance(space, 0.2 * i as f64)).collect();

    let exact = posterior_moments(&KernelSource::reference(spec), &data, &query).unwrap();
    for (i, q) in query.iter().enumerate() {
        assert!((exact.mean[i] - target(q)).abs() < 0.05, "query {i}: {} vs {}", exact.mean[i], target(q));
    }

    let basis = build_basis(&spec, space, 4000, BasisMethod::Rejection, &mut stream_rng(2, Stream::Basis, 0)).unwrap();
    let approx = posterior_moments(&KernelSource::Basis(&basis), &data, &query).unwrap();
    assert!((&approx.mean - &exact.mean).amax() < 0.05);

    let sampler = PathwiseSampler::new(&basis, &data, &query).unwrap();
    let f = sampler.sample(&mut stream_rng(2, Stream::Posterior, 0));
    for i in 0..query.len() {
        assert!((f[i] - approx.mean[i]).abs() < 6.0 * approx.std()[i] + 1e-6);
    }

    let lml = log_marginal_likelihood(&KernelSource::reference(spec), &data).unwrap();
    let rough = Dataset::homoscedastic(data.points().to_vec(), data.y().iter().rev().copied().collect(), 1e-4).unwrap();
    assert!(lml > log_marginal_likelihood(&KernelSource::reference(spec), &rough).unwrap());
}

#[test]
fn estimates_are_isometry_invariant_in_distribution() {
    let space = Space::Spd { d: 2 };
    let spec = KernelSpec::heat(1.0, 1.0).unwrap();
    let mut r = stream_rng(3, Stream::Points, 0);
    let (x, y) = (random_point(space, 0.4, &mut r), random_point(space, 0.4, &mut r));
    let g = random_isometry(space, &mut r);
    let (gx, gy) = (g.act(&x).unwrap(), g.act(&y).unwrap());
    let est = |a: &symgp::ManifoldPoint, b: &symgp::ManifoldPoint, off: u64| -> (f64, f64) {
        let v: Vec<f64> = (0..200)
            .map(|s| {
                let basis = build_basis(&spec, space, 500, BasisMethod::Rejection, &mut stream_rng(3, Stream::Basis, off + s))
                    .unwrap();
                kernel_estimate(&basis, a, b, EstimatorMode::Plain).unwrap()
            })
            .collect();
        (symgp::stats::mean(&v), symgp::stats::std_err(&v))
    };
    let (m1, s1) = est(&x, &y, 0);
    let (m2, s2) = est(&gx, &gy, 1000);
    assert!((m1 - m2).abs() < 5.0 * (s1 * s1 + s2 * s2).sqrt(), "{m1} vs {m2}");
}
