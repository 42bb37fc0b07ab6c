use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::heat::h2_profile;
use super::*;
use crate::manifolds::{point_at_distance, random_isometry, random_point, SpdPoint};
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};

fn tol() -> Tolerance {
    Tolerance { abs: 0.0, rel: 1e-10 }
}

/// Euclidean Matérn profile `2^{1−ν}/Γ(ν)·z^ν K_ν(z)` for half-integer `ν`.
fn euclid_matern(nu: f64, z: f64) -> f64 {
    let e = (-z).exp();
    match (2.0 * nu) as i32 {
        1 => e,
        3 => (1.0 + z) * e,
        5 => (1.0 + z + z * z / 3.0) * e,
        _ => unreachable!(),
    }
}

#[test]
fn h3_examples() {
    assert_eq!(heat_h3(0.0, 1.0), 1.0);
    let v = heat_h3(1.0, 1.0);
    assert!((v - (-0.5f64).exp() / 1f64.sinh()).abs() < 1e-15);
    assert!((v - 0.51610).abs() < 1e-5);
    let mut prev = 1.0;
    for k in 1..100 {
        let x = heat_h3(k as f64 * 0.05, 0.8);
        assert!(x < prev);
        prev = x;
    }
}

#[test]
fn h2_matches_spectral_side_integral() {
    // k(r) ∝ ∫ e^{−κ²λ²/2} φ_λ(r) λ tanh(πλ) dλ with the Legendre function
    // φ_λ(r) = (1/π)∫₀^π (cosh r + sinh r cos θ)^{−1/2} cos(λ log(cosh r + sinh r cos θ)) dθ
    let kappa = 1.0;
    let phi = |lam: f64, r: f64| {
        integrate(
            |th: f64| {
                let z = r.cosh() + r.sinh() * th.cos();
                z.powf(-0.5) * (lam * z.ln()).cos()
            },
            0.0,
            PI,
            tol(),
        )
        .unwrap()
            / PI
    };
    let spectral = |r: f64| {
        integrate(
            |lam: f64| (-kappa * kappa * lam * lam / 2.0).exp() * phi(lam, r) * lam * (PI * lam).tanh(),
            0.0,
            12.0,
            Tolerance { abs: 0.0, rel: 1e-9 },
        )
        .unwrap()
    };
    let s0 = spectral(0.0);
    for r in [0.5, 1.0, 2.0] {
        let want = spectral(r) / s0;
        let got = heat_h2(r, kappa).unwrap();
        assert!((got - want).abs() < 1e-7, "r={r}: {got} vs {want}");
    }
    assert!((heat_h2(0.0, 0.7).unwrap() - 1.0).abs() < 1e-15);
    for r in [0.1, 1.0, 4.0] {
        let v = heat_h2(r, 0.7).unwrap();
        assert!(v > 0.0 && v < 1.0);
    }
}

#[test]
fn heat_solutions_have_unit_mass() {
    // ∫ P(t, r) |S^{n−1}| sinh^{n−1} r dr = 1
    for n in [2usize, 3, 5, 7] {
        let heat = HyperbolicHeat::new(n).unwrap();
        let sphere = 2.0 * PI.powf(n as f64 / 2.0) / statrs::function::gamma::gamma(n as f64 / 2.0);
        for t in [0.3, 1.0] {
            let mass = integrate_to_infinity(
                |r| heat.at_distance(t, r).unwrap() * sphere * r.sinh().powi(n as i32 - 1),
                0.0,
                1.0,
                tol(),
            )
            .unwrap();
            assert!((mass - 1.0).abs() < 1e-6, "n={n} t={t}: {mass}");
        }
    }
}

#[test]
fn millson_solves_heat_equation() {
    // ∂_t P = ∂_r² P + (n−1) coth r ∂_r P
    for n in [5usize, 7, 9] {
        let c = MillsonChain::new(n).unwrap();
        for (t, r) in [(0.5, 0.7), (1.0, 1.5), (2.0, 3.0)] {
            let (ht, hr) = (1e-4, 1e-3);
            let dt = (c.eval(t + ht, r) - c.eval(t - ht, r)) / (2.0 * ht);
            let dr = (c.eval(t, r + hr) - c.eval(t, r - hr)) / (2.0 * hr);
            let drr = (c.eval(t, r + hr) - 2.0 * c.eval(t, r) + c.eval(t, r - hr)) / (hr * hr);
            let rhs = drr + (n as f64 - 1.0) * dr / r.tanh();
            assert!((dt - rhs).abs() < 1e-5 * dt.abs().max(c.eval(t, r)), "n={n}: {dt} vs {rhs}");
        }
    }
}

#[test]
fn millson_chain_reproduces_h3_and_is_smooth_near_zero() {
    let c = MillsonChain::new(3).unwrap();
    let h3 = HyperbolicHeat::H3;
    for t in [0.2, 1.0, 3.0] {
        for r in [0.0, 0.01, 0.04, 0.2, 1.0, 2.5] {
            let a = c.eval(t, r);
            let b = h3.at_distance(t, r).unwrap();
            assert!((a - b).abs() < 1e-8 * b, "t={t} r={r}: {a} vs {b}");
        }
    }
    // continuity across the small-r switch
    let c5 = MillsonChain::new(5).unwrap();
    let below = c5.eval(0.8, 0.05 - 1e-9);
    let above = c5.eval(0.8, 0.05 + 1e-9);
    assert!((below - above).abs() < 1e-7 * above);
}

#[test]
fn millson_h5_positive_and_decreasing() {
    let mut prev = 1.0 + 1e-12;
    for k in 1..=60 {
        let r = k as f64 * 0.05;
        let v = heat_hn_millson(5, r, 1.0).unwrap();
        assert!(v > 0.0 && v < prev, "r={r}: {v}");
        prev = v;
    }
    assert!((heat_hn_millson(5, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
    assert!(heat_hn_millson(4, 1.0, 1.0).is_err());
}

#[test]
fn spd2_closed_form_and_invariance() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let space = Space::Spd { d: 2 };
    let x = random_point(space, 0.7, &mut r);
    assert!((reference_kernel(&crate::spectral::KernelSpec::heat(1.0, 1.0).unwrap(), &x, &x).unwrap() - 1.0).abs() < 1e-12);
    for _ in 0..5 {
        let (x, y) = match (random_point(space, 0.7, &mut r), random_point(space, 0.7, &mut r)) {
            (ManifoldPoint::Spd(a), ManifoldPoint::Spd(b)) => (a, b),
            _ => unreachable!(),
        };
        for kappa in [0.5, 1.0, 2.0] {
            let direct = heat_spd2(&x, &y, kappa).unwrap();
            assert!(direct > 0.0 && direct < 1.0);
            let sol = Spd2Heat;
            let inv = sol
                .invariants(&ManifoldPoint::Spd(x.clone()), &ManifoldPoint::Spd(y.clone()))
                .unwrap();
            let t = kappa * kappa / 2.0;
            let via_h2 = sol.solution(t, &inv).unwrap() / sol.solution(t, &sol.coincident()).unwrap();
            assert!((direct - via_h2).abs() < 1e-8, "{direct} vs {via_h2}");
        }
        let a = DMatrix::<f64>::from_fn(2, 2, |_, _| r.sample(StandardNormal));
        let tx = SpdPoint::new(&a * x.matrix() * a.transpose()).unwrap();
        let ty = SpdPoint::new(&a * y.matrix() * a.transpose()).unwrap();
        let v0 = heat_spd2(&x, &y, 1.0).unwrap();
        let v1 = heat_spd2(&tx, &ty, 1.0).unwrap();
        assert!((v0 - v1).abs() < 1e-6);
    }
    assert!(heat_spd2(&SpdPoint::identity(3), &SpdPoint::identity(3), 1.0).is_err());
}

#[test]
fn spd2_invariants_recover_distance() {
    let mut r = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let (x, y) = match (random_point(Space::Spd { d: 2 }, 1.0, &mut r), random_point(Space::Spd { d: 2 }, 1.0, &mut r)) {
            (ManifoldPoint::Spd(a), ManifoldPoint::Spd(b)) => (a, b),
            _ => unreachable!(),
        };
        let (h1, h2) = spd2_invariants(&x, &y).unwrap();
        let d = crate::manifolds::dist_spd(&x, &y).unwrap();
        // log singular values are half the log relative eigenvalues
        assert!((2.0 * (h1 * h1 + h2 * h2).sqrt() - d).abs() < 1e-10);
    }
}

#[test]
fn h3_matern_matches_closed_form() {
    // on H₃ the Matérn kernel is (r/sinh r)·M_ν(√γ r), γ = 2ν/κ² + ‖ρ‖²
    let heat = HyperbolicHeat::H3;
    let space = Space::Hyperbolic { n: 3 };
    let base = space.base_point();
    for nu in [0.5, 1.5, 2.5] {
        for (kappa, lap) in [(1.0, Laplacian::Ordinary), (0.6, Laplacian::Shifted), (2.0, Laplacian::Ordinary)] {
            let gamma = 2.0 * nu / (kappa * kappa) + if lap == Laplacian::Ordinary { 1.0 } else { 0.0 };
            for r in [0.3, 1.0, 2.5] {
                let x = point_at_distance(space, r);
                let got = matern_from_heat(&heat, nu, kappa, lap, &base, &x).unwrap();
                let want = r / r.sinh() * euclid_matern(nu, gamma.sqrt() * r);
                assert!((got - want).abs() < 1e-7, "nu={nu} kappa={kappa} r={r}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn matern_large_nu_approaches_heat() {
    let heat = HyperbolicHeat::H3;
    let space = Space::Hyperbolic { n: 3 };
    let x = point_at_distance(space, 1.0);
    let m = matern_from_heat(&heat, 50.0, 1.0, Laplacian::Ordinary, &space.base_point(), &x).unwrap();
    let h = heat_h3(1.0, 1.0);
    assert!((m - h).abs() / h < 0.02, "{m} vs {h}");
    let same = matern_from_heat(&heat, 1.5, 1.0, Laplacian::Ordinary, &x, &x).unwrap();
    assert!((same - 1.0).abs() < 1e-14);
}

#[test]
fn oracles_are_isometry_invariant() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let specs = [
        crate::spectral::KernelSpec::heat(1.0, 1.0).unwrap(),
        crate::spectral::KernelSpec::matern(1.5, 1.0, 1.0).unwrap(),
    ];
    for space in [Space::Hyperbolic { n: 2 }, Space::Hyperbolic { n: 5 }, Space::Spd { d: 2 }] {
        let x = random_point(space, 0.6, &mut r);
        let y = random_point(space, 0.6, &mut r);
        let g = random_isometry(space, &mut r);
        for spec in &specs {
            let a = reference_kernel(spec, &x, &y).unwrap();
            let b = reference_kernel(spec, &g.act(&x).unwrap(), &g.act(&y).unwrap()).unwrap();
            assert!(a > 0.0 && a <= 1.0);
            assert!((a - b).abs() < 1e-6, "{space}: {a} vs {b}");
        }
    }
    assert!(solution_for(Space::Spd { d: 3 }).is_err());
}

#[test]
fn h2_profile_handles_extreme_scales() {
    for (t, r) in [(1e-4, 0.0), (1e-4, 0.5), (5000.0, 3.0), (0.5, 30.0)] {
        let v = h2_profile(t, r).unwrap();
        assert!(v.is_finite() && v >= 0.0, "t={t} r={r}: {v}");
    }
}

#[test]
fn spectral_quadrature_matches_other_oracles() {
    for (n, t) in [(2usize, 0.5), (3, 0.5), (5, 0.8), (7, 1.0)] {
        let q = SpectralHeat::new(n).unwrap();
        let other = HyperbolicHeat::new(n).unwrap();
        let q0 = q.eval(t, 0.0).unwrap();
        let o0 = other.at_distance(t, 0.0).unwrap();
        for r in [0.4, 1.0, 2.0] {
            let a = q.eval(t, r).unwrap() / q0;
            let b = other.at_distance(t, r).unwrap() / o0;
            assert!((a - b).abs() < 1e-7, "n={n} r={r}: {a} vs {b}");
        }
    }
    // H₃ zonal function in closed form
    let q = SpectralHeat::new(3).unwrap();
    let z = q.zonal(0.7, 1.3).unwrap();
    assert!((z - (0.7f64 * 1.3).sin() / (0.7 * 1.3f64.sinh())).abs() < 1e-10);
}

#[test]
fn even_dimension_spectral_heat_is_a_heat_kernel() {
    let heat = HyperbolicHeat::new(8).unwrap();
    let t = 0.5;
    // the spectral form carries no Plancherel constant, so check the shape
    let mut prev = f64::INFINITY;
    for k in 0..8 {
        let v = heat.at_distance(t, 0.4 * k as f64).unwrap();
        assert!(v > 0.0 && v < prev);
        prev = v;
    }
    let (h, dt, dr) = (0.9, 1e-4, 1e-3);
    let p = |t: f64, r: f64| heat.at_distance(t, r).unwrap();
    let lhs = (p(t + dt, h) - p(t - dt, h)) / (2.0 * dt);
    let rhs = (p(t, h + dr) - 2.0 * p(t, h) + p(t, h - dr)) / (dr * dr) + 7.0 * (p(t, h + dr) - p(t, h - dr)) / (2.0 * dr) / h.tanh();
    assert!((lhs - rhs).abs() < 1e-4 * lhs.abs(), "{lhs} vs {rhs}");
}
