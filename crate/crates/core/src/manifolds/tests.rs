use super::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    linalg::max_abs(&(a - b))
}

#[test]
fn space_parse_and_display() {
    assert_eq!("h3".parse::<Space>().unwrap(), Space::Hyperbolic { n: 3 });
    assert_eq!("SPD2".parse::<Space>().unwrap(), Space::Spd { d: 2 });
    assert_eq!(Space::Spd { d: 4 }.to_string(), "spd4");
    assert!("h1".parse::<Space>().is_err());
    assert!("x3".parse::<Space>().is_err());
    assert_eq!(Space::Spd { d: 3 }.manifold_dim(), 6);
}

#[test]
fn point_json_schema() {
    let p = ManifoldPoint::Hyperbolic(HyperbolicPoint::base(3));
    let s = serde_json::to_string(&p).unwrap();
    assert_eq!(s, r#"{"space":"hyperbolic","n":3,"v":[1.0,0.0,0.0,0.0]}"#);
    let back: ManifoldPoint = serde_json::from_str(&s).unwrap();
    assert_eq!(back, p);

    let q: ManifoldPoint =
        serde_json::from_str(r#"{"space":"spd","d":2,"S":[[2.0,0.5],[0.5,1.0]]}"#).unwrap();
    assert_eq!(q.space(), Space::Spd { d: 2 });
    let s = serde_json::to_string(&q).unwrap();
    assert!(s.contains(r#""S":[[2.0,0.5],[0.5,1.0]]"#));

    assert!(serde_json::from_str::<ManifoldPoint>(r#"{"space":"hyperbolic","n":2,"v":[2.0,0.0,0.0]}"#).is_err());
    assert!(serde_json::from_str::<ManifoldPoint>(r#"{"space":"hyperbolic","n":3,"v":[1.0,0.0,0.0]}"#).is_err());
}

#[test]
fn distance_dispatch_rejects_mixed_spaces() {
    let a = Space::Hyperbolic { n: 2 }.base_point();
    let b = Space::Spd { d: 2 }.base_point();
    assert!(matches!(distance(&a, &b), Err(Error::SpaceMismatch(..))));
    let c = Space::Hyperbolic { n: 3 }.base_point();
    assert!(distance(&a, &c).is_err());
}

#[test]
fn point_at_distance_has_that_distance() {
    for space in [Space::Hyperbolic { n: 4 }, Space::Spd { d: 3 }] {
        let x = point_at_distance(space, 1.7);
        let d = distance(&space.base_point(), &x).unwrap();
        assert!((d - 1.7).abs() < 1e-12, "{space}: {d}");
    }
}

#[test]
fn group_validation() {
    let space = Space::Hyperbolic { n: 2 };
    assert!(GroupElement::new(space, boost(2, 0.8)).is_ok());
    let mut bad = boost(2, 0.8);
    bad[(0, 1)] += 1e-6;
    assert!(GroupElement::new(space, bad).is_err());
    // time reversal is in O(1,n) but not in the identity component
    let mut flip = DMatrix::identity(3, 3);
    flip[(0, 0)] = -1.0;
    flip[(1, 1)] = -1.0;
    assert!(GroupElement::new(space, flip).is_err());
    assert!(GroupElement::new(Space::Spd { d: 2 }, DMatrix::zeros(2, 2)).is_err());
    assert!(GroupElement::new(Space::Spd { d: 2 }, DMatrix::identity(3, 3)).is_err());
}

#[test]
fn iwasawa_identity_and_pure_boost() {
    let space = Space::Hyperbolic { n: 3 };
    let id = iwasawa_so1n(&GroupElement::identity(space)).unwrap();
    assert!(id.coords[0].abs() < 1e-14);
    assert!(max_diff(&id.n_part, &DMatrix::identity(4, 4)) < 1e-12);
    assert!(max_diff(&id.h_part, &DMatrix::identity(4, 4)) < 1e-12);

    let g = GroupElement::new(space, boost(3, 1.3)).unwrap();
    let it = iwasawa_so1n(&g).unwrap();
    assert!((it.coords[0] - 1.3).abs() < 1e-12);
    assert!(max_diff(&it.a_part, &boost(3, 1.3)) < 1e-12);
}

#[test]
fn iwasawa_random_reconstruction_and_shape() {
    let mut r = rng(1);
    for n in [2usize, 3, 5] {
        let space = Space::Hyperbolic { n };
        let b = minkowski_gram(n);
        for _ in 0..200 {
            let g = random_isometry(space, &mut r)
                .compose(&random_isometry(space, &mut r))
                .unwrap();
            let it = iwasawa_so1n(&g).unwrap();
            assert!(max_diff(&it.reconstruct(), g.matrix()) < 1e-10);
            let ea = max_diff(&it.a_part, &boost(n, it.coords[0]));
            assert!(ea < 1e-12 * it.coords[0].cosh(), "{ea} {}", it.coords[0]);
            // H lies in the isotropy group diag(1, SO(n))
            let h = &it.h_part;
            assert!((h[(0, 0)] - 1.0).abs() < 1e-10);
            assert!(max_diff(&(h.transpose() * h), &DMatrix::identity(n + 1, n + 1)) < 1e-10);
            // N preserves the Minkowski form
            let nn = &it.n_part;
            let scale = linalg::max_abs(nn).powi(2).max(1.0);
            assert!(max_diff(&(nn.transpose() * &b * nn), &b) < 1e-10 * scale, "{}", max_diff(&(nn.transpose() * &b * nn), &b));
        }
    }
}

#[test]
fn iwasawa_block_rotation_invariance() {
    let mut r = rng(2);
    let n = 4;
    let space = Space::Hyperbolic { n };
    for _ in 0..100 {
        let g = random_isometry(space, &mut r);
        let t = iwasawa_so1n(&g).unwrap().coords[0];
        let inner = haar_orthogonal(n - 1, true, &mut r);
        let mut u = DMatrix::identity(n + 1, n + 1);
        u.view_mut((2, 2), (n - 1, n - 1)).copy_from(&inner);
        let ug = GroupElement::from_matrix_unchecked(space, u * g.matrix());
        let t2 = iwasawa_so1n(&ug).unwrap().coords[0];
        assert!((t - t2).abs() < 1e-10);
    }
}

#[test]
fn iwasawa_gl_reconstruction() {
    let mut r = rng(3);
    for d in [2usize, 3, 4] {
        for _ in 0..200 {
            let g = random_isometry(Space::Spd { d }, &mut r);
            let it = iwasawa_gl(&g).unwrap();
            assert!(max_diff(&it.reconstruct(), g.matrix()) < 1e-10);
            assert!(it.a_part.diagonal().iter().all(|&x| x > 0.0));
            for i in 0..d {
                assert!((it.n_part[(i, i)] - 1.0).abs() < 1e-12);
                for j in 0..i {
                    assert!(it.n_part[(i, j)].abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn point_to_group_maps_base_to_point() {
    let mut r = rng(4);
    for space in [Space::Hyperbolic { n: 2 }, Space::Hyperbolic { n: 5 }, Space::Spd { d: 3 }] {
        let base = space.base_point();
        let g0 = point_to_group(&base);
        assert!(max_diff(g0.matrix(), GroupElement::identity(space).matrix()) < 1e-14);
        for _ in 0..100 {
            let x = random_point(space, 1.0, &mut r);
            let g = point_to_group(&x);
            let y = g.act(&base).unwrap();
            let err = y
                .flat_coords()
                .iter()
                .zip(x.flat_coords())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-10 * x.flat_coords()[0].abs().max(1.0), "{space}: {err}");
        }
    }
    let s = ManifoldPoint::Spd(SpdPoint::from_rows(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap());
    let c = point_to_group(&s);
    assert!(max_diff(c.matrix(), &DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0]))) < 1e-15);
}

#[test]
fn point_to_group_is_valid_group_element() {
    let mut r = rng(5);
    let space = Space::Hyperbolic { n: 3 };
    for _ in 0..50 {
        let x = random_point(space, 1.0, &mut r);
        let g = point_to_group(&x);
        assert!(GroupElement::new(space, g.matrix().clone()).is_ok());
    }
}

#[test]
fn isometries_preserve_distances() {
    let mut r = rng(6);
    for space in [Space::Hyperbolic { n: 3 }, Space::Spd { d: 2 }, Space::Spd { d: 3 }] {
        for _ in 0..20 {
            let g = random_isometry(space, &mut r);
            let x = random_point(space, 0.8, &mut r);
            let y = random_point(space, 0.8, &mut r);
            let d0 = distance(&x, &y).unwrap();
            let d1 = distance(&g.act(&x).unwrap(), &g.act(&y).unwrap()).unwrap();
            assert!((d0 - d1).abs() < 1e-8 * d0.max(1.0), "{space}: {d0} vs {d1}");
        }
    }
}

#[test]
fn composition_and_inverse() {
    let mut r = rng(7);
    let space = Space::Hyperbolic { n: 3 };
    let id = GroupElement::identity(space);
    assert_eq!(id.compose(&id).unwrap(), id);
    let g = random_isometry(space, &mut r).compose(&random_isometry(space, &mut r)).unwrap();
    assert!(GroupElement::new(space, g.matrix().clone()).is_ok());
    let gi = g.compose(&g.inverse().unwrap()).unwrap();
    assert!(max_diff(gi.matrix(), id.matrix()) < 1e-10);

    let s = Space::Spd { d: 3 };
    let a = random_isometry(s, &mut r);
    let ai = a.inverse().unwrap().compose(&a).unwrap();
    assert!(max_diff(ai.matrix(), GroupElement::identity(s).matrix()) < 1e-9);
    assert!(id.compose(&a).is_err());
}
