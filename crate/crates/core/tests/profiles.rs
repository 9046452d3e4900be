use std::f64::consts::PI;

use proptest::prelude::*;
use tricrystal::profiles::*;
use tricrystal::{Error, ProfileFamily, Shape, YGraphSpec};

fn uniform(lambda: f64) -> YGraphSpec<f64> {
    YGraphSpec::uniform(1.0, lambda).unwrap()
}

#[test]
fn kink_shift_function_is_strictly_increasing_on_a_dense_sample() {
    // 10^4 points, log-spaced over y in [1e-4, 1e4]
    let ys: Vec<f64> = (0..10_000).map(|i| 10f64.powf(-4.0 + 8.0 * i as f64 / 9_999.0)).collect();
    let g: Vec<f64> = ys.iter().map(|&y| kink_shift_function(y)).collect();
    assert!(g.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn antikink_shift_function_is_strictly_increasing_on_a_dense_sample() {
    for speeds in [[1.0, 1.0, 1.0], [0.7, 1.3, 2.0], [2.0, 0.5, 0.9]] {
        let ys: Vec<f64> = (0..10_000).map(|i| 10f64.powf(-4.0 + 8.0 * i as f64 / 9_999.0)).collect();
        let f: Vec<f64> = ys.iter().map(|&y| antikink_shift_function(speeds, y)).collect();
        assert!(f.windows(2).all(|w| w[0] < w[1]), "speeds {speeds:?}");
    }
}

proptest! {
    #[test]
    fn kink_shift_function_is_monotone(a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
        prop_assume!(a != b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(kink_shift_function(lo) < kink_shift_function(hi));
    }

    #[test]
    fn antikink_shift_function_is_monotone(
        c in proptest::array::uniform3(0.2f64..3.0),
        a in 1e-3f64..1e3,
        b in 1e-3f64..1e3,
    ) {
        prop_assume!(a != b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(antikink_shift_function(c, lo) < antikink_shift_function(c, hi));
    }

    #[test]
    fn kink_shift_solves_its_equation(lambda in -20.0f64..-3.01) {
        let spec = uniform(lambda);
        let b1 = kink_shift(&spec).unwrap();
        let y = b1.exp();
        prop_assert!((kink_shift_function(y) + lambda / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn antikink_shift_solves_its_equation(
        c in proptest::array::uniform3(0.3f64..3.0),
        lambda in -8.0f64..8.0,
    ) {
        let spec = YGraphSpec::new(c, lambda).unwrap();
        let a1 = antikink_shift(&spec).unwrap();
        let y = (-a1 / c[0]).exp();
        let f = antikink_shift_function(c, y);
        prop_assert!((f - lambda).abs() <= 1e-10 * (1.0 + lambda.abs()), "{} vs {}", f, lambda);
    }

    #[test]
    fn profiles_satisfy_the_vertex_rule(
        c in proptest::array::uniform3(0.3f64..3.0),
        scale in 1.05f64..6.0,
    ) {
        let spec = YGraphSpec::new(c, -scale * c.iter().sum::<f64>()).unwrap();
        let fam = ProfileFamily::kink(spec).unwrap();
        for r in fam.analytic_vertex_residual() {
            prop_assert!(r.abs() < 1e-10);
        }
        let spec = YGraphSpec::new(c, scale - 3.0).unwrap();
        let fam = ProfileFamily::antikink(spec).unwrap();
        for r in fam.analytic_vertex_residual() {
            prop_assert!(r.abs() < 1e-9 * (1.0 + spec.lambda().abs()));
        }
    }
}

#[test]
fn flat_kink_at_the_threshold() {
    let fam = ProfileFamily::kink(uniform(-1.5 * PI)).unwrap();
    assert_eq!(fam.shape(), Shape::Flat);
    assert!(fam.shifts()[0].abs() <= 1e-12);
}

#[test]
fn kink_outside_its_range_is_rejected() {
    let err = ProfileFamily::kink(uniform(-2.0)).unwrap_err();
    assert!(matches!(err, Error::OutOfRange(_)));
}

#[test]
fn antikink_kirchhoff_shift_is_minus_log_sqrt_three() {
    let a1 = antikink_shift(&uniform(0.0)).unwrap();
    assert!((a1 + 3f64.sqrt().ln()).abs() <= 1e-12);
}

#[test]
fn kink_shift_at_minus_six() {
    // (1 + y^2) atan(y) / y = 2 at the root
    let b1 = kink_shift(&uniform(-6.0)).unwrap();
    assert!((b1.exp() - 1.391_745_200_270_7).abs() < 1e-10);
}
