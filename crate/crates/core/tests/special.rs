use approx::assert_relative_eq;
use boltzslab::quadrature::adaptive_gk;
use boltzslab::special::{
    e1, e1_bounds, e1_quadrature, e1_validation, exp_integral_e1, h_kernel, E1Branch,
};
use proptest::prelude::*;

#[test]
fn reference_values() {
    let table = [
        (0.1, 1.822_923_958_419_390_7),
        (0.5, 0.559_773_594_776_160_8),
        (1.0, 0.219_383_934_395_520_27),
        (2.0, 0.048_900_510_708_061_12),
        (5.0, 0.001_148_295_591_275_326),
        (10.0, 4.156_968_929_685_324e-6),
    ];
    for (x, want) in table {
        assert_relative_eq!(e1(x), want, max_relative = 1e-13);
    }
    assert_eq!(exp_integral_e1(0.5).unwrap().branch, E1Branch::Series);
    assert_eq!(
        exp_integral_e1(3.0).unwrap().branch,
        E1Branch::ContinuedFraction
    );
}

#[test]
fn validation_table() {
    let rows = e1_validation(1000, 1e-6, 50.0).unwrap();
    assert_eq!(rows.len(), 1000);
    assert_relative_eq!(rows[0].x, 1e-6, max_relative = 1e-14);
    assert_relative_eq!(rows[999].x, 50.0, max_relative = 1e-14);
    assert!(rows.iter().all(|r| r.rel_error <= 1e-10 && r.bounds_hold()));
    let ratio = e1(1e-6) / -(1e-6f64).ln();
    assert!((0.95..=1.05).contains(&ratio), "{ratio}");
}

proptest! {
    #[test]
    fn agrees_with_quadrature(log_x in -14.0f64..4.0) {
        let x = log_x.exp();
        let q = e1_quadrature(x).unwrap().value;
        prop_assert!((e1(x) - q).abs() <= 1e-10 * q);
    }

    #[test]
    fn strict_bounds(log_x in -14.0f64..5.0) {
        let x = log_x.exp();
        let (lo, hi) = e1_bounds(x).unwrap();
        let v = e1(x);
        prop_assert!(lo < v && v < hi);
    }

    #[test]
    fn derivative_identity(log_x in -6.0f64..3.5) {
        // E1'(x) = -e^{-x}/x
        let x = log_x.exp();
        let h = 1e-5 * x;
        let fd = (e1(x + h) - e1(x - h)) / (2.0 * h);
        let exact = -(-x).exp() / x;
        prop_assert!((fd - exact).abs() <= 1e-7 * exact.abs());
    }

    #[test]
    fn h_kernel_matches_integral(z in 1e-4f64..1.0, x in 0.0f64..2.0, k in 0.5f64..5.0) {
        let a = k * x;
        let direct = -adaptive_gk(|u| (-a / u).exp() / u, z, 1.0, 1e-15, 1e-13, 1000).value;
        let h = h_kernel(z, x, k).unwrap();
        prop_assert!((h - direct).abs() <= 1e-11 * (1.0 + direct.abs()), "{} vs {}", h, direct);
    }
}

#[test]
fn monotone_and_positive() {
    let mut last = f64::INFINITY;
    for k in 0..400 {
        let x = 1e-6 * 1.05f64.powi(k);
        let v = e1(x);
        assert!(v > 0.0 && v < last);
        last = v;
    }
}
