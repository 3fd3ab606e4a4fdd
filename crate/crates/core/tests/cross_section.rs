mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_relative_eq;
use boltzslab::collision::{assemble_operator, AssemblyOptions, GridSpec, VelocityGrid};
use boltzslab::cross_section::{AngularFactor, CrossSectionModel};

#[test]
fn models_are_validated() {
    let hs = CrossSectionModel::hard_sphere();
    assert!(hs.check_grad_cutoff(4096).satisfied);
    assert_relative_eq!(
        hs.evaluate_b(2.0, 0.3).unwrap(),
        2.0 * 0.3f64.cos() * 0.3f64.sin(),
        max_relative = 1e-15
    );
    assert_eq!(hs.evaluate_b(0.0, 0.3).unwrap(), 0.0);
    assert!(hs.evaluate_b(1.0, 2.0).is_err());

    // β = sin θ breaks the cutoff near π/2.
    let bad = AngularFactor::Custom(std::sync::Arc::new(|t: f64| t.sin()));
    assert!(CrossSectionModel::new("sin", 0.5, bad, 10.0).is_err());
    assert!(CrossSectionModel::new("soft", 1.5, AngularFactor::hard_sphere(), 1.0).is_err());
    assert!(CrossSectionModel::new("soft", 0.4, AngularFactor::CosSin { scale: 0.5 }, 1.0).is_ok());
}

fn small_grid() -> VelocityGrid {
    VelocityGrid::new(GridSpec {
        eps_grid: 1e-1,
        ..GridSpec::with_counts(16, 6)
    })
    .unwrap()
}

fn max_k_gap(a: &CrossSectionModel, b: &CrossSectionModel) -> (f64, f64) {
    let grid = small_grid();
    let opts = AssemblyOptions {
        conservative: false,
        ..AssemblyOptions::default()
    };
    let ka = assemble_operator(a, &grid, &opts).unwrap();
    let kb = assemble_operator(b, &grid, &opts).unwrap();
    let scale = ka.k().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = (&ka.k() - &kb.k())
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let nu = ka
        .nu()
        .iter()
        .zip(kb.nu())
        .map(|(x, y)| ((x - y) / x).abs())
        .fold(0.0, f64::max);
    (diff / scale, nu)
}

#[test]
fn general_path_reproduces_closed_form() {
    // Same β as the hard sphere, but opaque to the closed-form branch.
    let smooth = AngularFactor::Custom(std::sync::Arc::new(|t: f64| t.cos() * t.sin()));
    let model = CrossSectionModel::new("custom", 1.0, smooth, 1.0 + 1e-9).unwrap();
    let (k, nu) = max_k_gap(&CrossSectionModel::hard_sphere(), &model);
    assert!(k <= 1e-6 && nu <= 1e-6, "{k:e} {nu:e}");
}

fn tabulated_hard_sphere(n: usize) -> CrossSectionModel {
    let theta: Vec<f64> = (0..n)
        .map(|i| FRAC_PI_2 * i as f64 / (n - 1) as f64)
        .collect();
    let beta = theta.iter().map(|t| t.cos() * t.sin()).collect();
    let table = AngularFactor::tabulated(theta, beta).unwrap();
    assert_relative_eq!(table.angular_integral(), PI, max_relative = 1e-4);
    CrossSectionModel::new("tabulated", 1.0, table, 1.0 + 1e-6).unwrap()
}

#[test]
fn tabulated_path_reproduces_closed_form() {
    // Linear interpolation of cos θ sin θ on 129 points is good to ~4e-5.
    let (k, nu) = max_k_gap(
        &CrossSectionModel::hard_sphere(),
        &tabulated_hard_sphere(129),
    );
    assert!(k <= 2e-4 && nu <= 2e-4, "{k:e} {nu:e}");
}
