mod common;

use approx::assert_relative_eq;
use boltzslab::collision::{AssemblyDiagnostics, LinearizedOperator};
use boltzslab::quadrature::adaptive_gk;
use boltzslab::slab::{
    cell_weights, constant_field, load_checkpoint, mild_step, save_checkpoint, solve, solve_dense,
    solve_from, BoundaryData, BoundaryPreset, FieldEvaluator, SlabConfig,
};
use common::{small_operator, toy_operator};
use ndarray::{Array1, Array2};

#[test]
fn cell_weights_match_direct_integral() {
    // ∫_0^h e^{-λ(h-s)} K(s) ds for linear K with K(0) = far, K(h) = near.
    for &h in &[1e-3, 0.05, 0.7] {
        for &lambda in &[0.0, 1e-6, 0.3, 5.0, 2e3, 1e7] {
            let (att, w_near, w_far) = cell_weights(h, lambda);
            assert_relative_eq!(att, (-lambda * h).exp(), max_relative = 1e-15);
            let (k_far, k_near) = (0.8, -1.3);
            // In t = h - s, split off the boundary layer of width ~1/λ.
            let g = |t: f64| (-lambda * t).exp() * (k_near + (k_far - k_near) * t / h);
            let split = if lambda > 0.0 {
                (50.0 / lambda).min(h)
            } else {
                h
            };
            let exact = adaptive_gk(g, 0.0, split, 1e-300, 1e-15, 500).value
                + adaptive_gk(g, split, h, 1e-300, 1e-15, 500).value;
            let got = w_near * k_near + w_far * k_far;
            assert!(
                (got - exact).abs() <= 1e-13 * exact.abs(),
                "h={h} λ={lambda}: {got} vs {exact}"
            );
        }
    }
}

fn free_streaming(op: &LinearizedOperator) -> LinearizedOperator {
    let n = op.grid().len();
    LinearizedOperator::from_parts(
        op.grid().clone(),
        op.model().clone(),
        0,
        op.nu().to_owned(),
        Array2::zeros((n, n)),
        AssemblyDiagnostics::default(),
    )
    .unwrap()
}

#[test]
fn free_streaming_is_exact() {
    let op = free_streaming(&small_operator(32, 8, 0));
    let cfg = SlabConfig::new(1.0, 9, 2, 8).unwrap();
    let bc = BoundaryData::preset(BoundaryPreset::Equilibrium);
    let f = solve(&bc, &op, &cfg).unwrap();
    assert!(f.converged);
    let nu = op.nu();
    for (i, &x) in f.x.iter().enumerate() {
        for (j, (a, r)) in op.grid().nodes().enumerate() {
            let dist = if a > 0.0 { x } else { 1.0 - x };
            let exact = bc.f_in(a, r).max(bc.f_out(a, r)) * (-nu[j] * dist / a.abs()).exp();
            assert!(
                (f.values[[i, j]] - exact).abs() <= 1e-14,
                "x={x} ζ=({a},{r})"
            );
        }
    }
}

#[test]
fn maxwellian_is_a_fixed_point() {
    let op = small_operator(32, 8, 0);
    let cfg = SlabConfig::new(1.0, 17, 2, 8).unwrap();
    let f = solve(
        &BoundaryData::preset(BoundaryPreset::Equilibrium),
        &op,
        &cfg,
    )
    .unwrap();
    assert!(f.converged);
    let m = op.sqrt_maxwellian();
    let dev = f
        .values
        .rows()
        .into_iter()
        .flat_map(|r| {
            r.iter()
                .zip(&m)
                .map(|(a, b)| (a - b).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);
    assert!(dev <= 1e-8, "{dev:e}");
}

#[test]
fn zero_data_gives_zero_field() {
    let op = small_operator(32, 8, 0);
    let cfg = SlabConfig::new(1.0, 9, 2, 6).unwrap();
    let f = solve(&BoundaryData::preset(BoundaryPreset::Zero), &op, &cfg).unwrap();
    assert!(f.converged);
    assert_eq!(f.sup_norm(), 0.0);
}

#[test]
fn iteration_matches_dense_solve_on_toy_grid() {
    let op = toy_operator();
    let mut cfg = SlabConfig::with_nodes(1.0, vec![0.0, 0.25, 0.5, 1.0]).unwrap();
    cfg.tol = 1e-13;
    cfg.max_iter = 2000;
    let bc = BoundaryData::preset(BoundaryPreset::TemperatureJump);
    let it = solve(&bc, &op, &cfg).unwrap();
    let dense = solve_dense(&bc, &op, &cfg).unwrap();
    assert!(it.converged);
    let diff = (&it.values - &dense.values)
        .rows()
        .into_iter()
        .map(|r| op.norm_star(r.as_slice().unwrap()).unwrap())
        .fold(0.0, f64::max);
    assert!(diff <= 1e-8, "{diff:e}");
    assert!(dense.fixed_point_residual <= 1e-12);
}

#[test]
fn limit_does_not_depend_on_the_start() {
    let op = small_operator(32, 8, 0);
    let mut cfg = SlabConfig::new(1.0, 9, 2, 6).unwrap();
    cfg.tol = 1e-11;
    let bc = BoundaryData::preset(BoundaryPreset::TemperatureJump);
    let a = solve(&bc, &op, &cfg).unwrap();
    let start = Array2::from_elem((cfg.nx(), op.grid().len()), 3.0);
    let b = solve_from(&bc, &op, &cfg, Some(start)).unwrap();
    assert!(a.converged && b.converged);
    let diff = (&a.values - &b.values)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(diff <= 1e-9, "{diff:e}");
    // The stopping rule bounds the distance to the next iterate.
    assert!(a.fixed_point_residual <= 2.0 * cfg.tol);
    assert!(a.residual_history.len() < cfg.max_iter);
}

#[test]
fn mild_step_of_solution_is_solution() {
    let op = small_operator(32, 8, 0);
    let mut cfg = SlabConfig::new(1.0, 9, 2, 6).unwrap();
    cfg.tol = 1e-12;
    let bc = BoundaryData::preset(BoundaryPreset::DensityJump);
    let f = solve(&bc, &op, &cfg).unwrap();
    let t = mild_step(&f, &bc, &op, &cfg).unwrap();
    let diff = (&t.values - &f.values)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(diff <= 1e-11, "{diff:e}");
}

#[test]
fn non_convergence_is_reported() {
    let op = small_operator(32, 8, 0);
    let mut cfg = SlabConfig::new(1.0, 9, 2, 6).unwrap();
    cfg.max_iter = 3;
    cfg.tol = 1e-14;
    let f = solve(
        &BoundaryData::preset(BoundaryPreset::TemperatureJump),
        &op,
        &cfg,
    )
    .unwrap();
    assert!(!f.converged);
    assert_eq!(f.residual_history.len(), 3);
    assert!(f.ensure_converged().is_err());
}

#[test]
fn checkpoint_round_trip_and_warm_restart() {
    let dir = tempfile::tempdir().unwrap();
    let op = small_operator(32, 8, 0);
    let cfg = SlabConfig::new(1.0, 9, 2, 6).unwrap();
    let bc = BoundaryData::preset(BoundaryPreset::TemperatureJump);
    let f = solve(&bc, &op, &cfg).unwrap();
    let path = dir.path().join("field.ck");
    save_checkpoint(&f, &path).unwrap();
    let back = load_checkpoint(&path, op.grid(), &cfg).unwrap();
    assert_eq!(back, f.values);

    let warm = solve_from(&bc, &op, &cfg, Some(back)).unwrap();
    assert!(warm.converged);
    assert!(warm.residual_history.len() <= 2);

    let other = SlabConfig::new(1.0, 17, 2, 6).unwrap();
    assert!(load_checkpoint(&path, op.grid(), &other).is_err());
    let coarse = small_operator(32, 12, 0);
    assert!(load_checkpoint(&path, coarse.grid(), &cfg).is_err());
}

#[test]
fn evaluator_reproduces_nodes_and_derivative() {
    let op = small_operator(32, 8, 0);
    let mut cfg = SlabConfig::new(1.0, 33, 2, 6).unwrap();
    cfg.tol = 1e-12;
    let f = solve(
        &BoundaryData::preset(BoundaryPreset::TemperatureJump),
        &op,
        &cfg,
    )
    .unwrap();
    let eval = FieldEvaluator::new(&f, &op).unwrap();
    let i = f.x.iter().position(|&x| x == 0.5).unwrap();
    let at = eval.at(0.5).unwrap();
    for (j, v) in at.iter().enumerate() {
        assert!((v - f.values[[i, j]]).abs() <= 1e-12);
    }
    let x = 0.3;
    let h = 1e-5;
    let d = eval.d_dx(x).unwrap();
    let (p, m) = (eval.at(x + h).unwrap(), eval.at(x - h).unwrap());
    // Skip the slowest axial levels, where the profile varies on the scale h.
    for (j, (a, _)) in op.grid().nodes().enumerate() {
        if a.abs() < 1e-2 {
            continue;
        }
        let fd = (p[j] - m[j]) / (2.0 * h);
        assert!(
            (d[j] - fd).abs() <= 1e-5 * (1.0 + fd.abs()),
            "ζ₁ = {a}: {} vs {fd}",
            d[j]
        );
    }
    assert!(eval.d_dx(0.0).is_err() && eval.at(1.5).is_err());
}

#[test]
fn constant_field_has_requested_shape() {
    let op = small_operator(32, 8, 0);
    let cfg = SlabConfig::new(1.0, 9, 2, 6).unwrap();
    let g = Array1::linspace(0.0, 1.0, op.grid().len()).to_vec();
    let f = constant_field(&g, &cfg, &op);
    assert_eq!(f.values.dim(), (cfg.nx(), op.grid().len()));
    assert_eq!(f.values.row(3).to_vec(), g);
}
