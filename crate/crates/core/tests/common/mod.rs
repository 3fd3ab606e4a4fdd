#![allow(dead_code)]

use boltzslab::collision::{
    assemble_operator, AssemblyOptions, GridSpec, LinearizedOperator, VelocityGrid,
};
use boltzslab::cross_section::CrossSectionModel;

/// Hard-sphere operator on a small grid; the mass check is loosened to suit it.
pub fn small_operator(n1: usize, nr: usize, mode: u32) -> LinearizedOperator {
    let grid = VelocityGrid::new(GridSpec {
        eps_grid: 1e-2,
        ..GridSpec::with_counts(n1, nr)
    })
    .unwrap();
    let opts = AssemblyOptions {
        mode,
        ..AssemblyOptions::default()
    };
    assemble_operator(&CrossSectionModel::hard_sphere(), &grid, &opts).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// The 8×6 toy grid; too coarse for the mass check, which is switched off.
pub fn toy_operator() -> LinearizedOperator {
    let grid = VelocityGrid::new(GridSpec {
        eps_grid: 1.0,
        ..GridSpec::with_counts(8, 6)
    })
    .unwrap();
    assemble_operator(
        &CrossSectionModel::hard_sphere(),
        &grid,
        &AssemblyOptions::default(),
    )
    .unwrap()
}
