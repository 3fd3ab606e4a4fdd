// Source iteration against a direct solve of the assembled linear system on
// a toy grid.

use boltzslab::collision::{assemble_operator, AssemblyOptions, GridSpec, VelocityGrid};
use boltzslab::cross_section::CrossSectionModel;
use boltzslab::slab::{solve, solve_dense, BoundaryData, BoundaryPreset, SlabConfig};

pub fn run_example() -> boltzslab::Result<()> {
    // Far too coarse for the Maxwellian mass check, which is disabled.
    let grid = VelocityGrid::new(GridSpec {
        eps_grid: 1.0,
        ..GridSpec::with_counts(8, 6)
    })?;
    let op = assemble_operator(
        &CrossSectionModel::hard_sphere(),
        &grid,
        &AssemblyOptions::default(),
    )?;
    let mut cfg = SlabConfig::with_nodes(0.5, vec![0.0, 0.1, 0.3, 0.5])?;
    cfg.tol = 1e-13;
    cfg.max_iter = 5000;
    let bc = BoundaryData::preset(BoundaryPreset::DensityJump);

    let it = solve(&bc, &op, &cfg)?;
    let dense = solve_dense(&bc, &op, &cfg)?;
    let mut gap = 0.0f64;
    for (a, b) in it.values.rows().into_iter().zip(dense.values.rows()) {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        gap = gap.max(op.norm_star(&d)?);
    }
    println!(
        "{} unknowns, {} iterations, star-norm gap {gap:.2e}",
        it.values.len(),
        it.residual_history.len()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> boltzslab::Result<()> {
    run_example()
}
