// Solving the slab problem with a hot wall at x = 0 and reading off moments
// and macroscopic variables.

use boltzslab::collision::{assemble_operator, AssemblyOptions, GridSpec, VelocityGrid};
use boltzslab::cross_section::CrossSectionModel;
use boltzslab::moments::{half_moments, macroscopic_variables, moment, MomentIndex};
use boltzslab::slab::{solve, BoundaryData, BoundaryPreset, SlabConfig};

pub fn run_example() -> boltzslab::Result<()> {
    let grid = VelocityGrid::new(GridSpec {
        eps_grid: 1e-3,
        ..GridSpec::with_counts(32, 16)
    })?;
    let op = assemble_operator(
        &CrossSectionModel::hard_sphere(),
        &grid,
        &AssemblyOptions::default(),
    )?;
    let cfg = SlabConfig::new(1.0, 17, 6, 12)?;
    let bc = BoundaryData::preset(BoundaryPreset::TemperatureJump);

    let field = solve(&bc, &op, &cfg)?;
    field.ensure_converged()?;
    println!(
        "{} iterations, last residual {:.2e}, |||f||| = {:.4}",
        field.residual_history.len(),
        field.residual_history.last().copied().unwrap_or(0.0),
        field.triple_norm(&op)
    );

    println!(
        "{:>10} {:>10} {:>10} {:>11} {:>11}",
        "x", "density", "velocity", "temperature", "sigma_200"
    );
    for i in (0..cfg.nx()).step_by(4).chain([cfg.nx() - 1]) {
        let (rho, u, t) = macroscopic_variables(&field, &grid, i)?;
        let s200 = moment(&field, &grid, MomentIndex::new(2, 0, 0), i)?;
        println!(
            "{:>10.6} {rho:>10.5} {u:>10.5} {t:>11.5} {s200:>11.6}",
            field.x[i]
        );
    }
    let (plus, minus) = half_moments(&field, &grid, MomentIndex::DENSITY, 0)?;
    println!("density at x = 0 from zeta1 > 0: {plus:.5}, from zeta1 < 0: {minus:.5}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> boltzslab::Result<()> {
    run_example()
}
