// Empirical regularity of a solution: Hölder continuity of K(f) in x, the
// weighted K(f) integral near the wall, gradient bounds and boundedness.

use boltzslab::collision::{assemble_operator, AssemblyOptions, GridSpec, VelocityGrid};
use boltzslab::cross_section::CrossSectionModel;
use boltzslab::moments::{gradient_bound, MomentIndex};
use boltzslab::slab::{
    boundedness_constant, holder_pairs, holder_probe, solve, weighted_k_ratio, BoundaryData,
    BoundaryPreset, FieldEvaluator, SlabConfig,
};

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
    let cfg = SlabConfig::new(1.0, 33, 6, 14)?;
    let bc = BoundaryData::preset(BoundaryPreset::DensityJump);
    let field = solve(&bc, &op, &cfg)?;
    let eval = FieldEvaluator::new(&field, &op)?;

    let holder = holder_probe(&eval, &holder_pairs(2f64.powi(-14), 1e-4, 1e-1, 10), 0.3)?;
    println!(
        "Holder slope {:?}, constant {:?}, passes {}",
        holder.slope, holder.constant, holder.passes
    );
    for x in [0.5, 1e-2, 1e-4] {
        println!(
            "weighted K ratio at x = {x}: {:.4}",
            weighted_k_ratio(&eval, &op, x, 0.8)?
        );
    }
    let ks: Vec<u32> = (6..=14).collect();
    let (near0, near_l) = gradient_bound(&eval, &grid, MomentIndex::DENSITY, &ks)?;
    println!("gradient bound for sigma_000: {near0:.4} at x = 0, {near_l:.4} at x = l");
    println!(
        "boundedness constant {:.4}",
        boundedness_constant(&field, &bc, &op)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> boltzslab::Result<()> {
    run_example()
}
