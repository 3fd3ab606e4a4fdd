// The logarithmic blow-up of moment gradients at the wall: the predicted
// coefficient from the wall trace of L(f), a least-squares fit at dyadic
// points, and the slope of the exponential-integral term.

use boltzslab::collision::{assemble_operator, AssemblyOptions, GridSpec, VelocityGrid};
use boltzslab::cross_section::CrossSectionModel;
use boltzslab::moments::{
    analyze_singularity, d_moment_dx, wall_trace, MomentIndex, SingularityOptions,
};
use boltzslab::slab::{solve, BoundaryData, BoundaryPreset, FieldEvaluator, SlabConfig};

pub fn run_example() -> boltzslab::Result<()> {
    let grid = VelocityGrid::new(GridSpec {
        eps_grid: 1e-3,
        ..GridSpec::with_counts(48, 16)
    })?;
    let op = assemble_operator(
        &CrossSectionModel::hard_sphere(),
        &grid,
        &AssemblyOptions::default(),
    )?;
    let cfg = SlabConfig::new(1.0, 33, 6, 14)?;
    let field = solve(
        &BoundaryData::preset(BoundaryPreset::TemperatureJump),
        &op,
        &cfg,
    )?;
    field.ensure_converged()?;
    let eval = FieldEvaluator::new(&field, &op)?;

    let density = MomentIndex::DENSITY;
    for k in [4, 8, 12] {
        let x = 2f64.powi(-k);
        println!(
            "d sigma_000/dx at 2^-{k}: {:.5}",
            d_moment_dx(&eval, &grid, density, x)?
        );
    }

    let trace = wall_trace(&eval, &op)?;
    let opts = SingularityOptions {
        k_min: 8,
        k_max: 14,
    };
    for alpha in [density, MomentIndex::new(0, 2, 0)] {
        let r = analyze_singularity(&eval, &op, &trace, alpha, &opts)?;
        println!(
            "alpha {alpha}: c = {:.5}, fitted b = {:.5} (residual {:.1e}), I slope = {:.5}, gap {:.1}%",
            r.c_theory,
            r.b_fit,
            r.fit_residual,
            r.i_limit,
            100.0 * r.fit_gap()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> boltzslab::Result<()> {
    run_example()
}
