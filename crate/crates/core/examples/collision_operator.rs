// Assembling the discrete linearized collision operator and checking its
// structure: invariants, symmetry, dissipativity and the collision frequency.

use boltzslab::collision::{
    assemble_cached, check_operator, hard_sphere_nu, smoothing_report, AssemblyOptions, GridSpec,
    VelocityGrid,
};
use boltzslab::cross_section::CrossSectionModel;

pub fn run_example() -> boltzslab::Result<()> {
    let model = CrossSectionModel::hard_sphere();
    let grid = VelocityGrid::new(GridSpec {
        eps_grid: 1e-3,
        ..GridSpec::with_counts(32, 16)
    })?;
    let opts = AssemblyOptions::default();

    let (check, op) = check_operator(&model, &grid, &opts, 50, 1)?;
    for (name, defect) in &check.invariant_defects {
        println!("L({name}) / {name}: {defect:.2e}");
    }
    println!(
        "symmetry {:.2e}, max Rayleigh quotient {:.2e}",
        check.symmetry, check.max_rayleigh
    );
    println!(
        "nu0 {:.4} <= nu(c)/(1+c) <= nu1 {:.4}",
        check.nu0, check.nu1
    );
    for c in [0.0, 1.0, 3.0] {
        println!(
            "nu({c}) = {:.10} (closed form {:.10})",
            op.nu_at(c)?,
            hard_sphere_nu(1.0, c)
        );
    }
    let raw = &op.diagnostics().raw_invariant_defects;
    println!("defects before the conservative projection: {raw:?}");

    let s = smoothing_report(&op, 16, 3);
    println!("smoothing constants: c1 {:.3}, c2 {:?}", s.c1, s.c2);

    // A cache directory makes the second assembly a file read.
    let dir = tempfile::tempdir().map_err(|e| boltzslab::Error::Io {
        path: std::env::temp_dir(),
        source: e,
    })?;
    let (_, path, hit) = assemble_cached(&model, &grid, &opts, Some(dir.path()))?;
    let (_, _, hit_again) = assemble_cached(&model, &grid, &opts, Some(dir.path()))?;
    println!(
        "cache {:?}: first hit {hit}, second hit {hit_again}",
        path.and_then(|p| p.file_name().map(|n| n.to_owned()))
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> boltzslab::Result<()> {
    run_example()
}
