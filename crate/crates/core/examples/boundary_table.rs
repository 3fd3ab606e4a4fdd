// Boundary data from a text table, with a checkpoint and warm restart.

use std::fmt::Write as _;

use boltzslab::collision::{
    assemble_operator, sqrt_maxwellian, AssemblyOptions, GridSpec, VelocityGrid,
};
use boltzslab::cross_section::CrossSectionModel;
use boltzslab::slab::{
    load_checkpoint, save_checkpoint, solve, solve_from, BoundaryData, SlabConfig,
};
use boltzslab::Error;

pub fn run_example() -> boltzslab::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| Error::Io {
        path: std::env::temp_dir(),
        source: e,
    })?;

    // A wall at x = 0 drifting along zeta1, nothing entering at x = l.
    let mut text = String::from("# zeta1 zeta_r f_in f_out\n");
    for i in 0..=120 {
        let a = -6.0 + 0.1 * i as f64;
        for j in 0..=60 {
            let r = 0.1 * j as f64;
            let f_in = 2.0 * a * sqrt_maxwellian(a * a + r * r);
            writeln!(text, "{a:.3} {r:.3} {f_in:.12e} 0").expect("writing to a String");
        }
    }
    let table = dir.path().join("drift.txt");
    std::fs::write(&table, text).map_err(|e| Error::Io {
        path: table.clone(),
        source: e,
    })?;
    let bc = BoundaryData::from_table_file(&table)?;

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
    let reg = bc.regularity(&grid)?;
    println!(
        "{}: sup f_in {:.4}, ||grad f_in||_2 {:.4}",
        bc.label(),
        reg.sup_in,
        reg.grad_lp_in
    );

    let field = solve(&bc, &op, &cfg)?;
    println!("cold start: {} iterations", field.residual_history.len());
    let ck = dir.path().join("field.ck");
    save_checkpoint(&field, &ck)?;
    let warm = solve_from(&bc, &op, &cfg, Some(load_checkpoint(&ck, &grid, &cfg)?))?;
    println!(
        "warm start from {}: {} iterations",
        ck.display(),
        warm.residual_history.len()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> boltzslab::Result<()> {
    run_example()
}
