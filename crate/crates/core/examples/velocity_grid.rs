// Building axisymmetric velocity grids and checking them against the
// Maxwellian.

use boltzslab::collision::{norm_linf_weighted, GridSpec, VelocityGrid};

pub fn run_example() -> boltzslab::Result<()> {
    for (n1, nr) in [(32, 16), (64, 16), (96, 32)] {
        let spec = GridSpec {
            eps_grid: 1e-3,
            ..GridSpec::with_counts(n1, nr)
        };
        let grid = VelocityGrid::new(spec)?;
        let m = grid.sqrt_maxwellian();
        println!(
            "{n1:>3} x {nr:>2}: {} nodes, mass defect {:+.2e}, smallest |zeta1| {:.2e}, ||w^1/2||_(inf,2) {:.4}, hash {}",
            grid.len(),
            grid.mass_defect(),
            grid.zeta1.nodes[grid.n_zeta1() / 2],
            norm_linf_weighted(&m, 2.0, &grid)?,
            &grid.hash()[..12]
        );
    }
    // Too coarse for the default tolerance.
    if let Err(e) = VelocityGrid::new(GridSpec::with_counts(8, 4)) {
        println!("8 x 4: {e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> boltzslab::Result<()> {
    run_example()
}
