//! Property checks of an assembled operator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::assembly::{
    assemble_operator, collision_invariants, AssemblyOptions, LinearizedOperator,
};
use super::frequency::hard_sphere_nu;
use super::grid::VelocityGrid;
use crate::cross_section::CrossSectionModel;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorCheck {
    /// `‖Lψ‖_*/‖ψ‖_*` per invariant; the transverse momenta use the mode-1
    /// operator.
    pub invariant_defects: Vec<(String, f64)>,
    /// `max |⟨Lf,g⟩ - ⟨f,Lg⟩| / (‖f‖ ‖g‖)` over random pairs.
    pub symmetry: f64,
    /// `max ⟨Lf,f⟩ / ‖f‖²` over random `f`.
    pub max_rayleigh: f64,
    /// Largest relative gap between the grid `ν` and the closed form, if the
    /// model has one.
    pub nu_closed_form_error: Option<f64>,
    pub nu0: f64,
    pub nu1: f64,
    pub samples: usize,
    pub seed: u64,
}

fn random_functions(grid: &VelocityGrid, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = grid.sqrt_maxwellian();
    (0..samples)
        .map(|s| {
            // Alternate rough noise with Maxwellian-weighted noise.
            (0..grid.len())
                .map(|i| {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    if s % 2 == 0 {
                        v
                    } else {
                        v * m[i]
                    }
                })
                .collect()
        })
        .collect()
}

/// Symmetry and dissipativity of `op` on `samples` seeded random functions
/// and the invariants of its mode.
pub fn symmetry_and_dissipativity(
    op: &LinearizedOperator,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let grid = op.grid();
    let mut fs = random_functions(grid, samples, seed);
    // The invariants sit on the boundary of the dissipativity condition.
    fs.extend(
        collision_invariants(grid, op.mode())
            .into_iter()
            .map(|(_, psi)| psi),
    );
    let ls: Vec<Vec<f64>> = fs
        .iter()
        .map(|f| op.apply_l(f).expect("grid-sized"))
        .collect();
    let norm = |f: &[f64]| grid.dot(f, f).sqrt();
    let mut symmetry = 0.0f64;
    let mut rayleigh = f64::NEG_INFINITY;
    for i in 0..fs.len() {
        rayleigh = rayleigh.max(grid.dot(&ls[i], &fs[i]) / grid.dot(&fs[i], &fs[i]));
        let j = (i + 1) % fs.len();
        let gap = (grid.dot(&ls[i], &fs[j]) - grid.dot(&fs[i], &ls[j])).abs();
        symmetry = symmetry.max(gap / (norm(&fs[i]) * norm(&fs[j])));
    }
    (symmetry, rayleigh)
}

/// Assembles the mode-0 and mode-1 operators on `grid` and runs every check.
pub fn check_operator(
    model: &CrossSectionModel,
    grid: &VelocityGrid,
    opts: &AssemblyOptions,
    samples: usize,
    seed: u64,
) -> Result<(OperatorCheck, LinearizedOperator)> {
    let op = assemble_operator(
        model,
        grid,
        &AssemblyOptions {
            mode: 0,
            ..opts.clone()
        },
    )?;
    let op1 = assemble_operator(
        model,
        grid,
        &AssemblyOptions {
            mode: 1,
            ..opts.clone()
        },
    )?;
    let mut invariant_defects: Vec<(String, f64)> = collision_invariants(grid, 0)
        .into_iter()
        .map(|(name, psi)| (name, op.relative_defect(&psi)))
        .collect();
    for (_, psi) in collision_invariants(grid, 1) {
        let d = op1.relative_defect(&psi);
        invariant_defects.push(("momentum_2".into(), d));
        invariant_defects.push(("momentum_3".into(), d));
    }
    let (symmetry, max_rayleigh) = symmetry_and_dissipativity(&op, samples, seed);
    let nu_closed_form_error = model.hard_sphere_scale().map(|scale| {
        (0..50)
            .map(|k| {
                let speed = grid.zeta_max() * k as f64 / 49.0;
                let exact = hard_sphere_nu(scale, speed);
                (op.nu_at(speed).expect("finite speed") - exact).abs() / exact
            })
            .fold(0.0, f64::max)
    });
    let check = OperatorCheck {
        invariant_defects,
        symmetry,
        max_rayleigh,
        nu_closed_form_error,
        nu0: op.nu0_fit(),
        nu1: op.nu1_fit(),
        samples,
        seed,
    };
    Ok((check, op))
}
