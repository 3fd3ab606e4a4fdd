//! Discrete linearized collision operator on an axisymmetric velocity grid.

pub mod assembly;
pub mod cache;
pub mod frequency;
pub mod grid;
pub mod kernel;
pub mod smoothing;
pub mod validation;

pub use assembly::{
    assemble_operator, assemble_with_kernel, collision_invariants, norm_linf_weighted,
    AssemblyDiagnostics, AssemblyOptions, LinearizedOperator,
};
pub use cache::{assemble_cached, cache_file_name, load_operator, save_operator};
pub use frequency::{compute_nu, hard_sphere_nu};
pub use grid::{sqrt_maxwellian, GridSpec, VelocityGrid};
pub use kernel::CollisionKernel;
pub use smoothing::{smoothing_report, SmoothingReport};
pub use validation::{check_operator, symmetry_and_dissipativity, OperatorCheck};
