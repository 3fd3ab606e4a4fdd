//! Stationary slab problem on `[0, l]` in mild form, solved by source
//! iteration.

pub mod boundary;
pub mod checkpoint;
pub mod config;
pub mod evaluate;
pub mod probe;
pub mod transport;

pub use boundary::{BoundaryData, BoundaryPreset, BoundaryRegularity};
pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use config::{dyadic_x_grid, SlabConfig};
pub use evaluate::FieldEvaluator;
pub use probe::{boundedness_constant, holder_pairs, holder_probe, weighted_k_ratio, HolderReport};
pub use transport::{
    cell_weights, constant_field, dense_system, mild_step, phi1, psi, solve, solve_dense,
    solve_from, DistributionField,
};
