//! Configuration files, experiment orchestration and result export.

mod config;
mod experiment;
mod export;

pub use config::{
    load_config, parse_config, BoundaryChoice, CrossSectionChoice, RunConfig, MIN_DYADIC_DEPTH,
};
pub use experiment::{
    run_experiment, AlphaOutcome, Constants, ErrorRecord, GradientBound, MomentProfile, Norms,
    Report, RunResults, SolverRecord, Timestamp, CACHE_DIR_ENV, K_WEIGHT_THETA,
};
pub use export::{
    export_results, read_report, write_e1, write_report, E1_FILE, MOMENTS_FILE, REPORT_FILE,
};
