//! The full pipeline: operator, slab solve, moments and singularity fits.

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::collision::{
    assemble_cached, smoothing_report, AssemblyDiagnostics, LinearizedOperator, SmoothingReport,
    VelocityGrid,
};
use crate::error::{Error, Result};
use crate::moments::{
    analyze_singularity, d_moment_dx, gradient_bound, macroscopic_variables, moment_weights,
    wall_trace, MomentIndex, SingularityReport,
};
use crate::slab::{
    boundedness_constant, holder_pairs, holder_probe, solve, weighted_k_ratio, BoundaryRegularity,
    DistributionField, FieldEvaluator, HolderReport,
};
use crate::special::{e1_validation, E1Check};

/// Environment variable naming the operator cache directory.
pub const CACHE_DIR_ENV: &str = "BOLTZSLAB_CACHE_DIR";

/// Exponent of the weighted `K(f)` integral.
pub const K_WEIGHT_THETA: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub code: String,
    pub message: String,
}

impl From<&Error> for ErrorRecord {
    fn from(e: &Error) -> Self {
        ErrorRecord {
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRecord {
    pub converged: bool,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub fixed_point_residual: f64,
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientBound {
    pub alpha: MomentIndex,
    /// `max |∂_x σ_α| / (|ln x| + 1)` at `x = 2^{-k}`.
    pub near_0: f64,
    /// The same at `x = l - 2^{-k}` with `|ln(l - x)| + 1`.
    pub near_l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub nu0: f64,
    pub nu1: f64,
    /// `sup|f| / (‖f_in‖_∞ + ‖f_out‖_∞ + |||f|||)`.
    pub boundedness: f64,
    pub smoothing: SmoothingReport,
    /// Largest weighted `K(f)` ratio over the probed abscissae.
    pub k_weight_ratio: f64,
    pub holder: HolderReport,
    pub gradient_bounds: Vec<GradientBound>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub triple_norm: f64,
    pub boundary: BoundaryRegularity,
    /// `1 + |||f||| + ‖f_in‖_∞ + ‖f_out‖_∞ + ‖∇f_in‖_p`.
    pub f_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaOutcome {
    pub alpha: MomentIndex,
    pub report: Option<SingularityReport>,
    pub error: Option<ErrorRecord>,
}

/// Fields that differ between otherwise identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timestamp {
    pub unix_seconds: u64,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    pub operator_cache: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub status: String,
    pub error: Option<ErrorRecord>,
    pub config: RunConfig,
    pub grid_hash: String,
    pub n_velocity: usize,
    pub x_nodes: Vec<f64>,
    pub assembly: AssemblyDiagnostics,
    pub solver: SolverRecord,
    pub norms: Option<Norms>,
    pub constants: Option<Constants>,
    /// `(x, density, velocity₁, temperature)` at both walls and the midplane.
    pub macroscopic: Vec<(f64, f64, f64, f64)>,
    pub singularities: Vec<AlphaOutcome>,
    pub timestamp: Timestamp,
}

impl Report {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// `σ_α` at every x-node and `∂_x σ_α` at interior nodes (`NaN` at walls).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentProfile {
    pub alpha: MomentIndex,
    pub sigma: Vec<f64>,
    pub d_sigma: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunResults {
    pub report: Report,
    pub x: Vec<f64>,
    pub profiles: Vec<MomentProfile>,
    pub e1: Vec<E1Check>,
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

fn solver_record(field: &DistributionField) -> SolverRecord {
    SolverRecord {
        converged: field.converged,
        iterations: field.residual_history.len(),
        residual_history: field.residual_history.clone(),
        fixed_point_residual: field.fixed_point_residual,
        monotone: field.monotone,
    }
}

/// Runs the configured experiment. Configuration and assembly errors are
/// returned as `Err`; a solve that does not converge yields a report with
/// status `non_convergence` and no moment data.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunResults> {
    cfg.validate()?;
    let model = cfg.model()?;
    let grid = VelocityGrid::new(cfg.grid.clone())?;
    let slab = cfg.slab_config()?;
    let bc = cfg.boundary_data()?;
    let regularity = bc.regularity(&grid)?;

    let t0 = Instant::now();
    let cache = cache_dir();
    let (op, _, loaded) =
        assemble_cached(&model, &grid, &cfg.assembly_options(), cache.as_deref())?;
    let assembly_seconds = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let field = solve(&bc, &op, &slab)?;
    let solve_seconds = t1.elapsed().as_secs_f64();

    let mut assembly = op.diagnostics().clone();
    assembly.seconds = 0.0;
    let timestamp = Timestamp {
        unix_seconds: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        assembly_seconds,
        solve_seconds,
        operator_cache: match (cache.is_some(), loaded) {
            (false, _) => "disabled",
            (true, true) => "hit",
            (true, false) => "miss",
        }
        .to_string(),
    };
    let mut report = Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        status: "ok".to_string(),
        error: None,
        config: cfg.clone(),
        grid_hash: grid.hash(),
        n_velocity: grid.len(),
        x_nodes: slab.x_nodes.clone(),
        assembly,
        solver: solver_record(&field),
        norms: None,
        constants: None,
        macroscopic: Vec::new(),
        singularities: Vec::new(),
        timestamp,
    };
    let e1 = e1_validation(1000, 1e-6, 50.0)?;
    if let Err(e) = field.ensure_converged() {
        report.status = e.code().to_string();
        report.error = Some((&e).into());
        return Ok(RunResults {
            report,
            x: slab.x_nodes,
            profiles: Vec::new(),
            e1,
        });
    }

    let eval = FieldEvaluator::new(&field, &op)?;
    let triple_norm = field.triple_norm(&op);
    report.norms = Some(Norms {
        triple_norm,
        boundary: regularity,
        f_prime: 1.0 + triple_norm + regularity.sup_in + regularity.sup_out + regularity.grad_lp_in,
    });
    report.constants = Some(constants(cfg, &op, &field, &eval, &bc)?);
    let l = slab.l;
    for x_index in [0, slab.nx() / 2, slab.nx() - 1] {
        let (rho, u, t) = macroscopic_variables(&field, &grid, x_index)?;
        report.macroscopic.push((slab.x_nodes[x_index], rho, u, t));
    }

    let trace = wall_trace(&eval, &op)?;
    let sing_opts = cfg.singularity_options();
    for &alpha in &cfg.moments {
        let outcome = match analyze_singularity(&eval, &op, &trace, alpha, &sing_opts) {
            Ok(r) => AlphaOutcome {
                alpha,
                report: Some(r),
                error: None,
            },
            Err(e) => AlphaOutcome {
                alpha,
                report: None,
                error: Some((&e).into()),
            },
        };
        report.singularities.push(outcome);
    }

    let mut profiles = Vec::with_capacity(cfg.moments.len());
    for &alpha in &cfg.moments {
        let c = moment_weights(&grid, alpha);
        let sigma = field
            .values
            .rows()
            .into_iter()
            .map(|r| r.iter().zip(&c).map(|(f, w)| f * w).sum())
            .collect();
        let d_sigma = slab
            .x_nodes
            .iter()
            .map(|&x| {
                if x > 0.0 && x < l {
                    d_moment_dx(&eval, &grid, alpha, x)
                } else {
                    Ok(f64::NAN)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        profiles.push(MomentProfile {
            alpha,
            sigma,
            d_sigma,
        });
    }
    Ok(RunResults {
        report,
        x: slab.x_nodes,
        profiles,
        e1,
    })
}

fn constants(
    cfg: &RunConfig,
    op: &LinearizedOperator,
    field: &DistributionField,
    eval: &FieldEvaluator<'_>,
    bc: &crate::slab::BoundaryData,
) -> Result<Constants> {
    let grid = op.grid();
    let anchor = 2f64.powi(-(cfg.dyadic_k_max as i32));
    let holder = holder_probe(eval, &holder_pairs(anchor, 1e-4, 1e-1, 13), cfg.holder_beta)?;
    let ks: Vec<u32> = (cfg.dyadic_k_min..=cfg.dyadic_k_max).collect();
    let mut k_weight_ratio = weighted_k_ratio(eval, op, 0.5 * cfg.l, K_WEIGHT_THETA)?;
    for &k in &ks {
        k_weight_ratio = k_weight_ratio.max(weighted_k_ratio(
            eval,
            op,
            2f64.powi(-(k as i32)),
            K_WEIGHT_THETA,
        )?);
    }
    let gradient_bounds = cfg
        .moments
        .iter()
        .map(|&alpha| {
            let (near_0, near_l) = gradient_bound(eval, grid, alpha, &ks)?;
            Ok(GradientBound {
                alpha,
                near_0,
                near_l,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Constants {
        nu0: op.nu0_fit(),
        nu1: op.nu1_fit(),
        boundedness: boundedness_constant(field, bc, op)?,
        smoothing: smoothing_report(op, cfg.smoothing_samples, cfg.seed),
        k_weight_ratio,
        holder,
        gradient_bounds,
    })
}
