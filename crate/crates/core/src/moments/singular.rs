use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::fit::{fit_log_singularity, LogFit};
use super::{d_moment_dx, phi_ring, MomentIndex};
use crate::collision::LinearizedOperator;
use crate::error::{Error, Result};
use crate::quadrature::lagrange_basis;
use crate::slab::FieldEvaluator;
use crate::special::exp_integral_e1;

/// Disagreements of the two finest levels below this are not flagged.
const EXTRAPOLATION_FLOOR: f64 = 1e-9;

/// `L(f)(0, ζ₁, ζ_r)` on the three smallest positive axial levels and its
/// quadratic extrapolation to `ζ₁ = 0⁺`, per radial node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallTrace {
    pub zeta_r: Vec<f64>,
    /// `2π ζ_r w_r`, the transverse-plane quadrature weights.
    pub plane_weights: Vec<f64>,
    pub levels: [f64; 3],
    pub level_values: [Vec<f64>; 3],
    pub limit: Vec<f64>,
}

pub fn wall_trace(eval: &FieldEvaluator<'_>, op: &LinearizedOperator) -> Result<WallTrace> {
    let grid = op.grid();
    let mut positive = grid.positive_levels();
    let (Some(i0), Some(i1), Some(i2)) = (positive.next(), positive.next(), positive.next()) else {
        return Err(Error::Validation(vec![
            "at least three positive zeta1 levels are needed to extrapolate".into(),
        ]));
    };
    let l0 = eval.l_at_wall(false);
    let nr = grid.n_zeta_r();
    let levels = [
        grid.zeta1.nodes[i0],
        grid.zeta1.nodes[i1],
        grid.zeta1.nodes[i2],
    ];
    let level_values =
        [i0, i1, i2].map(|i| (0..nr).map(|ir| l0[grid.index(i, ir)]).collect::<Vec<_>>());
    let mut basis = [0.0; 3];
    lagrange_basis(&levels, 0.0, &mut basis);
    let limit = (0..nr)
        .map(|ir| (0..3).map(|k| basis[k] * level_values[k][ir]).sum())
        .collect();
    let zeta_r = grid.zeta_r.nodes.clone();
    let plane_weights = zeta_r
        .iter()
        .zip(&grid.zeta_r.weights)
        .map(|(r, w)| 2.0 * PI * r * w)
        .collect();
    Ok(WallTrace {
        zeta_r,
        plane_weights,
        levels,
        level_values,
        limit,
    })
}

impl WallTrace {
    fn plane_integral(&self, alpha: MomentIndex, values: &[f64]) -> f64 {
        self.zeta_r
            .iter()
            .zip(&self.plane_weights)
            .zip(values)
            .map(|((&r, w), v)| w * phi_ring(alpha, 0.0, r) * v)
            .sum()
    }
}

/// `c = ∫∫ φ_α(0, ζ₂, ζ₃) L(f)(0, 0⁺, ζ₂, ζ₃) dζ₂ dζ₃`.
pub fn singular_coefficient(trace: &WallTrace, alpha: MomentIndex) -> Result<f64> {
    let finest = trace.plane_integral(alpha, &trace.level_values[0]);
    let next = trace.plane_integral(alpha, &trace.level_values[1]);
    let gap = (finest - next).abs();
    if gap > 0.05 * finest.abs().max(next.abs()) && gap > EXTRAPOLATION_FLOOR {
        return Err(Error::Extrapolation { finest, next });
    }
    Ok(trace.plane_integral(alpha, &trace.limit))
}

/// `I(x) = ∫∫ E1(ν(ρ) x / ρ) φ_α(0, ζ₂, ζ₃) L(f)(0, 0⁺, ζ₂, ζ₃) dζ₂ dζ₃`
/// with `ρ = |(ζ₂, ζ₃)|`.
pub fn singular_term_i(
    trace: &WallTrace,
    op: &LinearizedOperator,
    alpha: MomentIndex,
    x: f64,
) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(
            "singular_term_i",
            format!("x = {x} must be positive"),
        ));
    }
    let mut sum = 0.0;
    for ((&r, w), v) in trace
        .zeta_r
        .iter()
        .zip(&trace.plane_weights)
        .zip(&trace.limit)
    {
        let e1 = exp_integral_e1(op.nu_at(r)? * x / r)?.value;
        sum += w * phi_ring(alpha, 0.0, r) * v * e1;
    }
    Ok(sum)
}

/// `ρ₀(x) = sup{ρ : ν(ρ) x / ρ > 1}`; infinite when the set is unbounded
/// on the scanned range.
pub fn rho0(op: &LinearizedOperator, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("rho0", format!("x = {x} must be positive")));
    }
    let g = |rho: f64| -> Result<f64> { Ok(op.nu_at(rho)? * x - rho) };
    let scan: Vec<f64> = (0..=160)
        .map(|k| 1e-8 * 2f64.powf(k as f64 / 4.0))
        .collect();
    let mut last_positive = None;
    for (k, &rho) in scan.iter().enumerate() {
        if g(rho)? > 0.0 {
            last_positive = Some(k);
        }
    }
    let Some(k) = last_positive else {
        return Ok(0.0);
    };
    if k + 1 == scan.len() {
        return Ok(f64::INFINITY);
    }
    let (mut lo, mut hi) = (scan[k], scan[k + 1]);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Abscissae of the log fit, `x = 2^{-k}` for `k_min..=k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularityOptions {
    pub k_min: u32,
    pub k_max: u32,
}

impl Default for SingularityOptions {
    fn default() -> Self {
        SingularityOptions {
            k_min: 8,
            k_max: 14,
        }
    }
}

impl SingularityOptions {
    pub fn abscissae(&self) -> Vec<f64> {
        (self.k_min..=self.k_max)
            .map(|k| 2f64.powi(-(k as i32)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub alpha: MomentIndex,
    pub a_alpha: f64,
    pub c_theory: f64,
    pub b_fit: f64,
    pub a_fit: f64,
    pub fit_residual: f64,
    /// Fit of `|∂_x σ_α|` instead of the signed derivative.
    pub abs_fit: LogFit,
    pub x_range: (f64, f64),
    /// `(x, ∂_x σ_α(x))` at the fit abscissae.
    pub samples: Vec<(f64, f64)>,
    /// `(x, I(x))` at the fit abscissae.
    pub i_values: Vec<(f64, f64)>,
    /// Slope of `I` against `-ln x` over the fit abscissae.
    pub i_limit: f64,
    pub rho0_values: Vec<f64>,
}

impl SingularityReport {
    /// `|b_fit - c| / max(|c|, 1e-8)`.
    pub fn fit_gap(&self) -> f64 {
        relative_gap(self.b_fit, self.c_theory)
    }

    /// Largest pairwise relative gap among `b_fit`, `c` and the `I` slope.
    pub fn route_spread(&self) -> f64 {
        let r = [self.b_fit, self.c_theory, self.i_limit];
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in i + 1..3 {
                let scale = r[i].abs().max(r[j].abs()).max(1e-8);
                worst = worst.max((r[i] - r[j]).abs() / scale);
            }
        }
        worst
    }

    /// `fit_residual / |b_fit|`.
    pub fn relative_residual(&self) -> f64 {
        self.fit_residual / self.b_fit.abs()
    }
}

pub(crate) fn relative_gap(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(1e-8)
}

pub fn analyze_singularity(
    eval: &FieldEvaluator<'_>,
    op: &LinearizedOperator,
    trace: &WallTrace,
    alpha: MomentIndex,
    opts: &SingularityOptions,
) -> Result<SingularityReport> {
    let xs = opts.abscissae();
    let samples = xs
        .iter()
        .map(|&x| Ok((x, d_moment_dx(eval, op.grid(), alpha, x)?)))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_log_singularity(&samples)?;
    let abs_samples: Vec<(f64, f64)> = samples.iter().map(|&(x, d)| (x, d.abs())).collect();
    let abs_fit = fit_log_singularity(&abs_samples)?;
    let i_values = xs
        .iter()
        .map(|&x| Ok((x, singular_term_i(trace, op, alpha, x)?)))
        .collect::<Result<Vec<_>>>()?;
    let i_limit = fit_log_singularity(&i_values)?.b;
    let rho0_values = xs
        .iter()
        .map(|&x| rho0(op, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(SingularityReport {
        alpha,
        a_alpha: alpha.a_alpha(),
        c_theory: singular_coefficient(trace, alpha)?,
        b_fit: fit.b,
        a_fit: fit.a,
        fit_residual: fit.residual,
        abs_fit,
        x_range: (xs[xs.len() - 1], xs[0]),
        samples,
        i_values,
        i_limit,
        rho0_values,
    })
}
