//! Regularity probes of a solved field.

use serde::{Deserialize, Serialize};

use super::boundary::BoundaryData;
use super::evaluate::FieldEvaluator;
use super::transport::DistributionField;
use crate::collision::LinearizedOperator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    /// `(|x - s|, ‖K(f)(x) - K(f)(s)‖_∞)` per pair.
    pub differences: Vec<(f64, f64)>,
    /// Least-squares slope of `ln diff` against `ln |x - s|`; `None` when
    /// every difference vanishes.
    pub slope: Option<f64>,
    /// `e^{intercept}` of the same fit.
    pub constant: Option<f64>,
    pub beta: f64,
    pub passes: bool,
}

/// Pairs `(s + d, s)` with `d` log-spaced over `[d_min, d_max]`.
pub fn holder_pairs(anchor: f64, d_min: f64, d_max: f64, count: usize) -> Vec<(f64, f64)> {
    (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1).max(1) as f64;
            let d = d_min * (d_max / d_min).powf(t);
            (anchor + d, anchor)
        })
        .collect()
}

pub fn holder_probe(
    eval: &FieldEvaluator<'_>,
    pairs: &[(f64, f64)],
    beta: f64,
) -> Result<HolderReport> {
    let l = eval.l();
    if let Some(&(x, s)) = pairs
        .iter()
        .find(|&&(x, s)| !(x > 0.0 && x < l && s > 0.0 && s < l && x != s))
    {
        return Err(Error::domain(
            "holder_probe",
            format!("pair ({x}, {s}) not two distinct points of (0, {l})"),
        ));
    }
    let mut differences = Vec::with_capacity(pairs.len());
    let mut scale = 0.0f64;
    for &(x, s) in pairs {
        let kx = eval.k_at(x)?;
        let ks = eval.k_at(s)?;
        scale = scale.max(kx.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        let diff = kx
            .iter()
            .zip(&ks)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        differences.push(((x - s).abs(), diff));
    }
    let floor = 1e-13 * scale.max(f64::MIN_POSITIVE);
    let usable: Vec<(f64, f64)> = differences
        .iter()
        .filter(|p| p.1 > floor)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    let (slope, constant) = if usable.len() >= 2 {
        let (b, a) = least_squares_line(&usable);
        (Some(b), Some(a.exp()))
    } else {
        (None, None)
    };
    let passes = slope.is_none_or(|s| s >= beta);
    Ok(HolderReport {
        differences,
        slope,
        constant,
        beta,
        passes,
    })
}

/// `(slope, intercept)` of the least-squares line through `points`.
pub(crate) fn least_squares_line(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    (b, my - b * mx)
}

/// `∫_{ζ₁>0} |K(f)(x)|² / (|ζ₁|^{2-2θ} ν^{2θ}) dζ / ‖f(x)‖_*²` on the grid.
pub fn weighted_k_ratio(
    eval: &FieldEvaluator<'_>,
    op: &LinearizedOperator,
    x: f64,
    theta: f64,
) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::domain(
            "weighted_k_ratio",
            format!("theta = {theta} outside (0, 1)"),
        ));
    }
    let f = eval.at(x)?;
    let kf = op.apply_k(&f)?;
    let nu = op.nu();
    let w = op.grid().weights();
    let num: f64 = op
        .grid()
        .nodes()
        .enumerate()
        .filter(|(_, (a, _))| *a > 0.0)
        .map(|(j, (a, _))| {
            w[j] * kf[j] * kf[j] / (a.powf(2.0 - 2.0 * theta) * nu[j].powf(2.0 * theta))
        })
        .sum();
    let den = op.norm_star_unchecked(&f).powi(2);
    Ok(if den == 0.0 { 0.0 } else { num / den })
}

/// `Ĉ = sup_{x,ζ} |f| / (‖f_in‖_∞ + ‖f_out‖_∞ + |||f|||)`.
pub fn boundedness_constant(
    field: &DistributionField,
    bc: &BoundaryData,
    op: &LinearizedOperator,
) -> Result<f64> {
    let reg = bc.regularity(op.grid())?;
    let den = reg.sup_in + reg.sup_out + field.triple_norm(op);
    Ok(if den == 0.0 {
        0.0
    } else {
        field.sup_norm() / den
    })
}
