//! Velocity moments of a solved field, their x-derivatives and the
//! log-singularity of the derivative at the wall.

mod fit;
mod singular;

pub use fit::{fit_log_singularity, LogFit};
pub use singular::{
    analyze_singularity, rho0, singular_coefficient, singular_term_i, wall_trace,
    SingularityOptions, SingularityReport, WallTrace,
};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::collision::VelocityGrid;
use crate::error::{Error, Result};
use crate::slab::{DistributionField, FieldEvaluator};

/// Multi-index `α = (α₁, α₂, α₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MomentIndex(pub [u32; 3]);

impl MomentIndex {
    pub const DENSITY: MomentIndex = MomentIndex([0, 0, 0]);

    pub fn new(a1: u32, a2: u32, a3: u32) -> Self {
        MomentIndex([a1, a2, a3])
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `A_α = Π (2α_i)^{α_i/2} e^{-|α|/2}` with `0⁰ = 1`.
    pub fn a_alpha(&self) -> f64 {
        let p: f64 = self
            .0
            .iter()
            .map(|&a| {
                if a == 0 {
                    1.0
                } else {
                    (2.0 * a as f64).powf(0.5 * a as f64)
                }
            })
            .product();
        p * (-0.5 * self.order() as f64).exp()
    }

    /// Whether `α₂ + α₃` is even, the case the axisymmetric field can carry.
    pub fn transverse_even(&self) -> bool {
        (self.0[1] + self.0[2]).is_multiple_of(2)
    }

    /// Azimuthal mean of `cos^{α₂}φ sin^{α₃}φ`.
    fn azimuthal_mean(&self) -> f64 {
        let (a, b) = (self.0[1], self.0[2]);
        if a % 2 == 1 || b % 2 == 1 {
            return 0.0;
        }
        double_factorial_odd(a) * double_factorial_odd(b) / double_factorial_even(a + b)
    }
}

/// `(n-1)!!` for even `n`.
fn double_factorial_odd(n: u32) -> f64 {
    (1..n).step_by(2).map(f64::from).product()
}

/// `n!!` for even `n`.
fn double_factorial_even(n: u32) -> f64 {
    (2..=n).step_by(2).map(f64::from).product()
}

impl fmt::Display for MomentIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.0[0], self.0[1], self.0[2])
    }
}

impl FromStr for MomentIndex {
    type Err = String;

    /// Accepts `2,0,0`, `(2,0,0)` or the compact `200`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = if t.contains(',') {
            t.split(',').map(str::trim).collect()
        } else if t.len() == 3 && t.chars().all(|c| c.is_ascii_digit()) {
            vec![&t[0..1], &t[1..2], &t[2..3]]
        } else {
            return Err(format!("cannot read moment index from {s:?}"));
        };
        if parts.len() != 3 {
            return Err(format!("moment index {s:?} needs three components"));
        }
        let mut a = [0u32; 3];
        for (slot, p) in a.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| format!("bad component {p:?} in moment index {s:?}"))?;
        }
        Ok(MomentIndex(a))
    }
}

/// `φ_α(ζ) = π^{-3/4} ζ^α e^{-|ζ|²/2}`.
pub fn phi_alpha(alpha: MomentIndex, zeta: [f64; 3]) -> f64 {
    let s2: f64 = zeta.iter().map(|v| v * v).sum();
    let mono: f64 = zeta
        .iter()
        .zip(alpha.0)
        .map(|(z, a)| z.powi(a as i32))
        .product();
    PI.powf(-0.75) * mono * (-0.5 * s2).exp()
}

/// Azimuthal mean of `φ_α` over the ring at `(ζ₁, ζ_r)`.
pub fn phi_ring(alpha: MomentIndex, zeta1: f64, zeta_r: f64) -> f64 {
    let [a1, a2, a3] = alpha.0;
    PI.powf(-0.75)
        * zeta1.powi(a1 as i32)
        * zeta_r.powi((a2 + a3) as i32)
        * (-0.5 * (zeta1 * zeta1 + zeta_r * zeta_r)).exp()
        * alpha.azimuthal_mean()
}

/// Quadrature weights `w_j φ̄_α(ζ_j)`, so that `σ_α = Σ_j c_j f_j`.
pub fn moment_weights(grid: &VelocityGrid, alpha: MomentIndex) -> Vec<f64> {
    grid.nodes()
        .zip(grid.weights())
        .map(|((a, r), w)| w * phi_ring(alpha, a, r))
        .collect()
}

fn row(field: &DistributionField, x_index: usize) -> Result<&[f64]> {
    if x_index >= field.nx() {
        return Err(Error::domain(
            "moment",
            format!("x index {x_index} out of range 0..{}", field.nx()),
        ));
    }
    Ok(field
        .values
        .row(x_index)
        .to_slice()
        .expect("standard layout"))
}

fn check_grid(field: &DistributionField, grid: &VelocityGrid) -> Result<()> {
    if field.values.ncols() != grid.len() {
        return Err(Error::DimensionMismatch {
            context: "moment",
            expected: grid.len(),
            got: field.values.ncols(),
        });
    }
    Ok(())
}

/// `σ_α(x_i) = ∫ f(x_i, ζ) φ_α(ζ) dζ`.
pub fn moment(
    field: &DistributionField,
    grid: &VelocityGrid,
    alpha: MomentIndex,
    x_index: usize,
) -> Result<f64> {
    let (p, m) = half_moments(field, grid, alpha, x_index)?;
    Ok(p + m)
}

/// `(σ⁺_α, σ⁻_α)` over `ζ₁ > 0` and `ζ₁ < 0`.
pub fn half_moments(
    field: &DistributionField,
    grid: &VelocityGrid,
    alpha: MomentIndex,
    x_index: usize,
) -> Result<(f64, f64)> {
    check_grid(field, grid)?;
    Ok(split_sum(
        grid,
        &moment_weights(grid, alpha),
        row(field, x_index)?,
    ))
}

fn split_sum(grid: &VelocityGrid, c: &[f64], f: &[f64]) -> (f64, f64) {
    let nr = grid.n_zeta_r();
    let half = grid.n_zeta1() / 2 * nr;
    let dot = |r: std::ops::Range<usize>| -> f64 { r.map(|j| c[j] * f[j]).sum() };
    (dot(half..grid.len()), dot(0..half))
}

/// `σ_α` of the field evaluated at an arbitrary `x`.
pub fn moment_at(
    eval: &FieldEvaluator<'_>,
    grid: &VelocityGrid,
    alpha: MomentIndex,
    x: f64,
) -> Result<f64> {
    let f = eval.at(x)?;
    Ok(moment_weights(grid, alpha)
        .iter()
        .zip(&f)
        .map(|(c, v)| c * v)
        .sum())
}

/// `∂_x σ_α(x)` for `0 < x < l`, from the reorganized derivative of the
/// mild form.
pub fn d_moment_dx(
    eval: &FieldEvaluator<'_>,
    grid: &VelocityGrid,
    alpha: MomentIndex,
    x: f64,
) -> Result<f64> {
    let d = eval.d_dx(x)?;
    Ok(moment_weights(grid, alpha)
        .iter()
        .zip(&d)
        .map(|(c, v)| c * v)
        .sum())
}

/// `(density, velocity₁, temperature)` at node `x_i`.
pub fn macroscopic_variables(
    field: &DistributionField,
    grid: &VelocityGrid,
    x_index: usize,
) -> Result<(f64, f64, f64)> {
    let s = |a| moment(field, grid, a, x_index);
    let density = s(MomentIndex::DENSITY)?;
    let velocity = s(MomentIndex::new(1, 0, 0))?;
    let second = s(MomentIndex::new(2, 0, 0))?
        + s(MomentIndex::new(0, 2, 0))?
        + s(MomentIndex::new(0, 0, 2))?;
    Ok((density, velocity, 2.0 / 3.0 * second - density))
}

/// `max |∂_x σ_α(x)| / (|ln x| + 1)` over `x = 2^{-k}` and the mirrored
/// maximum over `x = l - 2^{-k}` with `|ln(l - x)| + 1`.
pub fn gradient_bound(
    eval: &FieldEvaluator<'_>,
    grid: &VelocityGrid,
    alpha: MomentIndex,
    ks: &[u32],
) -> Result<(f64, f64)> {
    let l = eval.l();
    let mut near0 = 0.0f64;
    let mut near_l = 0.0f64;
    for &k in ks {
        let d = 2f64.powi(-(k as i32));
        near0 = near0.max(d_moment_dx(eval, grid, alpha, d)?.abs() / (d.ln().abs() + 1.0));
        near_l = near_l.max(d_moment_dx(eval, grid, alpha, l - d)?.abs() / (d.ln().abs() + 1.0));
    }
    Ok((near0, near_l))
}
