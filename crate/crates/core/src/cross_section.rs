//! Collision cross-sections `B(|V|, θ) = |V|^γ β(θ)` for inverse-power
//! potentials with Grad's angular cutoff `β(θ) ≤ C cos θ sin θ`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Number of samples used when validating a model at construction.
pub const DEFAULT_CUTOFF_SAMPLES: usize = 1024;

/// Angular factor β(θ) on [0, π/2].
#[derive(Clone)]
pub enum AngularFactor {
    /// `scale · cos θ sin θ`; `scale = 1` is the hard-sphere factor.
    CosSin { scale: f64 },
    /// Piecewise-linear table covering [0, π/2].
    Tabulated { theta: Vec<f64>, beta: Vec<f64> },
    /// Arbitrary user function.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for AngularFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngularFactor::CosSin { scale } => write!(f, "CosSin {{ scale: {scale} }}"),
            AngularFactor::Tabulated { theta, .. } => {
                write!(f, "Tabulated {{ {} points }}", theta.len())
            }
            AngularFactor::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl AngularFactor {
    pub fn hard_sphere() -> Self {
        AngularFactor::CosSin { scale: 1.0 }
    }

    pub fn tabulated(theta: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if theta.len() != beta.len() || theta.len() < 2 {
            return Err(Error::domain(
                "tabulated beta",
                "need at least two (theta, beta) pairs",
            ));
        }
        if theta.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain(
                "tabulated beta",
                "theta must be strictly increasing",
            ));
        }
        let tol = 1e-9;
        if theta[0].abs() > tol || (theta[theta.len() - 1] - FRAC_PI_2).abs() > tol {
            return Err(Error::domain("tabulated beta", "table must span [0, pi/2]"));
        }
        Ok(AngularFactor::Tabulated { theta, beta })
    }

    /// Reads a two-column `theta beta` text table (`#` starts a comment).
    pub fn from_table_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut theta = Vec::new();
        let mut beta = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected two columns, found {}", cols.len()),
                });
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    message: format!("{s:?}: {e}"),
                })
            };
            theta.push(parse(cols[0])?);
            beta.push(parse(cols[1])?);
        }
        Self::tabulated(theta, beta)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            AngularFactor::CosSin { scale } => scale * theta.cos() * theta.sin(),
            AngularFactor::Tabulated { theta: t, beta } => {
                let n = t.len();
                if theta <= t[0] {
                    return beta[0];
                }
                if theta >= t[n - 1] {
                    return beta[n - 1];
                }
                let k = t.partition_point(|&v| v <= theta) - 1;
                let s = (theta - t[k]) / (t[k + 1] - t[k]);
                beta[k] * (1.0 - s) + beta[k + 1] * s
            }
            AngularFactor::Custom(f) => f(theta),
        }
    }

    /// Interior angles where β is not smooth.
    pub fn breakpoints(&self) -> &[f64] {
        match self {
            AngularFactor::Tabulated { theta, .. } => &theta[1..theta.len() - 1],
            _ => &[],
        }
    }

    /// `2π ∫_0^{π/2} β(θ) dθ`, the total angular weight of the cross-section.
    pub fn angular_integral(&self) -> f64 {
        match self {
            AngularFactor::CosSin { scale } => PI * scale,
            AngularFactor::Tabulated { theta, beta } => {
                let trap: f64 = theta
                    .windows(2)
                    .zip(beta.windows(2))
                    .map(|(t, b)| 0.5 * (t[1] - t[0]) * (b[0] + b[1]))
                    .sum();
                2.0 * PI * trap
            }
            AngularFactor::Custom(f) => {
                let gl = GaussLegendre::new(24);
                let panels = 16;
                let h = FRAC_PI_2 / panels as f64;
                let s: f64 = (0..panels)
                    .map(|p| gl.integrate(p as f64 * h, (p + 1) as f64 * h, |t| f(t)))
                    .sum();
                2.0 * PI * s
            }
        }
    }
}

/// Result of sampling the Grad cutoff condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffReport {
    pub satisfied: bool,
    /// Largest `β(θ) / (cos θ sin θ)` over interior samples (0 if none).
    pub max_ratio: f64,
    pub worst_theta: Option<f64>,
}

/// Samples `β(θ_i) ≤ C cos θ_i sin θ_i` on a uniform grid of [0, π/2].
pub fn grad_cutoff_report(
    beta: &AngularFactor,
    cutoff_const: f64,
    n_samples: usize,
) -> CutoffReport {
    let n = n_samples.max(2);
    let mut satisfied = true;
    let mut max_ratio = 0.0f64;
    let mut worst_theta = None;
    for i in 0..n {
        let theta = FRAC_PI_2 * i as f64 / (n - 1) as f64;
        let cs = theta.cos() * theta.sin();
        let b = beta.eval(theta);
        let bound = cutoff_const * cs.max(0.0);
        if b > bound + 1e-14 * cutoff_const {
            satisfied = false;
        }
        if i > 0 && i < n - 1 {
            let ratio = b / cs;
            if ratio > max_ratio || worst_theta.is_none() {
                max_ratio = ratio;
                worst_theta = Some(theta);
            }
        }
    }
    CutoffReport {
        satisfied,
        max_ratio,
        worst_theta,
    }
}

/// The pair (γ, β) defining `B(|V|, θ) = |V|^γ β(θ)` with its cutoff constant.
#[derive(Debug, Clone)]
pub struct CrossSectionModel {
    name: String,
    gamma: f64,
    beta: AngularFactor,
    cutoff_const: f64,
}

impl CrossSectionModel {
    /// Validates `0 < γ ≤ 1`, `C > 0`, `β ≥ 0` and the cutoff on
    /// [`DEFAULT_CUTOFF_SAMPLES`] points.
    pub fn new(
        name: impl Into<String>,
        gamma: f64,
        beta: AngularFactor,
        cutoff_const: f64,
    ) -> Result<Self> {
        let mut problems = Vec::new();
        if !(gamma > 0.0 && gamma <= 1.0) {
            problems.push(format!("gamma = {gamma} outside (0, 1]"));
        }
        if !(cutoff_const > 0.0 && cutoff_const.is_finite()) {
            problems.push(format!(
                "cutoff constant C = {cutoff_const} must be positive"
            ));
        }
        let n = DEFAULT_CUTOFF_SAMPLES;
        if (0..n).any(|i| {
            let v = beta.eval(FRAC_PI_2 * i as f64 / (n - 1) as f64);
            !(v >= 0.0 && v.is_finite())
        }) {
            problems.push("beta must be finite and nonnegative on [0, pi/2]".to_string());
        }
        if problems.is_empty() {
            let report = grad_cutoff_report(&beta, cutoff_const, n);
            if !report.satisfied {
                problems.push(format!(
                    "Grad cutoff violated: max beta/(cos sin) = {:.6} > C = {cutoff_const}",
                    report.max_ratio
                ));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(CrossSectionModel {
            name: name.into(),
            gamma,
            beta,
            cutoff_const,
        })
    }

    /// γ = 1, β = cos θ sin θ, C = 1.
    pub fn hard_sphere() -> Self {
        CrossSectionModel {
            name: "hard_sphere".to_string(),
            gamma: 1.0,
            beta: AngularFactor::hard_sphere(),
            cutoff_const: 1.0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> &AngularFactor {
        &self.beta
    }

    pub fn cutoff_const(&self) -> f64 {
        self.cutoff_const
    }

    /// `Some(scale)` when β = scale·cos θ sin θ and γ = 1, the family whose
    /// transverse kernel integrals are Gaussian integrals in closed form.
    pub fn hard_sphere_scale(&self) -> Option<f64> {
        match self.beta {
            AngularFactor::CosSin { scale } if self.gamma == 1.0 => Some(scale),
            _ => None,
        }
    }

    pub fn evaluate_b(&self, v_rel: f64, theta: f64) -> Result<f64> {
        if !(v_rel >= 0.0) {
            return Err(Error::domain(
                "evaluate_b",
                format!("relative speed {v_rel} < 0"),
            ));
        }
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::domain(
                "evaluate_b",
                format!("theta = {theta} outside [0, pi/2]"),
            ));
        }
        if v_rel == 0.0 {
            return Ok(0.0);
        }
        Ok(v_rel.powf(self.gamma) * self.beta.eval(theta))
    }

    pub fn check_grad_cutoff(&self, n_samples: usize) -> CutoffReport {
        grad_cutoff_report(&self.beta, self.cutoff_const, n_samples)
    }

    /// `β(θ)/sin θ`, bounded by `C cos θ` under the cutoff.
    pub(crate) fn beta_over_sin(&self, theta: f64) -> f64 {
        match self.beta {
            AngularFactor::CosSin { scale } => scale * theta.cos(),
            _ => {
                let t = theta.max(1e-9);
                self.beta.eval(t) / t.sin()
            }
        }
    }

    /// Short identifier used to key operator caches.
    pub fn fingerprint(&self) -> String {
        let beta = match &self.beta {
            AngularFactor::CosSin { scale } => format!("cossin:{scale:e}"),
            AngularFactor::Tabulated { theta, beta } => {
                let mut h: u64 = 0xcbf2_9ce4_8422_2325;
                for v in theta.iter().chain(beta) {
                    for b in v.to_bits().to_le_bytes() {
                        h ^= b as u64;
                        h = h.wrapping_mul(0x0100_0000_01b3);
                    }
                }
                format!("table:{h:016x}")
            }
            AngularFactor::Custom(_) => "custom".to_string(),
        };
        format!(
            "{}|gamma={:e}|{}|C={:e}",
            self.name, self.gamma, beta, self.cutoff_const
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn hard_sphere_b_values() {
        let hs = CrossSectionModel::hard_sphere();
        assert_relative_eq!(hs.evaluate_b(2.0, FRAC_PI_4).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(hs.evaluate_b(0.0, 0.3).unwrap(), 0.0);
        assert!(hs.evaluate_b(5.0, FRAC_PI_2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let hs = CrossSectionModel::hard_sphere();
        assert!(matches!(
            hs.evaluate_b(-1.0, 0.1),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(hs.evaluate_b(1.0, 1.6), Err(Error::Domain { .. })));
        assert!(matches!(
            hs.evaluate_b(1.0, -0.01),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn cutoff_examples() {
        let r = CrossSectionModel::hard_sphere().check_grad_cutoff(1024);
        assert!(r.satisfied);
        assert_relative_eq!(r.max_ratio, 1.0, epsilon = 1e-12);

        let r = grad_cutoff_report(&AngularFactor::hard_sphere(), 0.5, 1024);
        assert!(!r.satisfied);

        let cos2sin = AngularFactor::Custom(Arc::new(|t: f64| t.cos().powi(2) * t.sin()));
        let r = grad_cutoff_report(&cos2sin, 1.0, 1024);
        assert!(r.satisfied);
        assert!(r.max_ratio <= 1.0);
    }

    #[test]
    fn constructor_rejects_bad_models() {
        assert!(CrossSectionModel::new("x", 0.0, AngularFactor::hard_sphere(), 1.0).is_err());
        assert!(CrossSectionModel::new("x", 1.5, AngularFactor::hard_sphere(), 1.0).is_err());
        assert!(CrossSectionModel::new("x", 1.0, AngularFactor::hard_sphere(), 0.5).is_err());
        assert!(
            CrossSectionModel::new("x", 0.5, AngularFactor::CosSin { scale: 0.8 }, 1.0).is_ok()
        );
    }

    #[test]
    fn angular_integrals_agree() {
        let exact = AngularFactor::hard_sphere().angular_integral();
        assert_relative_eq!(exact, PI, epsilon = 1e-15);
        let custom = AngularFactor::Custom(Arc::new(|t: f64| t.cos() * t.sin()));
        assert_relative_eq!(custom.angular_integral(), PI, max_relative = 1e-13);
        let n = 4001;
        let theta: Vec<f64> = (0..n)
            .map(|i| FRAC_PI_2 * i as f64 / (n - 1) as f64)
            .collect();
        let beta: Vec<f64> = theta.iter().map(|t| t.cos() * t.sin()).collect();
        let tab = AngularFactor::tabulated(theta, beta).unwrap();
        assert_relative_eq!(tab.angular_integral(), PI, max_relative = 1e-6);
    }
}
