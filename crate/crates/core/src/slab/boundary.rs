//! Incoming boundary data on the two walls.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::collision::{sqrt_maxwellian, VelocityGrid};
use crate::error::{Error, Result};

type Profile = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Named boundary presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPreset {
    /// `f_in = f_out = w^{1/2}`.
    Equilibrium,
    /// Wall at `x = 0` hotter than the gas, `f_in = (|ζ|² - 3/2) w^{1/2}`,
    /// and `f_out = 0`.
    TemperatureJump,
    /// `f_in = w^{1/2}`, `f_out = 0`.
    DensityJump,
    Zero,
}

impl BoundaryPreset {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "equilibrium" => Some(Self::Equilibrium),
            "temperature_jump" => Some(Self::TemperatureJump),
            "density_jump" => Some(Self::DensityJump),
            "zero" => Some(Self::Zero),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Equilibrium => "equilibrium",
            Self::TemperatureJump => "temperature_jump",
            Self::DensityJump => "density_jump",
            Self::Zero => "zero",
        }
    }
}

/// Incoming data as functions of `(ζ₁, ζ_r)`; `f_in` is read only for
/// `ζ₁ > 0`, `f_out` only for `ζ₁ < 0`.
#[derive(Clone)]
pub struct BoundaryData {
    label: String,
    f_in: Profile,
    f_out: Profile,
    /// Exponent of the gradient norm of `f_in`.
    pub p: f64,
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryData")
            .field("label", &self.label)
            .field("p", &self.p)
            .finish()
    }
}

/// Sup norms and gradient norm of the boundary data on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRegularity {
    pub sup_in: f64,
    pub sup_out: f64,
    /// `‖∇f_in‖_{L^p(ζ₁>0)}` by central differences at the grid nodes.
    pub grad_lp_in: f64,
    pub p: f64,
}

const FD_STEP: f64 = 1e-5;

impl BoundaryData {
    pub fn new(
        label: impl Into<String>,
        f_in: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        f_out: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        BoundaryData {
            label: label.into(),
            f_in: Arc::new(f_in),
            f_out: Arc::new(f_out),
            p: 2.0,
        }
    }

    pub fn preset(preset: BoundaryPreset) -> Self {
        let m = |a: f64, r: f64| sqrt_maxwellian(a * a + r * r);
        match preset {
            BoundaryPreset::Equilibrium => Self::new(preset.name(), m, m),
            BoundaryPreset::TemperatureJump => Self::new(
                preset.name(),
                move |a, r| (a * a + r * r - 1.5) * m(a, r),
                |_, _| 0.0,
            ),
            BoundaryPreset::DensityJump => Self::new(preset.name(), m, |_, _| 0.0),
            BoundaryPreset::Zero => Self::new(preset.name(), |_, _| 0.0, |_, _| 0.0),
        }
    }

    /// Whitespace-separated table with one `zeta1 zeta_r f_in f_out` row per
    /// point of a rectangular `(ζ₁, ζ_r)` grid, `#` comments allowed; values
    /// in between are interpolated bilinearly, outside the table they are 0.
    pub fn from_table_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: ln + 1,
                    message: format!("{e} in boundary table {}", path.display()),
                })?;
            if vals.len() != 4 || !vals.iter().all(|v| v.is_finite()) {
                return Err(Error::Parse {
                    line: ln + 1,
                    message: "expected four finite numbers: zeta1 zeta_r f_in f_out".into(),
                });
            }
            rows.push([vals[0], vals[1], vals[2], vals[3]]);
        }
        let table = Table::from_rows(&rows).map_err(|message| Error::Format {
            path: path.to_path_buf(),
            message,
        })?;
        let t_in = Arc::new(table);
        let t2 = Arc::clone(&t_in);
        Ok(Self::new(
            format!("table:{}", path.display()),
            move |a, r| t_in.eval(a, r, 2),
            move |a, r| t2.eval(a, r, 3),
        ))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn f_in(&self, zeta1: f64, zeta_r: f64) -> f64 {
        (self.f_in)(zeta1, zeta_r)
    }

    pub fn f_out(&self, zeta1: f64, zeta_r: f64) -> f64 {
        (self.f_out)(zeta1, zeta_r)
    }

    /// Incoming values at every node: `f_in` where `ζ₁ > 0`, `f_out` where
    /// `ζ₁ < 0`.
    pub fn incoming(&self, grid: &VelocityGrid) -> Vec<f64> {
        grid.nodes()
            .map(|(a, r)| {
                if a > 0.0 {
                    self.f_in(a, r)
                } else {
                    self.f_out(a, r)
                }
            })
            .collect()
    }

    pub fn regularity(&self, grid: &VelocityGrid) -> Result<BoundaryRegularity> {
        if !(self.p > 1.0) {
            return Err(Error::Validation(vec![format!(
                "gradient exponent p = {} must exceed 1",
                self.p
            )]));
        }
        let mut sup_in = 0.0f64;
        let mut sup_out = 0.0f64;
        let mut grad = 0.0;
        for (i, (a, r)) in grid.nodes().enumerate() {
            if a > 0.0 {
                sup_in = sup_in.max(self.f_in(a, r).abs());
                let h1 = FD_STEP.min(0.5 * a);
                let hr = FD_STEP.min(0.5 * r);
                let d1 = (self.f_in(a + h1, r) - self.f_in(a - h1, r)) / (2.0 * h1);
                let dr = (self.f_in(a, r + hr) - self.f_in(a, r - hr)) / (2.0 * hr);
                grad += grid.weights()[i] * (d1 * d1 + dr * dr).sqrt().powf(self.p);
            } else {
                sup_out = sup_out.max(self.f_out(a, r).abs());
            }
        }
        let reg = BoundaryRegularity {
            sup_in,
            sup_out,
            grad_lp_in: grad.powf(1.0 / self.p),
            p: self.p,
        };
        if ![reg.sup_in, reg.sup_out, reg.grad_lp_in]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::Validation(vec![format!(
                "boundary data {} has non-finite norms",
                self.label
            )]));
        }
        Ok(reg)
    }
}

/// Rectangular table for bilinear interpolation.
struct Table {
    z1: Vec<f64>,
    zr: Vec<f64>,
    /// Row-major `[i1][ir]` values of columns 2 and 3.
    vals: [Vec<f64>; 2],
}

impl Table {
    fn from_rows(rows: &[[f64; 4]]) -> std::result::Result<Self, String> {
        let mut z1: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let mut zr: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        for v in [&mut z1, &mut zr] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        if z1.len() < 2 || zr.len() < 2 || z1.len() * zr.len() != rows.len() {
            return Err(format!(
                "{} rows do not form a rectangular grid of at least 2x2 points",
                rows.len()
            ));
        }
        let mut vals = [vec![f64::NAN; rows.len()], vec![f64::NAN; rows.len()]];
        for r in rows {
            let i = z1.partition_point(|&v| v < r[0]);
            let j = zr.partition_point(|&v| v < r[1]);
            vals[0][i * zr.len() + j] = r[2];
            vals[1][i * zr.len() + j] = r[3];
        }
        if vals.iter().flatten().any(|v| v.is_nan()) {
            return Err("duplicate table points".into());
        }
        Ok(Table { z1, zr, vals })
    }

    fn eval(&self, a: f64, r: f64, column: usize) -> f64 {
        let v = &self.vals[column - 2];
        let locate = |axis: &[f64], x: f64| -> Option<(usize, f64)> {
            if x < axis[0] || x > axis[axis.len() - 1] {
                return None;
            }
            let i = axis.partition_point(|&t| t <= x).clamp(1, axis.len() - 1) - 1;
            Some((i, (x - axis[i]) / (axis[i + 1] - axis[i])))
        };
        let (Some((i, s)), Some((j, t))) = (locate(&self.z1, a), locate(&self.zr, r)) else {
            return 0.0;
        };
        let n = self.zr.len();
        let at = |i: usize, j: usize| v[i * n + j];
        (1.0 - s) * ((1.0 - t) * at(i, j) + t * at(i, j + 1))
            + s * ((1.0 - t) * at(i + 1, j) + t * at(i + 1, j + 1))
    }
}
