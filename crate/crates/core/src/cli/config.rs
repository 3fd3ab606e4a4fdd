//! `key = value` run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::collision::{AssemblyOptions, GridSpec};
use crate::cross_section::{AngularFactor, CrossSectionModel};
use crate::error::{Error, Result};
use crate::moments::{MomentIndex, SingularityOptions};
use crate::slab::{BoundaryData, BoundaryPreset, SlabConfig};

/// Smallest accepted dyadic depth of the x-grid at each wall.
pub const MIN_DYADIC_DEPTH: u32 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CrossSectionChoice {
    HardSphere,
    /// `β` read from a two-column table.
    Tabulated {
        table: PathBuf,
        gamma: f64,
        cutoff_const: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BoundaryChoice {
    Preset { name: BoundaryPreset },
    Table { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub cross_section: CrossSectionChoice,
    pub grid: GridSpec,
    pub assembly_tol: f64,
    pub conservative: bool,
    pub l: f64,
    pub x_uniform: usize,
    pub dyadic_k_min: u32,
    pub dyadic_k_max: u32,
    pub tol: f64,
    pub max_iter: usize,
    pub relaxation: f64,
    pub boundary: BoundaryChoice,
    pub grad_p: f64,
    pub moments: Vec<MomentIndex>,
    pub fit_k_min: u32,
    pub fit_k_max: u32,
    pub holder_beta: f64,
    pub seed: u64,
    pub smoothing_samples: usize,
    pub output_dir: PathBuf,
    /// The `key = value` pairs as read, in file order.
    pub echo: Vec<(String, String)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cross_section: CrossSectionChoice::HardSphere,
            grid: GridSpec {
                n_zeta_r: 32,
                ..GridSpec::default()
            },
            assembly_tol: 1e-8,
            conservative: true,
            l: 1.0,
            x_uniform: 65,
            dyadic_k_min: 6,
            dyadic_k_max: 16,
            tol: 1e-9,
            max_iter: 500,
            relaxation: 1.0,
            boundary: BoundaryChoice::Preset {
                name: BoundaryPreset::TemperatureJump,
            },
            grad_p: 2.0,
            moments: vec![
                MomentIndex::new(0, 0, 0),
                MomentIndex::new(2, 0, 0),
                MomentIndex::new(0, 2, 0),
            ],
            fit_k_min: 8,
            fit_k_max: 14,
            holder_beta: 0.3,
            seed: 20240601,
            smoothing_samples: 32,
            output_dir: PathBuf::from("out"),
            echo: Vec::new(),
        }
    }
}

fn parse_moments(v: &str) -> std::result::Result<Vec<MomentIndex>, String> {
    v.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, got {v:?}")),
    }
}

fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse()
        .map_err(|_| format!("cannot parse {v:?} as a number"))
}

/// Parses config text. Relative paths are resolved against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut cross_section = "hard_sphere".to_string();
    let mut beta_table: Option<PathBuf> = None;
    let mut gamma = 1.0;
    let mut cutoff_const = 1.0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if cfg.echo.iter().any(|(k, _)| k == key) {
            return Err(err(format!("duplicate key {key:?}")));
        }
        let path = || base.join(value);
        let r: std::result::Result<(), String> = (|| {
            match key {
                "cross_section" => cross_section = value.to_string(),
                "beta_table" => beta_table = Some(path()),
                "gamma" => gamma = num(value)?,
                "cutoff_const" => cutoff_const = num(value)?,
                "zeta_max" => cfg.grid.zeta_max = num(value)?,
                "n_zeta1" => cfg.grid.n_zeta1 = num(value)?,
                "n_zeta_r" => cfg.grid.n_zeta_r = num(value)?,
                "panel_order" => cfg.grid.panel_order = num(value)?,
                "zeta1_min" => cfg.grid.zeta1_min = num(value)?,
                "zeta1_grading" => cfg.grid.zeta1_grading = num(value)?,
                "azimuthal_order" => cfg.grid.azimuthal_order = num(value)?,
                "eps_grid" => cfg.grid.eps_grid = num(value)?,
                "assembly_tol" => cfg.assembly_tol = num(value)?,
                "conservative" => cfg.conservative = parse_bool(value)?,
                "l" => cfg.l = num(value)?,
                "x_uniform" => cfg.x_uniform = num(value)?,
                "dyadic_k_min" => cfg.dyadic_k_min = num(value)?,
                "dyadic_k_max" => cfg.dyadic_k_max = num(value)?,
                "tol" => cfg.tol = num(value)?,
                "max_iter" => cfg.max_iter = num(value)?,
                "relaxation" => cfg.relaxation = num(value)?,
                "boundary" => {
                    let name = BoundaryPreset::parse(value)
                        .ok_or_else(|| format!("unknown boundary preset {value:?}"))?;
                    cfg.boundary = BoundaryChoice::Preset { name };
                }
                "boundary_table" => cfg.boundary = BoundaryChoice::Table { path: path() },
                "grad_p" => cfg.grad_p = num(value)?,
                "moments" => cfg.moments = parse_moments(value)?,
                "fit_k_min" => cfg.fit_k_min = num(value)?,
                "fit_k_max" => cfg.fit_k_max = num(value)?,
                "holder_beta" => cfg.holder_beta = num(value)?,
                "seed" => cfg.seed = num(value)?,
                "smoothing_samples" => cfg.smoothing_samples = num(value)?,
                "output_dir" => cfg.output_dir = path(),
                _ => return Err(format!("unknown key {key:?}")),
            }
            Ok(())
        })();
        r.map_err(err)?;
        cfg.echo.push((key.to_string(), value.to_string()));
    }
    cfg.cross_section = match cross_section.as_str() {
        "hard_sphere" => CrossSectionChoice::HardSphere,
        "tabulated" => match beta_table {
            Some(table) => CrossSectionChoice::Tabulated {
                table,
                gamma,
                cutoff_const,
            },
            None => {
                return Err(Error::Validation(vec![
                    "cross_section = tabulated needs beta_table".into(),
                ]))
            }
        },
        other => {
            return Err(Error::Validation(vec![format!(
                "unknown cross_section {other:?}"
            )]))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}

impl RunConfig {
    /// Collects every violated invariant into one error.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if let Err(Error::Validation(p)) = self.grid.validate() {
            problems.extend(p);
        }
        if !(self.assembly_tol > 0.0) {
            problems.push(format!(
                "assembly_tol = {} must be positive",
                self.assembly_tol
            ));
        }
        if self.x_uniform < 2 {
            problems.push(format!("x_uniform = {} must be at least 2", self.x_uniform));
        }
        if self.dyadic_k_max < self.dyadic_k_min {
            problems.push(format!(
                "dyadic_k_min = {} exceeds dyadic_k_max = {}",
                self.dyadic_k_min, self.dyadic_k_max
            ));
        } else if self.dyadic_k_max < MIN_DYADIC_DEPTH {
            problems.push(format!(
                "dyadic depth {} is below the required {MIN_DYADIC_DEPTH}",
                self.dyadic_k_max
            ));
        }
        if !(self.l > 0.0) || 2f64.powi(-(self.dyadic_k_min as i32)) >= 0.5 * self.l {
            problems.push(format!("l = {} must exceed 2^(1 - dyadic_k_min)", self.l));
        }
        if !(self.tol > 0.0) {
            problems.push(format!("tol = {} must be positive", self.tol));
        }
        if self.max_iter == 0 {
            problems.push("max_iter must be positive".into());
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            problems.push(format!(
                "relaxation = {} must lie in (0, 1]",
                self.relaxation
            ));
        }
        if self.fit_k_min >= self.fit_k_max {
            problems.push(format!(
                "fit_k_min = {} must be below fit_k_max = {}",
                self.fit_k_min, self.fit_k_max
            ));
        }
        if self.fit_k_max - self.fit_k_min.min(self.fit_k_max) + 1 < 6 {
            problems.push("the fit range needs at least 6 abscissae".into());
        }
        if self.fit_k_min < self.dyadic_k_min || self.fit_k_max > self.dyadic_k_max {
            problems.push(format!(
                "fit range {}..{} is not inside the dyadic range {}..{}",
                self.fit_k_min, self.fit_k_max, self.dyadic_k_min, self.dyadic_k_max
            ));
        }
        for a in &self.moments {
            if !a.transverse_even() {
                problems.push(format!(
                    "moment {a}: alpha2 + alpha3 is odd; such moments vanish for azimuthally symmetric data"
                ));
            }
        }
        if !(self.grad_p > 1.0) {
            problems.push(format!("grad_p = {} must exceed 1", self.grad_p));
        }
        if !(self.holder_beta > 0.0 && self.holder_beta < 1.0) {
            problems.push(format!(
                "holder_beta = {} must lie in (0, 1)",
                self.holder_beta
            ));
        }
        if self.smoothing_samples == 0 {
            problems.push("smoothing_samples must be positive".into());
        }
        if let CrossSectionChoice::Tabulated {
            gamma,
            cutoff_const,
            ..
        } = &self.cross_section
        {
            if !(*gamma > 0.0 && *gamma <= 1.0) {
                problems.push(format!("gamma = {gamma} outside (0, 1]"));
            }
            if !(*cutoff_const > 0.0) {
                problems.push(format!("cutoff_const = {cutoff_const} must be positive"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub fn model(&self) -> Result<CrossSectionModel> {
        match &self.cross_section {
            CrossSectionChoice::HardSphere => Ok(CrossSectionModel::hard_sphere()),
            CrossSectionChoice::Tabulated {
                table,
                gamma,
                cutoff_const,
            } => CrossSectionModel::new(
                "tabulated",
                *gamma,
                AngularFactor::from_table_file(table)?,
                *cutoff_const,
            ),
        }
    }

    pub fn assembly_options(&self) -> AssemblyOptions {
        AssemblyOptions {
            tolerance: self.assembly_tol,
            conservative: self.conservative,
            ..AssemblyOptions::default()
        }
    }

    pub fn slab_config(&self) -> Result<SlabConfig> {
        let mut cfg =
            SlabConfig::new(self.l, self.x_uniform, self.dyadic_k_min, self.dyadic_k_max)?;
        cfg.tol = self.tol;
        cfg.max_iter = self.max_iter;
        cfg.relaxation = self.relaxation;
        cfg.validate()?;
        let depth = cfg.dyadic_depth(self.dyadic_k_min);
        if depth < MIN_DYADIC_DEPTH {
            return Err(Error::Validation(vec![format!(
                "x-grid dyadic depth {depth} is below {MIN_DYADIC_DEPTH}"
            )]));
        }
        Ok(cfg)
    }

    pub fn boundary_data(&self) -> Result<BoundaryData> {
        let bc = match &self.boundary {
            BoundaryChoice::Preset { name } => BoundaryData::preset(*name),
            BoundaryChoice::Table { path } => BoundaryData::from_table_file(path)?,
        };
        Ok(bc.with_p(self.grad_p))
    }

    pub fn singularity_options(&self) -> SingularityOptions {
        SingularityOptions {
            k_min: self.fit_k_min,
            k_max: self.fit_k_max,
        }
    }
}
