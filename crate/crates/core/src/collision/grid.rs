//! Axisymmetric velocity grid: tensor product of Gauss-Legendre panels in the
//! axial speed ζ₁ (symmetric about 0, graded toward it) and the radial speed ζ_r.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Parameters from which a [`VelocityGrid`] is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub zeta_max: f64,
    /// Total number of axial nodes (both signs); must be even.
    pub n_zeta1: usize,
    pub n_zeta_r: usize,
    /// Preferred Gauss-Legendre order per panel.
    pub panel_order: usize,
    /// Right edge of the innermost axial panel `[0, zeta1_min]`.
    pub zeta1_min: f64,
    /// Slope κ of the linear part of the grading map `ln(ζ/ζ_min) + κ(ζ - ζ_min)`.
    pub zeta1_grading: f64,
    /// Minimum number of azimuthal points in the pre-integrated kernel.
    pub azimuthal_order: usize,
    /// Tolerance of the Maxwellian mass check.
    pub eps_grid: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            zeta_max: 6.0,
            n_zeta1: 96,
            n_zeta_r: 16,
            panel_order: 4,
            zeta1_min: 1e-6,
            zeta1_grading: 2.0,
            azimuthal_order: 16,
            eps_grid: 1e-5,
        }
    }
}

impl GridSpec {
    pub fn with_counts(n_zeta1: usize, n_zeta_r: usize) -> Self {
        GridSpec {
            n_zeta1,
            n_zeta_r,
            ..GridSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.zeta_max > 0.0 && self.zeta_max.is_finite()) {
            problems.push(format!("zeta_max = {} must be positive", self.zeta_max));
        }
        if self.n_zeta1 < 2 || !self.n_zeta1.is_multiple_of(2) {
            problems.push(format!(
                "n_zeta1 = {} must be even and at least 2",
                self.n_zeta1
            ));
        }
        if self.n_zeta_r == 0 {
            problems.push("n_zeta_r must be positive".into());
        }
        if self.panel_order == 0 {
            problems.push("panel_order must be positive".into());
        }
        if !(self.zeta1_min > 0.0 && self.zeta1_min < self.zeta_max) {
            problems.push(format!(
                "zeta1_min = {} must lie in (0, zeta_max)",
                self.zeta1_min
            ));
        }
        if !(self.zeta1_grading >= 0.0) {
            problems.push(format!(
                "zeta1_grading = {} must be nonnegative",
                self.zeta1_grading
            ));
        }
        if self.azimuthal_order < 4 {
            problems.push("azimuthal_order must be at least 4".into());
        }
        if !(self.eps_grid > 0.0) {
            problems.push("eps_grid must be positive".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

/// A 1-D Gauss-Legendre panel owning the node range `first..first + len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
    pub first: usize,
    pub len: usize,
}

impl Panel {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn nodes(&self) -> std::ops::Range<usize> {
        self.first..self.first + self.len
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub panels: Vec<Panel>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Axis {
    fn from_edges(edges: &[f64], counts: &[usize]) -> Axis {
        let mut panels = Vec::with_capacity(counts.len());
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (k, &len) in counts.iter().enumerate() {
            let gl = GaussLegendre::new(len);
            let (lo, hi) = (edges[k], edges[k + 1]);
            panels.push(Panel {
                lo,
                hi,
                first: nodes.len(),
                len,
            });
            for (x, w) in gl.on_interval(lo, hi) {
                nodes.push(x);
                weights.push(w);
            }
        }
        Axis {
            panels,
            nodes,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the panel containing node `i`.
    pub fn panel_of(&self, i: usize) -> usize {
        self.panels.partition_point(|p| p.first + p.len <= i)
    }
}

/// Splits `n` nodes into panels of at most `order` nodes, as evenly as possible.
fn panel_counts(n: usize, order: usize) -> Vec<usize> {
    let p = n.div_ceil(order);
    (0..p).map(|k| n / p + usize::from(k < n % p)).collect()
}

/// Panel edges on [0, zeta_max] for one side of the axial grid.
fn axial_edges(n_panels: usize, spec: &GridSpec) -> Vec<f64> {
    let zmax = spec.zeta_max;
    if n_panels == 1 {
        return vec![0.0, zmax];
    }
    let zmin = spec.zeta1_min;
    let kappa = spec.zeta1_grading;
    let g = |z: f64| (z / zmin).ln() + kappa * (z - zmin);
    let gmax = g(zmax);
    let mut edges = vec![0.0, zmin];
    let graded = n_panels - 1;
    for k in 1..graded {
        let target = gmax * k as f64 / graded as f64;
        let (mut lo, mut hi) = (zmin, zmax);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        edges.push(0.5 * (lo + hi));
    }
    edges.push(zmax);
    edges
}

/// Axisymmetric velocity grid. Node `i = i1 · n_r + ir` sits at
/// `(zeta1[i1], zeta_r[ir])`, with the axial nodes in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    spec: GridSpec,
    pub zeta1: Axis,
    pub zeta_r: Axis,
    weights: Vec<f64>,
}

impl VelocityGrid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let half = spec.n_zeta1 / 2;
        let counts = panel_counts(half, spec.panel_order);
        let pos_edges = axial_edges(counts.len(), &spec);
        let mut edges: Vec<f64> = pos_edges.iter().rev().map(|&e| -e).collect();
        edges.extend_from_slice(&pos_edges[1..]);
        let mut all_counts: Vec<usize> = counts.iter().rev().copied().collect();
        all_counts.extend_from_slice(&counts);
        let zeta1 = Axis::from_edges(&edges, &all_counts);

        let r_counts = panel_counts(spec.n_zeta_r, spec.panel_order);
        let np = r_counts.len();
        let r_edges: Vec<f64> = (0..=np)
            .map(|k| spec.zeta_max * k as f64 / np as f64)
            .collect();
        let zeta_r = Axis::from_edges(&r_edges, &r_counts);

        let mut weights = Vec::with_capacity(zeta1.len() * zeta_r.len());
        for &w1 in &zeta1.weights {
            for (&r, &wr) in zeta_r.nodes.iter().zip(&zeta_r.weights) {
                weights.push(w1 * wr * 2.0 * PI * r);
            }
        }
        let grid = VelocityGrid {
            spec,
            zeta1,
            zeta_r,
            weights,
        };
        let defect = grid.mass_defect();
        if defect.abs() > grid.spec.eps_grid {
            return Err(Error::Validation(vec![format!(
                "Maxwellian mass check failed: |sum - 1| = {:.3e} > eps_grid = {:.1e}",
                defect.abs(),
                grid.spec.eps_grid
            )]));
        }
        Ok(grid)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn n_zeta1(&self) -> usize {
        self.zeta1.len()
    }

    pub fn n_zeta_r(&self) -> usize {
        self.zeta_r.len()
    }

    pub fn zeta_max(&self) -> f64 {
        self.spec.zeta_max
    }

    pub fn azimuthal_order(&self) -> usize {
        self.spec.azimuthal_order
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn index(&self, i1: usize, ir: usize) -> usize {
        i1 * self.zeta_r.len() + ir
    }

    /// `(ζ₁, ζ_r)` of node `i`.
    pub fn node(&self, i: usize) -> (f64, f64) {
        let nr = self.zeta_r.len();
        (self.zeta1.nodes[i / nr], self.zeta_r.nodes[i % nr])
    }

    pub fn speed(&self, i: usize) -> f64 {
        let (a, r) = self.node(i);
        a.hypot(r)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    /// Axial levels with ζ₁ > 0, in ascending order.
    pub fn positive_levels(&self) -> std::ops::Range<usize> {
        self.zeta1.len() / 2..self.zeta1.len()
    }

    /// Axial level mirrored through ζ₁ = 0.
    pub fn mirror_level(&self, i1: usize) -> usize {
        self.zeta1.len() - 1 - i1
    }

    /// `w^{1/2}(ζ) = π^{-3/4} e^{-|ζ|²/2}` at every node.
    pub fn sqrt_maxwellian(&self) -> Vec<f64> {
        self.nodes()
            .map(|(a, r)| sqrt_maxwellian(a * a + r * r))
            .collect()
    }

    /// `Σ w_i π^{-3/2} e^{-|ζ_i|²} - 1`.
    pub fn mass_defect(&self) -> f64 {
        let s: f64 = self
            .nodes()
            .zip(&self.weights)
            .map(|((a, r), w)| w * PI.powf(-1.5) * (-(a * a + r * r)).exp())
            .sum();
        s - 1.0
    }

    /// Grid inner product `Σ w_i f_i g_i`.
    pub fn dot(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(f)
            .zip(g)
            .map(|((w, a), b)| w * a * b)
            .sum()
    }

    /// Hex SHA-256 of the node and weight bit patterns.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.zeta1.len() as u64).to_le_bytes());
        h.update((self.zeta_r.len() as u64).to_le_bytes());
        h.update((self.spec.azimuthal_order as u64).to_le_bytes());
        for v in self
            .zeta1
            .nodes
            .iter()
            .chain(&self.zeta_r.nodes)
            .chain(&self.weights)
        {
            h.update(v.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

pub fn sqrt_maxwellian(speed_sq: f64) -> f64 {
    PI.powf(-0.75) * (-0.5 * speed_sq).exp()
}
