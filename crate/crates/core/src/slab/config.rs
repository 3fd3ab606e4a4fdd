use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slab geometry, x-grid and iteration controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabConfig {
    pub l: f64,
    pub x_nodes: Vec<f64>,
    /// Stop when `sup_x ‖f_{n+1} - f_n‖_*` drops to this.
    pub tol: f64,
    pub max_iter: usize,
    pub relaxation: f64,
}

impl SlabConfig {
    /// Default controls on the x-grid of [`dyadic_x_grid`].
    pub fn new(l: f64, n_uniform: usize, k_min: u32, k_max: u32) -> Result<Self> {
        let cfg = SlabConfig {
            l,
            x_nodes: dyadic_x_grid(l, n_uniform, k_min, k_max)?,
            tol: 1e-9,
            max_iter: 500,
            relaxation: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_nodes(l: f64, x_nodes: Vec<f64>) -> Result<Self> {
        let cfg = SlabConfig {
            l,
            x_nodes,
            tol: 1e-9,
            max_iter: 500,
            relaxation: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.l > 0.0 && self.l.is_finite()) {
            problems.push(format!("slab width l = {} must be positive", self.l));
        }
        if self.x_nodes.len() < 2 {
            problems.push("x-grid needs at least two nodes".to_string());
        } else {
            if self.x_nodes[0] != 0.0 {
                problems.push(format!("first x node is {} instead of 0", self.x_nodes[0]));
            }
            if *self.x_nodes.last().unwrap() != self.l {
                problems.push(format!(
                    "last x node is {} instead of l = {}",
                    self.x_nodes.last().unwrap(),
                    self.l
                ));
            }
            if self.x_nodes.windows(2).any(|w| !(w[1] > w[0])) {
                problems.push("x nodes must be strictly increasing".to_string());
            }
        }
        if !(self.tol > 0.0) {
            problems.push(format!("tol = {} must be positive", self.tol));
        }
        if self.max_iter == 0 {
            problems.push("max_iter must be positive".to_string());
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            problems.push(format!(
                "relaxation = {} must lie in (0, 1]",
                self.relaxation
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub fn nx(&self) -> usize {
        self.x_nodes.len()
    }

    /// Index of the node equal to `x`, if any.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        self.x_nodes.iter().position(|&v| v == x)
    }

    /// Largest `k` such that both `2^{-k}` and `l - 2^{-k}` are nodes for
    /// every `k` from `k_min` up to it; 0 if `2^{-k_min}` is missing.
    pub fn dyadic_depth(&self, k_min: u32) -> u32 {
        let mut depth = 0;
        for k in k_min..64 {
            let d = 2f64.powi(-(k as i32));
            if self.node_index(d).is_some() && self.node_index(self.l - d).is_some() {
                depth = k;
            } else {
                break;
            }
        }
        depth
    }
}

/// `n_uniform` equally spaced nodes on `[0, l]` joined with `2^{-k}` and
/// `l - 2^{-k}` for `k = k_min..=k_max`.
pub fn dyadic_x_grid(l: f64, n_uniform: usize, k_min: u32, k_max: u32) -> Result<Vec<f64>> {
    if n_uniform < 2 || k_min > k_max || 2f64.powi(-(k_min as i32)) >= 0.5 * l {
        return Err(Error::Validation(vec![format!(
            "cannot build x-grid from l = {l}, {n_uniform} uniform nodes, k = {k_min}..{k_max}"
        )]));
    }
    let mut x: Vec<f64> = (0..n_uniform)
        .map(|i| l * i as f64 / (n_uniform - 1) as f64)
        .collect();
    *x.last_mut().unwrap() = l;
    for k in k_min..=k_max {
        let d = 2f64.powi(-(k as i32));
        x.push(d);
        x.push(l - d);
    }
    x.sort_by(f64::total_cmp);
    // Coincident nodes are merged.
    let mut out: Vec<f64> = Vec::with_capacity(x.len());
    for v in x {
        match out.last() {
            Some(&last) if v - last <= 1e-12 * l => {}
            _ => out.push(v),
        }
    }
    Ok(out)
}
