//! Dense assembly of `L = -ν + K` on a [`VelocityGrid`].
//!
//! Off-diagonal entries are the azimuthally averaged kernel at node pairs,
//! used with the grid weights as a Nyström rule. The averaged kernel has a
//! logarithmic singularity on the diagonal, which is removed by subtracting
//! the invariant `g` of the mode (`m = w^{1/2}` for mode 0, `ζ_r m` for
//! mode 1): since `K g = ν g` exactly,
//! `(Kf)_i = Σ_{j≠i} K_ij w_j (f_j - f_i g_j/g_i) + ν_i f_i`, so the diagonal
//! entry absorbs the singular part. Optionally the remaining invariants are
//! projected out exactly.

use std::time::Instant;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis as NdAxis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::frequency::compute_nu;
use super::grid::{sqrt_maxwellian, VelocityGrid};
use super::kernel::CollisionKernel;
use crate::cross_section::CrossSectionModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblyOptions {
    /// Bound on the estimated azimuthal quadrature error of an entry,
    /// relative to `max(1, |K_ij|)`.
    pub tolerance: f64,
    /// Azimuthal Fourier mode, 0 or 1.
    pub mode: u32,
    /// Project the discrete operator so the collision invariants of the mode
    /// are annihilated exactly.
    pub conservative: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions {
            tolerance: 1e-8,
            mode: 0,
            conservative: true,
        }
    }
}

/// Diagnostics collected during assembly.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AssemblyDiagnostics {
    /// Largest estimated entry error, relative to `max(1, |K_ij|)`.
    pub max_entry_error: f64,
    pub kernel_evaluations: usize,
    /// `‖Lψ‖_*/‖ψ‖_*` for each invariant of the mode, before projection.
    pub raw_invariant_defects: Vec<(String, f64)>,
    /// `max |ΔK_ij|` introduced by the projection.
    pub projection_change: f64,
    pub seconds: f64,
}

/// Discrete `L = -ν + K` with `(Kf)_i = Σ_j K_ij w_j f_j`.
#[derive(Debug, Clone)]
pub struct LinearizedOperator {
    grid: VelocityGrid,
    model: CrossSectionModel,
    mode: u32,
    nu: Array1<f64>,
    k: Array2<f64>,
    kw: Array2<f64>,
    nu0_fit: f64,
    nu1_fit: f64,
    diagnostics: AssemblyDiagnostics,
}

/// Invariants of azimuthal mode `mode` as grid functions, with labels.
pub fn collision_invariants(grid: &VelocityGrid, mode: u32) -> Vec<(String, Vec<f64>)> {
    let m = grid.sqrt_maxwellian();
    let nodes: Vec<(f64, f64)> = grid.nodes().collect();
    match mode {
        0 => vec![
            ("mass".to_string(), m.clone()),
            (
                "momentum_1".to_string(),
                nodes.iter().zip(&m).map(|(n, v)| n.0 * v).collect(),
            ),
            (
                "energy".to_string(),
                nodes
                    .iter()
                    .zip(&m)
                    .map(|(n, v)| (n.0 * n.0 + n.1 * n.1) * v)
                    .collect(),
            ),
        ],
        1 => vec![(
            "momentum_transverse".to_string(),
            nodes.iter().zip(&m).map(|(n, v)| n.1 * v).collect(),
        )],
        _ => Vec::new(),
    }
}

pub fn assemble_operator(
    model: &CrossSectionModel,
    grid: &VelocityGrid,
    opts: &AssemblyOptions,
) -> Result<LinearizedOperator> {
    let kernel = CollisionKernel::new(model, grid.zeta_max())?;
    assemble_with_kernel(model, &kernel, grid, opts)
}

pub fn assemble_with_kernel(
    model: &CrossSectionModel,
    kernel: &CollisionKernel,
    grid: &VelocityGrid,
    opts: &AssemblyOptions,
) -> Result<LinearizedOperator> {
    if !(opts.tolerance > 0.0) || opts.mode > 1 {
        return Err(Error::Assembly(format!(
            "invalid assembly options {opts:?}"
        )));
    }
    let start = Instant::now();
    let n = grid.len();
    let nu: Array1<f64> = (0..n)
        .map(|i| compute_nu(model, grid.speed(i)))
        .collect::<Result<Vec<_>>>()?
        .into();
    let nodes: Vec<(f64, f64)> = grid.nodes().collect();
    let min_pts = grid.azimuthal_order();

    // Upper triangle, row by row.
    let rows: Vec<(Vec<f64>, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (z1, zr) = nodes[i];
            let mut worst = 0.0f64;
            let row = nodes[i + 1..]
                .iter()
                .map(|&(e1, er)| {
                    let (v, e) = kernel.ring_average_with_error(z1, zr, e1, er, opts.mode, min_pts);
                    worst = worst.max(e / v.abs().max(1.0));
                    v
                })
                .collect();
            (row, worst)
        })
        .collect();
    let mut k = Array2::<f64>::zeros((n, n));
    let mut diag = AssemblyDiagnostics {
        kernel_evaluations: n * (n - 1) / 2,
        ..Default::default()
    };
    for (i, (row, worst)) in rows.into_iter().enumerate() {
        diag.max_entry_error = diag.max_entry_error.max(worst);
        for (off, v) in row.into_iter().enumerate() {
            k[[i, i + 1 + off]] = v;
            k[[i + 1 + off, i]] = v;
        }
    }
    if !k.iter().all(|v| v.is_finite()) {
        return Err(Error::Assembly("non-finite kernel entry".into()));
    }
    if diag.max_entry_error > opts.tolerance {
        return Err(Error::Quadrature {
            context: "assemble_operator",
            estimated_error: diag.max_entry_error,
        });
    }

    // Singularity subtraction with g = ζ_r^mode m.
    let w = grid.weights();
    let g: Vec<f64> = nodes
        .iter()
        .map(|&(a, r)| r.powi(opts.mode as i32) * sqrt_maxwellian(a * a + r * r))
        .collect();
    for i in 0..n {
        let off: f64 = (0..n)
            .filter(|&j| j != i)
            .map(|j| k[[i, j]] * w[j] * g[j])
            .sum();
        k[[i, i]] = (nu[i] * g[i] - off) / (w[i] * g[i]);
    }

    let invariants = collision_invariants(grid, opts.mode);
    let mut op =
        LinearizedOperator::from_parts(grid.clone(), model.clone(), opts.mode, nu, k, diag)?;
    op.diagnostics.raw_invariant_defects = invariants
        .iter()
        .map(|(name, psi)| (name.clone(), op.relative_defect(psi)))
        .collect();
    if opts.conservative {
        let change = op.project_invariants(&invariants);
        op.diagnostics.projection_change = change;
    }
    op.diagnostics.seconds = start.elapsed().as_secs_f64();
    Ok(op)
}

impl LinearizedOperator {
    /// Builds an operator from an explicit symmetric kernel matrix.
    pub fn from_parts(
        grid: VelocityGrid,
        model: CrossSectionModel,
        mode: u32,
        nu: Array1<f64>,
        k: Array2<f64>,
        diagnostics: AssemblyDiagnostics,
    ) -> Result<Self> {
        let n = grid.len();
        if nu.len() != n {
            return Err(Error::DimensionMismatch {
                context: "operator nu",
                expected: n,
                got: nu.len(),
            });
        }
        if k.dim() != (n, n) {
            return Err(Error::DimensionMismatch {
                context: "operator K",
                expected: n * n,
                got: k.len(),
            });
        }
        let w = Array1::from(grid.weights().to_vec());
        let kw = &k * &w.view().insert_axis(NdAxis(0));
        let gamma = model.gamma();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (i, &v) in nu.iter().enumerate() {
            let r = v / (1.0 + grid.speed(i)).powf(gamma);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        Ok(LinearizedOperator {
            grid,
            model,
            mode,
            nu,
            k,
            kw,
            nu0_fit: lo,
            nu1_fit: hi,
            diagnostics,
        })
    }

    /// Replaces `L` by `(I-Π) L (I-Π)` with `Π` the grid-orthogonal projector
    /// onto `invariants`; returns the largest entry change of `K`.
    fn project_invariants(&mut self, invariants: &[(String, Vec<f64>)]) -> f64 {
        let n = self.grid.len();
        let sw: Vec<f64> = self.grid.weights().iter().map(|w| w.sqrt()).collect();
        // Orthonormal basis (Euclidean) of W^{1/2} ψ.
        let mut q: Vec<Vec<f64>> = Vec::new();
        for (_, psi) in invariants {
            let mut v: Vec<f64> = psi.iter().zip(&sw).map(|(a, s)| a * s).collect();
            for _ in 0..2 {
                for u in &q {
                    let c: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                v.iter_mut().for_each(|x| *x /= norm);
                q.push(v);
            }
        }
        if q.is_empty() {
            return 0.0;
        }
        // A = W^{1/2} L W^{1/2}... in symmetric form: A_ij = -ν_i δ_ij + s_i K_ij s_j.
        let mut a = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                a[[i, j]] = sw[i] * self.k[[i, j]] * sw[j];
            }
            a[[i, i]] -= self.nu[i];
        }
        let qm = Array2::from_shape_fn((n, q.len()), |(i, c)| q[c][i]);
        let aq = a.dot(&qm);
        let qaq = qm.t().dot(&aq);
        // P A P = A - Q(QᵀA) - (AQ)Qᵀ + Q(QᵀAQ)Qᵀ
        let qqaq = qm.dot(&qaq);
        for i in 0..n {
            for j in 0..n {
                let mut v = a[[i, j]];
                for c in 0..q.len() {
                    v -= qm[[i, c]] * aq[[j, c]] + aq[[i, c]] * qm[[j, c]];
                    v += qqaq[[i, c]] * qm[[j, c]];
                }
                a[[i, j]] = v;
            }
        }
        let mut change = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut v = a[[i, j]];
                if i == j {
                    v += self.nu[i];
                }
                let kij = v / (sw[i] * sw[j]);
                change = change.max((kij - self.k[[i, j]]).abs());
                self.k[[i, j]] = kij;
            }
        }
        // Exact symmetry after roundoff.
        for i in 0..n {
            for j in 0..i {
                let s = 0.5 * (self.k[[i, j]] + self.k[[j, i]]);
                self.k[[i, j]] = s;
                self.k[[j, i]] = s;
            }
        }
        let w = Array1::from(self.grid.weights().to_vec());
        self.kw = &self.k * &w.view().insert_axis(NdAxis(0));
        change
    }

    pub fn grid(&self) -> &VelocityGrid {
        &self.grid
    }

    pub fn model(&self) -> &CrossSectionModel {
        &self.model
    }

    pub fn gamma(&self) -> f64 {
        self.model.gamma()
    }

    /// `ν` at an arbitrary speed.
    pub fn nu_at(&self, speed: f64) -> Result<f64> {
        compute_nu(&self.model, speed)
    }

    pub fn mode(&self) -> u32 {
        self.mode
    }

    pub fn nu(&self) -> ArrayView1<'_, f64> {
        self.nu.view()
    }

    /// Kernel matrix `K_ij`.
    pub fn k(&self) -> ArrayView2<'_, f64> {
        self.k.view()
    }

    /// `K_ij w_j`, the matrix acting on nodal values.
    pub fn k_weighted(&self) -> ArrayView2<'_, f64> {
        self.kw.view()
    }

    pub fn nu0_fit(&self) -> f64 {
        self.nu0_fit
    }

    pub fn nu1_fit(&self) -> f64 {
        self.nu1_fit
    }

    pub fn diagnostics(&self) -> &AssemblyDiagnostics {
        &self.diagnostics
    }

    fn check_len(&self, context: &'static str, got: usize) -> Result<()> {
        let n = self.grid.len();
        if got != n {
            return Err(Error::DimensionMismatch {
                context,
                expected: n,
                got,
            });
        }
        Ok(())
    }

    pub fn apply_k(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len("apply_K", f.len())?;
        Ok(self.kw.dot(&ArrayView1::from(f)).to_vec())
    }

    pub fn apply_l(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len("apply_L", f.len())?;
        let mut out = self.kw.dot(&ArrayView1::from(f));
        out.iter_mut()
            .zip(&self.nu)
            .zip(f)
            .for_each(|((o, n), v)| *o -= n * v);
        Ok(out.to_vec())
    }

    /// `K` applied to every row of `f` (rows are grid functions).
    pub fn apply_k_rows(&self, f: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check_len("apply_K rows", f.ncols())?;
        Ok(f.dot(&self.kw.t()))
    }

    /// `‖f‖_* = (Σ w_i ν_i f_i²)^{1/2}`.
    pub fn norm_star(&self, f: &[f64]) -> Result<f64> {
        self.check_len("norm_star", f.len())?;
        Ok(self.norm_star_unchecked(f))
    }

    pub(crate) fn norm_star_unchecked(&self, f: &[f64]) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.nu)
            .zip(f)
            .map(|((w, n), v)| w * n * v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// `‖Lψ‖_* / ‖ψ‖_*`.
    pub fn relative_defect(&self, psi: &[f64]) -> f64 {
        let l = self.apply_l(psi).expect("grid-sized invariant");
        self.norm_star_unchecked(&l) / self.norm_star_unchecked(psi)
    }

    /// `w^{1/2}` on the grid.
    pub fn sqrt_maxwellian(&self) -> Vec<f64> {
        self.grid
            .nodes()
            .map(|(a, r)| sqrt_maxwellian(a * a + r * r))
            .collect()
    }
}

/// `max_i (1 + |ζ_i|)^a |f_i|`.
pub fn norm_linf_weighted(f: &[f64], a: f64, grid: &VelocityGrid) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(Error::domain(
            "norm_Linf_weighted",
            format!("a = {a} must be nonnegative"),
        ));
    }
    if f.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            context: "norm_Linf_weighted",
            expected: grid.len(),
            got: f.len(),
        });
    }
    Ok(f.iter()
        .enumerate()
        .map(|(i, v)| (1.0 + grid.speed(i)).powf(a) * v.abs())
        .fold(0.0, f64::max))
}
