//! Mild-form transport sweeps and source iteration.
//!
//! Along a characteristic with rate `λ = ν/|ζ₁|` the mild equation is
//! advanced cell by cell: with `K(f)` linear on the cell and `z = λh`,
//! `f(x+h) = e^{-z} f(x) + h/|ζ₁| · [(φ₁(z) - ψ(z)) K_near + ψ(z) K_far]`,
//! where `φ₁(z) = (1 - e^{-z})/z` and `ψ(z) = ∫_0^1 v e^{-zv} dv`. Both are
//! evaluated without cancellation, so `|ζ₁| → 0` gives `f → K(f)/ν`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::boundary::BoundaryData;
use super::config::SlabConfig;
use crate::collision::LinearizedOperator;
use crate::error::{Error, Result};

/// `φ₁(z) = (1 - e^{-z})/z`.
pub fn phi1(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        -(-z).exp_m1() / z
    }
}

/// `ψ(z) = (1 - (1+z) e^{-z})/z²`.
pub fn psi(z: f64) -> f64 {
    if z < 0.5 {
        // Σ (-z)^k / (k! (k+2))
        let mut term = 1.0;
        let mut sum = 0.5;
        for k in 1..24 {
            term *= -z / k as f64;
            sum += term / (k + 2) as f64;
        }
        sum
    } else {
        (-(-z).exp_m1() - z * (-z).exp()) / (z * z)
    }
}

/// `(e^{-z}, h(φ₁ - ψ), hψ)` for a cell of width `h` and `z = λh`: the
/// attenuation and the weights of the near and far end values of a linear
/// source.
pub fn cell_weights(h: f64, lambda: f64) -> (f64, f64, f64) {
    let z = lambda * h;
    let p = psi(z);
    ((-z).exp(), h * (phi1(z) - p), h * p)
}

/// Values of `f(x_i, ζ_j)` with convergence bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionField {
    pub x: Vec<f64>,
    /// Row `i` holds the grid function at `x_i`.
    pub values: Array2<f64>,
    pub converged: bool,
    pub residual_history: Vec<f64>,
    /// `sup_x ‖f - T(f)‖_*` of the returned iterate.
    pub fixed_point_residual: f64,
    /// Whether the residual decreased monotonically after the third iterate.
    pub monotone: bool,
    pub grid_hash: String,
}

impl DistributionField {
    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn slice(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }

    /// `|||f||| = sup_x ‖f(x)‖_*`.
    pub fn triple_norm(&self, op: &LinearizedOperator) -> f64 {
        self.values
            .rows()
            .into_iter()
            .map(|r| op.norm_star_unchecked(r.as_slice().expect("contiguous row")))
            .fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn ensure_converged(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            Err(Error::NonConvergence {
                iterations: self.residual_history.len(),
                residual: self
                    .residual_history
                    .last()
                    .copied()
                    .unwrap_or(f64::INFINITY),
            })
        }
    }
}

/// Precomputed per-cell weights for every velocity node, divided by `|ζ₁|`.
pub(crate) struct Sweep {
    atten: Array2<f64>,
    near: Array2<f64>,
    far: Array2<f64>,
    positive: Vec<bool>,
}

impl Sweep {
    pub(crate) fn new(op: &LinearizedOperator, cfg: &SlabConfig) -> Self {
        let n = op.grid().len();
        let cells = cfg.nx() - 1;
        let mut atten = Array2::zeros((cells, n));
        let mut near = Array2::zeros((cells, n));
        let mut far = Array2::zeros((cells, n));
        let nu = op.nu();
        let positive: Vec<bool> = op.grid().nodes().map(|(a, _)| a > 0.0).collect();
        for c in 0..cells {
            let h = cfg.x_nodes[c + 1] - cfg.x_nodes[c];
            for (j, (a, _)) in op.grid().nodes().enumerate() {
                let (e, wn, wf) = cell_weights(h, nu[j] / a.abs());
                atten[[c, j]] = e;
                near[[c, j]] = wn / a.abs();
                far[[c, j]] = wf / a.abs();
            }
        }
        Sweep {
            atten,
            near,
            far,
            positive,
        }
    }

    /// `T` applied given `K(f)` at every node and the incoming values.
    pub(crate) fn apply(&self, kf: ArrayView2<'_, f64>, incoming: &[f64]) -> Array2<f64> {
        let (nx, n) = kf.dim();
        let mut out = Array2::zeros((nx, n));
        for j in 0..n {
            if self.positive[j] {
                out[[0, j]] = incoming[j];
            } else {
                out[[nx - 1, j]] = incoming[j];
            }
        }
        for c in 0..nx - 1 {
            for j in 0..n {
                if self.positive[j] {
                    out[[c + 1, j]] = self.atten[[c, j]] * out[[c, j]]
                        + self.near[[c, j]] * kf[[c + 1, j]]
                        + self.far[[c, j]] * kf[[c, j]];
                }
            }
        }
        for c in (0..nx - 1).rev() {
            for j in 0..n {
                if !self.positive[j] {
                    out[[c, j]] = self.atten[[c, j]] * out[[c + 1, j]]
                        + self.near[[c, j]] * kf[[c, j]]
                        + self.far[[c, j]] * kf[[c + 1, j]];
                }
            }
        }
        out
    }
}

fn check_dims(values: &Array2<f64>, op: &LinearizedOperator, cfg: &SlabConfig) -> Result<()> {
    let n = op.grid().len();
    if values.dim() != (cfg.nx(), n) {
        return Err(Error::DimensionMismatch {
            context: "distribution field",
            expected: cfg.nx() * n,
            got: values.len(),
        });
    }
    Ok(())
}

fn sup_star(op: &LinearizedOperator, d: &Array2<f64>) -> f64 {
    d.rows()
        .into_iter()
        .map(|r| op.norm_star_unchecked(r.as_slice().expect("contiguous row")))
        .fold(0.0, f64::max)
}

/// One application of the mild-form map `T`.
pub fn mild_step(
    f: &DistributionField,
    bc: &BoundaryData,
    op: &LinearizedOperator,
    cfg: &SlabConfig,
) -> Result<DistributionField> {
    cfg.validate()?;
    check_dims(&f.values, op, cfg)?;
    let sweep = Sweep::new(op, cfg);
    let kf = op.apply_k_rows(f.values.view())?;
    let values = sweep.apply(kf.view(), &bc.incoming(op.grid()));
    Ok(DistributionField {
        values,
        converged: false,
        residual_history: Vec::new(),
        ..f.clone()
    })
}

/// `f ≡ g` at every x-node.
pub fn constant_field(g: &[f64], cfg: &SlabConfig, op: &LinearizedOperator) -> DistributionField {
    let values = Array2::from_shape_fn((cfg.nx(), g.len()), |(_, j)| g[j]);
    DistributionField {
        x: cfg.x_nodes.clone(),
        values,
        converged: false,
        residual_history: Vec::new(),
        fixed_point_residual: f64::NAN,
        monotone: true,
        grid_hash: op.grid().hash(),
    }
}

/// Source iteration from the free-streaming field.
pub fn solve(
    bc: &BoundaryData,
    op: &LinearizedOperator,
    cfg: &SlabConfig,
) -> Result<DistributionField> {
    solve_from(bc, op, cfg, None)
}

/// Source iteration from `initial`, or from the free-streaming field.
pub fn solve_from(
    bc: &BoundaryData,
    op: &LinearizedOperator,
    cfg: &SlabConfig,
    initial: Option<Array2<f64>>,
) -> Result<DistributionField> {
    cfg.validate()?;
    let n = op.grid().len();
    let sweep = Sweep::new(op, cfg);
    let incoming = bc.incoming(op.grid());
    let mut f = match initial {
        Some(v) => {
            check_dims(&v, op, cfg)?;
            v
        }
        None => sweep.apply(Array2::zeros((cfg.nx(), n)).view(), &incoming),
    };
    let omega = cfg.relaxation;
    let mut history = Vec::new();
    let mut converged = false;
    let mut t = sweep.apply(op.apply_k_rows(f.view())?.view(), &incoming);
    for _ in 0..cfg.max_iter {
        let next = if omega == 1.0 {
            t
        } else {
            &f * (1.0 - omega) + &t * omega
        };
        let res = sup_star(op, &(&next - &f));
        if !res.is_finite() {
            return Err(Error::NonConvergence {
                iterations: history.len() + 1,
                residual: res,
            });
        }
        history.push(res);
        f = next;
        t = sweep.apply(op.apply_k_rows(f.view())?.view(), &incoming);
        if res <= cfg.tol {
            converged = true;
            break;
        }
    }
    let fixed_point_residual = sup_star(op, &(&t - &f));
    let monotone = history.windows(2).skip(3).all(|w| w[1] <= w[0]);
    Ok(DistributionField {
        x: cfg.x_nodes.clone(),
        values: f,
        converged,
        residual_history: history,
        fixed_point_residual,
        monotone,
        grid_hash: op.grid().hash(),
    })
}

/// Largest system the dense path accepts.
pub const DENSE_LIMIT: usize = 6000;

/// The affine map `T(F) = S + M F` on the flattened field (row-major in
/// `(x, ζ)`), assembled column by column.
pub fn dense_system(
    bc: &BoundaryData,
    op: &LinearizedOperator,
    cfg: &SlabConfig,
) -> Result<(Array2<f64>, Array1<f64>)> {
    cfg.validate()?;
    let n = op.grid().len();
    let nx = cfg.nx();
    let size = n * nx;
    if size > DENSE_LIMIT {
        return Err(Error::Validation(vec![format!(
            "dense path limited to {DENSE_LIMIT} unknowns, got {size}"
        )]));
    }
    let sweep = Sweep::new(op, cfg);
    let source = sweep.apply(Array2::zeros((nx, n)).view(), &bc.incoming(op.grid()));
    let zero = vec![0.0; n];
    let kw = op.k_weighted();
    let mut m = Array2::zeros((size, size));
    let mut kf = Array2::zeros((nx, n));
    for i in 0..nx {
        for k in 0..n {
            kf.fill(0.0);
            kf.row_mut(i).assign(&kw.column(k));
            let col = sweep.apply(kf.view(), &zero);
            m.column_mut(i * n + k)
                .assign(&Array1::from_iter(col.iter().copied()));
        }
    }
    Ok((m, Array1::from_iter(source.iter().copied())))
}

/// Solves `(I - M) F = S` by LU; for tiny grids only.
pub fn solve_dense(
    bc: &BoundaryData,
    op: &LinearizedOperator,
    cfg: &SlabConfig,
) -> Result<DistributionField> {
    let (m, s) = dense_system(bc, op, cfg)?;
    let size = s.len();
    let a = nalgebra::DMatrix::from_fn(
        size,
        size,
        |i, j| if i == j { 1.0 } else { 0.0 } - m[[i, j]],
    );
    let b = nalgebra::DVector::from_iterator(size, s.iter().copied());
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Assembly("singular dense transport system".into()))?;
    let values = Array2::from_shape_vec((cfg.nx(), op.grid().len()), x.iter().copied().collect())
        .expect("solution has the field size");
    let t = {
        let sweep = Sweep::new(op, cfg);
        sweep.apply(
            op.apply_k_rows(values.view())?.view(),
            &bc.incoming(op.grid()),
        )
    };
    Ok(DistributionField {
        x: cfg.x_nodes.clone(),
        fixed_point_residual: sup_star(op, &(&t - &values)),
        values,
        converged: true,
        residual_history: Vec::new(),
        monotone: true,
        grid_hash: op.grid().hash(),
    })
}
