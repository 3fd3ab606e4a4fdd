//! Evaluation of a solved field between x-nodes and of its x-derivative.

use ndarray::Array2;

use super::transport::{cell_weights, phi1, psi, DistributionField};
use crate::collision::LinearizedOperator;
use crate::error::{Error, Result};

/// A converged field with `K(f)` cached at every x-node; `K(f)` is taken
/// linear between nodes, as in the transport sweep.
pub struct FieldEvaluator<'a> {
    field: &'a DistributionField,
    op: &'a LinearizedOperator,
    kf: Array2<f64>,
    l: f64,
}

impl<'a> FieldEvaluator<'a> {
    pub fn new(field: &'a DistributionField, op: &'a LinearizedOperator) -> Result<Self> {
        if field.values.ncols() != op.grid().len() || field.grid_hash != op.grid().hash() {
            return Err(Error::DimensionMismatch {
                context: "field evaluator",
                expected: op.grid().len(),
                got: field.values.ncols(),
            });
        }
        let kf = op.apply_k_rows(field.values.view())?;
        let l = *field.x.last().expect("non-empty x-grid");
        Ok(FieldEvaluator { field, op, kf, l })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    /// `K(f)` at the x-nodes.
    pub fn k_nodes(&self) -> &Array2<f64> {
        &self.kf
    }

    /// Cell `i` with `x_i ≤ x ≤ x_{i+1}`.
    fn cell(&self, x: f64) -> Result<usize> {
        if !(x >= 0.0 && x <= self.l) {
            return Err(Error::domain(
                "field evaluation",
                format!("x = {x} outside [0, {}]", self.l),
            ));
        }
        let xs = &self.field.x;
        Ok(xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1) - 1)
    }

    /// Linear interpolant of `K(f)` at `x`.
    pub fn k_interp(&self, x: f64) -> Result<Vec<f64>> {
        let i = self.cell(x)?;
        let xs = &self.field.x;
        let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        Ok(self
            .kf
            .row(i)
            .iter()
            .zip(self.kf.row(i + 1))
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect())
    }

    /// `f(x, ·)` from the mild form over the partial cell containing `x`.
    pub fn at(&self, x: f64) -> Result<Vec<f64>> {
        let i = self.cell(x)?;
        let xs = &self.field.x;
        let h = xs[i + 1] - xs[i];
        let nu = self.op.nu();
        let f = &self.field.values;
        Ok(self
            .op
            .grid()
            .nodes()
            .enumerate()
            .map(|(j, (a, _))| {
                let lam = nu[j] / a.abs();
                let (k0, k1) = (self.kf[[i, j]], self.kf[[i + 1, j]]);
                // Base point, distance and the K values at base and far end.
                let (base, d, kb, ke) = if a > 0.0 {
                    (f[[i, j]], x - xs[i], k0, k1)
                } else {
                    (f[[i + 1, j]], xs[i + 1] - x, k1, k0)
                };
                let z = lam * d;
                (-z).exp() * base
                    + (kb * d * phi1(z) + (ke - kb) * d * d / h * (phi1(z) - psi(z))) / a.abs()
            })
            .collect())
    }

    /// `K(f(x, ·))` with `f(x)` from [`Self::at`].
    pub fn k_at(&self, x: f64) -> Result<Vec<f64>> {
        self.op.apply_k(&self.at(x)?)
    }

    /// `L(f)` at a wall.
    pub fn l_at_wall(&self, at_l: bool) -> Vec<f64> {
        let row = if at_l { self.field.nx() - 1 } else { 0 };
        let nu = self.op.nu();
        (0..self.op.grid().len())
            .map(|j| -nu[j] * self.field.values[[row, j]] + self.kf[[row, j]])
            .collect()
    }

    /// `∂_x f(x, ·)` for `0 < x < l` from the rearranged mild form: for
    /// `ζ₁ > 0`
    /// `e^{-λx}/ζ₁ [L(f)(0) + K(x) - K(0)] + ∫_0^x ν/ζ₁² e^{-λ(x-s)} (K(x) - K(s)) ds`,
    /// mirrored about `x = l` for `ζ₁ < 0`. Every difference of `K` is formed
    /// before weighting, so small `|ζ₁|` does not cancel.
    pub fn d_dx(&self, x: f64) -> Result<Vec<f64>> {
        if !(x > 0.0 && x < self.l) {
            return Err(Error::domain(
                "d_dx",
                format!("x = {x} outside (0, {})", self.l),
            ));
        }
        let i = self.cell(x)?;
        let xs = &self.field.x;
        let nx = xs.len();
        let kx = self.k_interp(x)?;
        let l0 = self.l_at_wall(false);
        let ll = self.l_at_wall(true);
        let nu = self.op.nu();
        let mut out = vec![0.0; self.op.grid().len()];
        for (j, (a, _)) in self.op.grid().nodes().enumerate() {
            let lam = nu[j] / a.abs();
            let inv = 1.0 / a.abs();
            let kc = |r: usize| self.kf[[r, j]];
            let (wall, dist, k_wall) = if a > 0.0 {
                (l0[j], x, kc(0))
            } else {
                (ll[j], self.l - x, kc(nx - 1))
            };
            let mut v = (-lam * dist).exp() * inv * (wall + kx[j] - k_wall);
            // Partial cell between x and the neighbouring node toward the wall.
            let (d, dk) = if a > 0.0 {
                (x - xs[i], kc(i + 1) - kc(i))
            } else {
                (xs[i + 1] - x, kc(i) - kc(i + 1))
            };
            let h = xs[i + 1] - xs[i];
            let zd = lam * d;
            v += dk / h * d * inv * zd * psi(zd);
            // Whole cells further toward the wall.
            let cells: Box<dyn Iterator<Item = usize>> = if a > 0.0 {
                Box::new(0..i)
            } else {
                Box::new(i + 1..nx - 1)
            };
            for c in cells {
                let (near_node, far_node) = if a > 0.0 { (c + 1, c) } else { (c, c + 1) };
                let gap = if a > 0.0 { x - xs[c + 1] } else { xs[c] - x };
                let hc = xs[c + 1] - xs[c];
                let (_, wn, wf) = cell_weights(hc, lam);
                let scale = (-lam * gap).exp() * lam * inv;
                v += scale * ((kx[j] - kc(far_node)) * wf + (kx[j] - kc(near_node)) * wn);
            }
            out[j] = if a > 0.0 { v } else { -v };
        }
        Ok(out)
    }
}
