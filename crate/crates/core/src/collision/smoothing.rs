//! Empirical decay-improvement constants of `K`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::assembly::{norm_linf_weighted, LinearizedOperator};

/// Weights `a` of the `L∞_a → L∞_{2+a-γ}` bound.
pub const SMOOTHING_WEIGHTS: [f64; 3] = [0.0, 2.0, 4.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    /// `max ‖Kf‖_{L∞_{3/2-γ}} / ‖f‖_{L²}`.
    pub c1: f64,
    /// `(a, max ‖Kf‖_{L∞_{2+a-γ}} / ‖f‖_{L∞_a})`.
    pub c2: Vec<(f64, f64)>,
    pub samples: usize,
    pub seed: u64,
}

/// Random Gaussian bumps `A e^{-|ζ-μ|²/(2s²)}`, optionally times a Gaussian
/// envelope; grid-independent so the ratios can be compared across grids.
pub fn bump_family(op: &LinearizedOperator, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes: Vec<(f64, f64)> = op.grid().nodes().collect();
    (0..samples)
        .map(|s| {
            let amp = rng.random_range(-1.0..1.0);
            let mu1 = rng.random_range(-4.0..4.0);
            let mur = rng.random_range(0.0..4.0);
            let width: f64 = rng.random_range(0.5..1.5);
            let envelope = s % 2 == 1;
            nodes
                .iter()
                .map(|&(a, r)| {
                    let d2 = (a - mu1).powi(2) + (r - mur).powi(2);
                    let env = if envelope {
                        (-0.25 * (a * a + r * r)).exp()
                    } else {
                        1.0
                    };
                    amp * env * (-0.5 * d2 / (width * width)).exp()
                })
                .collect()
        })
        .collect()
}

pub fn smoothing_report(op: &LinearizedOperator, samples: usize, seed: u64) -> SmoothingReport {
    let grid = op.grid();
    let gamma = op.gamma();
    let mut c1 = 0.0f64;
    let mut c2 = vec![0.0f64; SMOOTHING_WEIGHTS.len()];
    for f in bump_family(op, samples, seed) {
        let l2 = grid.dot(&f, &f).sqrt();
        if l2 == 0.0 {
            continue;
        }
        let kf = op.apply_k(&f).expect("grid-sized test function");
        let lhs = norm_linf_weighted(&kf, 1.5 - gamma, grid).expect("valid weight");
        c1 = c1.max(lhs / l2);
        for (c, &a) in c2.iter_mut().zip(&SMOOTHING_WEIGHTS) {
            let den = norm_linf_weighted(&f, a, grid).expect("valid weight");
            let num = norm_linf_weighted(&kf, 2.0 + a - gamma, grid).expect("valid weight");
            *c = c.max(num / den);
        }
    }
    SmoothingReport {
        c1,
        c2: SMOOTHING_WEIGHTS.iter().copied().zip(c2).collect(),
        samples,
        seed,
    }
}
