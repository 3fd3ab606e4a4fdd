use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest accepted ratio of the largest to the smallest abscissa; the
/// default range `2^{-14}..2^{-8}` spans 64.
pub const MIN_SPAN: f64 = 32.0;

/// Least-squares fit `d ≈ a + b (-ln x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    /// RMS of the model residuals.
    pub residual: f64,
    pub samples: usize,
}

pub fn fit_log_singularity(samples: &[(f64, f64)]) -> Result<LogFit> {
    if samples.len() < 6 {
        return Err(Error::DegenerateFit(format!(
            "{} samples, at least 6 required",
            samples.len()
        )));
    }
    if let Some(&(x, _)) = samples.iter().find(|s| !(s.0 > 0.0) || !s.1.is_finite()) {
        return Err(Error::DegenerateFit(format!(
            "sample at x = {x} is not usable"
        )));
    }
    let (lo, hi) = samples.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), s| {
        (lo.min(s.0), hi.max(s.0))
    });
    if hi / lo < MIN_SPAN {
        return Err(Error::DegenerateFit(format!(
            "abscissae span [{lo:e}, {hi:e}], less than a factor {MIN_SPAN}"
        )));
    }
    let n = samples.len() as f64;
    let t: Vec<f64> = samples.iter().map(|s| -s.0.ln()).collect();
    let mt = t.iter().sum::<f64>() / n;
    let md = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let stt: f64 = t.iter().map(|v| (v - mt).powi(2)).sum();
    let std: f64 = t
        .iter()
        .zip(samples)
        .map(|(v, s)| (v - mt) * (s.1 - md))
        .sum();
    let b = std / stt;
    let a = md - b * mt;
    let ss: f64 = t
        .iter()
        .zip(samples)
        .map(|(v, s)| (s.1 - a - b * v).powi(2))
        .sum();
    Ok(LogFit {
        a,
        b,
        residual: (ss / n).sqrt(),
        samples: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_model() {
        let s: Vec<(f64, f64)> = (8..=14)
            .map(|k| {
                let x = 2f64.powi(-k);
                (x, 3.0 - 2.0 * x.ln())
            })
            .collect();
        let fit = fit_log_singularity(&s).unwrap();
        assert!((fit.b - 2.0).abs() < 1e-12);
        assert!((fit.a - 3.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn rejects_degenerate_designs() {
        let same = vec![(0.01, 1.0); 8];
        assert!(matches!(
            fit_log_singularity(&same),
            Err(Error::DegenerateFit(_))
        ));
        let few: Vec<(f64, f64)> = (1..=5).map(|k| (10f64.powi(-k), 0.0)).collect();
        assert!(fit_log_singularity(&few).is_err());
        let narrow: Vec<(f64, f64)> = (0..8)
            .map(|k| (0.01 * (1.0 + 3.0 * k as f64), 0.0))
            .collect();
        assert!(fit_log_singularity(&narrow).is_err());
    }
}
