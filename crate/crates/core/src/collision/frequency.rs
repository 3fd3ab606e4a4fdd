//! Collision frequency `ν(|ζ|) = A_β · (4/√π) ∫_0^∞ V^{2+γ} e^{-(V²+c²)} sinh(2Vc)/(2Vc) dV`,
//! where `A_β = 2π ∫ β dθ` and `c = |ζ|`.

use std::f64::consts::PI;

use crate::cross_section::CrossSectionModel;
use crate::error::{Error, Result};
use crate::quadrature::adaptive_gk;

const REL_TOL: f64 = 1e-13;

/// `e^{-(V²+c²)} sinh(2Vc)/(2Vc)` without overflow or cancellation.
fn radial_weight(v: f64, c: f64) -> f64 {
    let z = 2.0 * v * c;
    if z < 1e-3 {
        let z2 = z * z;
        (-(v * v + c * c)).exp() * (1.0 + z2 / 6.0 + z2 * z2 / 120.0)
    } else {
        let d = v - c;
        let s = v + c;
        ((-d * d).exp() - (-s * s).exp()) / (2.0 * z)
    }
}

pub fn compute_nu(model: &CrossSectionModel, speed: f64) -> Result<f64> {
    if !(speed >= 0.0 && speed.is_finite()) {
        return Err(Error::domain(
            "compute_nu",
            format!("speed = {speed} must be nonnegative"),
        ));
    }
    let gamma = model.gamma();
    let lo = (speed - 9.0).max(0.0);
    let hi = speed + 9.0;
    let r = adaptive_gk(
        |v| v.powf(2.0 + gamma) * radial_weight(v, speed),
        lo,
        hi,
        0.0,
        REL_TOL,
        400,
    );
    if !r.converged {
        return Err(Error::Quadrature {
            context: "compute_nu",
            estimated_error: r.abs_error,
        });
    }
    let value = model.beta().angular_integral() * 4.0 / PI.sqrt() * r.value;
    if !(value > 0.0) {
        return Err(Error::domain(
            "compute_nu",
            format!("non-positive frequency {value}"),
        ));
    }
    Ok(value)
}

/// Closed form of [`compute_nu`] for `γ = 1`, `β = scale · cos θ sin θ`:
/// `ν(c) = (π scale/√π) [e^{-c²} + √π (c + 1/(2c)) erf c]`.
pub fn hard_sphere_nu(scale: f64, speed: f64) -> f64 {
    let c = speed.abs();
    let a = PI * scale;
    let tail = if c < 1e-4 {
        // erf(c)/(2c) = (1 - c²/3 + c⁴/10)/√π
        let c2 = c * c;
        PI.sqrt() * c * libm::erf(c) + 1.0 - c2 / 3.0 + c2 * c2 / 10.0
    } else {
        PI.sqrt() * (c + 0.5 / c) * libm::erf(c)
    };
    a / PI.sqrt() * ((-c * c).exp() + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hard_sphere_at_rest() {
        let nu = compute_nu(&CrossSectionModel::hard_sphere(), 0.0).unwrap();
        assert_relative_eq!(nu, 2.0 * PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let hs = CrossSectionModel::hard_sphere();
        for &c in &[0.0, 5e-5, 1e-3, 0.5, 1.0, 2.5, 6.0] {
            assert_relative_eq!(
                compute_nu(&hs, c).unwrap(),
                hard_sphere_nu(1.0, c),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn weight_branches_agree() {
        for &c in &[1e-2, 0.3, 2.0] {
            let v = 0.4999e-3 / c;
            let w = 0.5001e-3 / c;
            assert_relative_eq!(
                radial_weight(v, c),
                radial_weight(w, c),
                max_relative = 1e-3
            );
        }
    }

    #[test]
    fn rejects_negative_speed() {
        assert!(compute_nu(&CrossSectionModel::hard_sphere(), -1.0).is_err());
    }
}
