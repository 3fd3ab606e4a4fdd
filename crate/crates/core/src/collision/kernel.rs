//! Pointwise kernel of `K = K_gain - K_loss` and its azimuthal averages.
//!
//! With `u = η - ζ`, `a = |u|`, `D = |η|² - |ζ|²` the loss part is
//! `π^{-3/2} A_β a^γ e^{-(|ζ|²+|η|²)/2}` and, after Carleman's change of
//! variables, the gain part is
//! `π^{-3/2} e^{-a²/4 - D²/(4a²)} (J₁(a,b)/a² + J₂(a,b)/a)` where `b` is the
//! distance of ζ from the line spanned by `u` and `J₁, J₂` are Gaussian
//! integrals over the plane orthogonal to `u`. For `β = s·cos θ sin θ` and
//! `γ = 1` they are `J₁ = sπa`, `J₂ = sπ`; otherwise they are tabulated.

use std::f64::consts::PI;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

use crate::cross_section::CrossSectionModel;
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gk, GaussLegendre};

/// Beyond this relative speed the gain factor `e^{-a²/4}` is below 1e-21.
const A_MAX: f64 = 14.0;
const TABLE_STEP: f64 = 0.0625;

/// Below this `δ/√(4ζ_rη_r)` the azimuthal average switches to the sinh map.
const SINH_SWITCH: f64 = 1.0;
const SINH_PANEL: f64 = 1.5;
const SINH_POINTS: usize = 12;

/// `e^{-z} I₀(z)` for `z ≥ 0`.
pub fn bessel_i0_scaled(z: f64) -> f64 {
    if z < 15.0 {
        let q = 0.25 * z * z;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= q / (k * k) as f64;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum * (-z).exp()
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            let kf = k as f64;
            let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * z);
            if next > term {
                break;
            }
            term = next;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum / (2.0 * PI * z).sqrt()
    }
}

/// Adaptive integration on `[lo, hi]` split at the `cuts` inside it;
/// returns the value and the summed error estimate.
fn piecewise_gk<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cuts: &[f64]) -> (f64, f64) {
    let mut edges: Vec<f64> = cuts.iter().copied().filter(|&c| c > lo && c < hi).collect();
    edges.sort_by(f64::total_cmp);
    edges.insert(0, lo);
    edges.push(hi);
    let abs_tol = 1e-14 / (edges.len() - 1) as f64;
    edges.windows(2).fold((0.0, 0.0), |(v, e), w| {
        let r = adaptive_gk(&f, w[0], w[1], abs_tol, 1e-11, 200);
        (v + r.value, e + r.abs_error)
    })
}

/// Transverse integrals `J₁/a` and `J₂` on a uniform `(a, b)` grid, read by
/// local bicubic interpolation.
#[derive(Debug, Clone)]
pub struct TransverseTable {
    step: f64,
    na: usize,
    nb: usize,
    j1_over_a: Vec<f64>,
    j2: Vec<f64>,
}

impl TransverseTable {
    pub fn build(model: &CrossSectionModel, b_max: f64) -> Result<Self> {
        let step = TABLE_STEP;
        let na = (A_MAX / step).ceil() as usize + 4;
        let nb = (b_max / step).ceil() as usize + 4;
        let gamma = model.gamma();
        let mut j1_over_a = vec![0.0; na * nb];
        let mut j2 = vec![0.0; na * nb];
        let mut worst = 0.0f64;
        let kinks = model.beta().breakpoints();
        for ia in 0..na {
            let a = (ia as f64 * step).max(1e-7);
            for ib in 0..nb {
                let b = ib as f64 * step;
                let radial = |r: f64| {
                    2.0 * PI * r * (-(r - b) * (r - b)).exp() * bessel_i0_scaled(2.0 * b * r)
                };
                let lo = (b - 7.5).max(0.0);
                let hi = b + 7.5;
                let f1 = |r: f64| {
                    let v2 = a * a + r * r;
                    radial(r) * v2.powf(0.5 * gamma) * model.beta_over_sin(r.atan2(a)) / a
                };
                let f2 = |r: f64| {
                    if r == 0.0 {
                        return 0.0;
                    }
                    let v2 = a * a + r * r;
                    radial(r) / r * v2.powf(0.5 * gamma) * model.beta_over_sin(a.atan2(r))
                };
                // θ = atan(r/a) in J₁ and atan(a/r) in J₂.
                let cuts1: Vec<f64> = kinks.iter().map(|t| a * t.tan()).collect();
                let cuts2: Vec<f64> = kinks.iter().map(|t| a / t.tan()).collect();
                let (v1, e1) = piecewise_gk(f1, lo, hi, &cuts1);
                let (v2, e2) = piecewise_gk(f2, lo, hi, &cuts2);
                worst = worst.max(e1).max(e2);
                j1_over_a[ia * nb + ib] = v1;
                j2[ia * nb + ib] = v2;
            }
        }
        if worst > 1e-8 {
            return Err(Error::Quadrature {
                context: "transverse kernel table",
                estimated_error: worst,
            });
        }
        Ok(TransverseTable {
            step,
            na,
            nb,
            j1_over_a,
            j2,
        })
    }

    /// `(J₁/a, J₂)` at `(a, b)`.
    pub fn eval(&self, a: f64, b: f64) -> (f64, f64) {
        let (ia, wa) = cubic_stencil(a / self.step, self.na);
        let (ib, wb) = cubic_stencil(b / self.step, self.nb);
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for (p, wp) in wa.iter().enumerate() {
            let row = (ia + p) * self.nb + ib;
            for (q, wq) in wb.iter().enumerate() {
                let w = wp * wq;
                s1 += w * self.j1_over_a[row + q];
                s2 += w * self.j2[row + q];
            }
        }
        (s1, s2)
    }
}

/// First index and Lagrange weights of the 4-point stencil around `t`.
fn cubic_stencil(t: f64, n: usize) -> (usize, [f64; 4]) {
    let t = t.clamp(0.0, (n - 1) as f64);
    let i0 = (t.floor() as usize).saturating_sub(1).min(n - 4);
    let s = t - i0 as f64;
    let w = [
        -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0,
        s * (s - 2.0) * (s - 3.0) / 2.0,
        -s * (s - 1.0) * (s - 3.0) / 2.0,
        s * (s - 1.0) * (s - 2.0) / 6.0,
    ];
    (i0, w)
}

#[derive(Debug, Clone)]
enum Gain {
    Closed { scale: f64 },
    Table(TransverseTable),
}

/// Kernel of the linearized gain-minus-loss operator.
#[derive(Debug, Clone)]
pub struct CollisionKernel {
    gamma: f64,
    angular: f64,
    gain: Gain,
    gl: GaussLegendre,
    gl_half: GaussLegendre,
    sinh_width: f64,
}

impl CollisionKernel {
    /// Closed-form gain for the hard-sphere family, tabulated otherwise.
    /// `zeta_max` bounds the velocities the kernel will be evaluated at.
    pub fn new(model: &CrossSectionModel, zeta_max: f64) -> Result<Self> {
        let gain = match model.hard_sphere_scale() {
            Some(scale) => Gain::Closed { scale },
            None => Gain::Table(TransverseTable::build(model, 1.5 * zeta_max + 1.0)?),
        };
        Ok(Self::with_gain(model, gain))
    }

    /// Forces the tabulated transverse integrals even for hard spheres.
    pub fn tabulated(model: &CrossSectionModel, zeta_max: f64) -> Result<Self> {
        let table = TransverseTable::build(model, 1.5 * zeta_max + 1.0)?;
        Ok(Self::with_gain(model, Gain::Table(table)))
    }

    fn with_gain(model: &CrossSectionModel, gain: Gain) -> Self {
        CollisionKernel {
            gamma: model.gamma(),
            angular: model.beta().angular_integral(),
            gain,
            gl: GaussLegendre::new(SINH_POINTS),
            gl_half: GaussLegendre::new(SINH_POINTS / 2),
            sinh_width: SINH_PANEL,
        }
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.gain, Gain::Closed { .. })
    }

    /// Kernel from `a² = |η-ζ|²`, `D = |η|²-|ζ|²`, `S = |ζ|²+|η|²` and `|ζ|²`.
    #[inline]
    fn eval_scalars(&self, a2: f64, d: f64, s: f64, zeta2: f64) -> f64 {
        let a = a2.sqrt();
        let loss_exp = (-0.5 * s).exp();
        match &self.gain {
            Gain::Closed { scale } => {
                let g = (-0.25 * a2 - 0.25 * d * d / a2).exp();
                scale / PI.sqrt() * (2.0 * g / a - a * loss_exp)
            }
            Gain::Table(table) => {
                let c = PI.powf(-1.5);
                let loss = c * self.angular * a.powf(self.gamma) * loss_exp;
                if a > A_MAX {
                    return -loss;
                }
                let g = (-0.25 * a2 - 0.25 * d * d / a2).exp();
                let par = (d - a2) / (2.0 * a);
                let b = (zeta2 - par * par).max(0.0).sqrt();
                let (j1a, j2) = table.eval(a, b);
                c * g * (j1a + j2) / a - loss
            }
        }
    }

    /// `k(ζ, η)` for full 3-D velocities; singular at `ζ = η`.
    pub fn point(&self, zeta: [f64; 3], eta: [f64; 3]) -> f64 {
        let z2: f64 = zeta.iter().map(|v| v * v).sum();
        let e2: f64 = eta.iter().map(|v| v * v).sum();
        let a2: f64 = zeta.iter().zip(&eta).map(|(x, y)| (y - x) * (y - x)).sum();
        self.eval_scalars(a2, e2 - z2, e2 + z2, z2)
    }

    /// Sets the sinh-mapped azimuthal rule: Gauss panels of `width` in the
    /// mapped variable with `points` nodes each.
    pub fn with_sinh_rule(mut self, width: f64, points: usize) -> Self {
        self.sinh_width = width;
        self.gl = GaussLegendre::new(points);
        self.gl_half = GaussLegendre::new((points / 2).max(1));
        self
    }

    /// `(1/π) ∫_0^π k(ζ, η(φ)) cos(mφ) dφ` where `ζ = (z1, zr, 0)` and
    /// `η(φ) = (e1, er cos φ, er sin φ)`.
    pub fn ring_average(
        &self,
        z1: f64,
        zr: f64,
        e1: f64,
        er: f64,
        mode: u32,
        min_points: usize,
    ) -> f64 {
        self.ring_average_with_error(z1, zr, e1, er, mode, min_points)
            .0
    }

    /// Ring average and an error estimate. Both branches converge
    /// geometrically, so a rule with half the points has roughly the square
    /// root of the relative error; the estimate is `10 |I - I_half|² / ∫|k|`,
    /// capped at `|I - I_half|`.
    pub fn ring_average_with_error(
        &self,
        z1: f64,
        zr: f64,
        e1: f64,
        er: f64,
        mode: u32,
        min_points: usize,
    ) -> (f64, f64) {
        let zeta2 = z1 * z1 + zr * zr;
        let eta2 = e1 * e1 + er * er;
        let d = eta2 - zeta2;
        let s = eta2 + zeta2;
        let delta2 = (e1 - z1) * (e1 - z1) + (er - zr) * (er - zr);
        let bb = 4.0 * zr * er;
        if bb == 0.0 || bb <= 1e-300 * delta2 {
            return (
                if mode == 0 {
                    self.eval_scalars(delta2, d, s, zeta2)
                } else {
                    0.0
                },
                0.0,
            );
        }
        let loss_exp = (-0.5 * s).exp();
        let dd = 0.25 * d * d;
        let k_of = |a2: f64| -> f64 {
            match &self.gain {
                Gain::Closed { scale } => {
                    let a = a2.sqrt();
                    scale * FRAC_1_SQRT_PI * (2.0 * (-0.25 * a2 - dd / a2).exp() / a - a * loss_exp)
                }
                Gain::Table(_) => self.eval_scalars(a2, d, s, zeta2),
            }
        };
        let m = mode as f64;
        let t = (delta2 / bb).sqrt();
        let (fine, coarse, scale) = if t >= SINH_SWITCH {
            let n = ((14.0 / t.asinh()).ceil() as usize)
                .max(min_points)
                .max(4 * (mode as usize + 1));
            let n = n + n % 2;
            let h = PI / n as f64;
            // cos(kh) by rotation.
            let (ch, sh) = (h.cos(), h.sin());
            let (mut c, mut sn) = (1.0f64, 0.0f64);
            let mut sum = 0.0;
            let mut even = 0.0;
            let mut abs = 0.0;
            for k in 0..=n {
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                let half_sin2 = 0.5 * (1.0 - c);
                let v = k_of(delta2 + bb * half_sin2);
                let v = w * if mode == 0 {
                    v
                } else {
                    (m * k as f64 * h).cos() * v
                };
                sum += v;
                abs += v.abs();
                if k % 2 == 0 {
                    even += v;
                }
                let nc = c * ch - sn * sh;
                sn = sn * ch + c * sh;
                c = nc;
            }
            (sum * h / PI, 2.0 * even * h / PI, abs * h / PI)
        } else {
            // φ = c sinh τ flattens the near-singular peak at φ = 0.
            let c = 2.0 * t;
            let tau_max = (PI / c).asinh();
            let panels = (tau_max / self.sinh_width).ceil().max(1.0) as usize;
            let width = tau_max / panels as f64;
            let mut sums = [0.0; 2];
            let mut abs = 0.0;
            for p in 0..panels {
                let lo = p as f64 * width;
                for (rule, acc) in [&self.gl, &self.gl_half].into_iter().zip(sums.iter_mut()) {
                    for (tau, w) in rule.on_interval(lo, lo + width) {
                        let et = tau.exp();
                        let sinh = 0.5 * (et - 1.0 / et);
                        let cosh = 0.5 * (et + 1.0 / et);
                        let phi = c * sinh;
                        let sh = (0.5 * phi).sin();
                        let v = w * c * cosh * k_of(delta2 + bb * sh * sh);
                        let v = if mode == 0 { v } else { (m * phi).cos() * v };
                        *acc += v;
                        if rule.len() == self.gl.len() {
                            abs += v.abs();
                        }
                    }
                }
            }
            (sums[0] / PI, sums[1] / PI, abs / PI)
        };
        let diff = (fine - coarse).abs();
        (
            fine,
            (10.0 * diff * diff / scale.max(f64::MIN_POSITIVE)).min(diff),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_section::AngularFactor;
    use approx::assert_relative_eq;

    #[test]
    fn i0_branches_meet() {
        let below = bessel_i0_scaled(15.0 - 1e-12);
        let above = bessel_i0_scaled(15.0);
        assert_relative_eq!(below, above, max_relative = 1e-12);
        // I0(1) = 1.2660658777520082
        assert_relative_eq!(
            bessel_i0_scaled(1.0),
            1.266_065_877_752_008_2 * (-1.0f64).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn kernel_is_symmetric() {
        let k = CollisionKernel::new(&CrossSectionModel::hard_sphere(), 6.0).unwrap();
        let z = [0.3, -1.2, 0.7];
        let e = [-0.4, 0.5, 1.1];
        assert_relative_eq!(k.point(z, e), k.point(e, z), max_relative = 1e-14);
    }

    #[test]
    fn ring_average_matches_adaptive_reference() {
        let k = CollisionKernel::new(&CrossSectionModel::hard_sphere(), 6.0).unwrap();
        let cases = [
            (0.3, 1.0, 0.35, 1.02),
            (1e-6, 0.5, 3e-6, 0.5000001),
            (2.0, 0.1, -1.0, 2.0),
            (0.5, 2.0, 0.5001, 1.9),
            (-3.0, 4.0, -2.9, 4.2),
        ];
        for &(z1, zr, e1, er) in &cases {
            for mode in 0..2u32 {
                let reference = adaptive_gk(
                    |phi: f64| {
                        let eta = [e1, er * phi.cos(), er * phi.sin()];
                        k.point([z1, zr, 0.0], eta) * (mode as f64 * phi).cos()
                    },
                    0.0,
                    PI,
                    1e-15,
                    1e-13,
                    2000,
                );
                let got = k.ring_average(z1, zr, e1, er, mode, 16);
                let exact = reference.value / PI;
                assert!(
                    (got - exact).abs() <= 1e-10 * exact.abs().max(1.0),
                    "({z1},{zr};{e1},{er}) m={mode}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn ring_error_estimate_bounds_actual_error() {
        let k = CollisionKernel::new(&CrossSectionModel::hard_sphere(), 6.0).unwrap();
        for &(z1, zr, e1, er) in &[
            (0.3, 1.0, 0.35, 1.02),
            (0.5, 2.0, 0.5001, 1.9),
            (1.0, 0.5, -0.5, 1.5),
        ] {
            let reference = adaptive_gk(
                |phi: f64| k.point([z1, zr, 0.0], [e1, er * phi.cos(), er * phi.sin()]),
                0.0,
                PI,
                1e-15,
                1e-14,
                4000,
            )
            .value
                / PI;
            // A deliberately coarse rule so the actual error is measurable.
            let coarse = k.clone().with_sinh_rule(3.0, 4);
            let (v, est) = coarse.ring_average_with_error(z1, zr, e1, er, 0, 4);
            let actual = (v - reference).abs();
            assert!(
                actual <= 10.0 * est + 1e-13,
                "actual {actual:e} est {est:e}"
            );
            let (_, fine_est) = k.ring_average_with_error(z1, zr, e1, er, 0, 16);
            assert!(
                fine_est <= 1e-9 * reference.abs().max(1.0),
                "estimate {fine_est:e}"
            );
        }
    }

    #[test]
    fn tabulated_path_reproduces_closed_form() {
        let model = CrossSectionModel::hard_sphere();
        let closed = CollisionKernel::new(&model, 6.0).unwrap();
        let table = CollisionKernel::tabulated(&model, 6.0).unwrap();
        let pairs = [
            ([0.2, 0.1, -0.3], [1.0, 0.4, 0.2]),
            ([2.0, -1.0, 0.5], [0.1, 0.3, -2.2]),
            ([0.0, 3.0, 0.0], [0.0, 2.5, 0.4]),
        ];
        for (z, e) in pairs {
            assert_relative_eq!(closed.point(z, e), table.point(z, e), max_relative = 1e-6);
        }
    }

    #[test]
    fn generic_beta_builds() {
        let beta = AngularFactor::Custom(std::sync::Arc::new(|t: f64| {
            0.8 * t.cos().powi(2) * t.sin()
        }));
        let model = CrossSectionModel::new("cos2sin", 0.5, beta, 1.0).unwrap();
        let k = CollisionKernel::new(&model, 4.0).unwrap();
        assert!(!k.is_closed_form());
        assert!(k.point([0.1, 0.2, 0.3], [0.5, -0.2, 0.1]).is_finite());
    }
}
