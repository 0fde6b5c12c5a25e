//! The Hartman–Watson function
//!
//! Θ(r, t) = r / √(2π³t) · e^{π²/(2t)} ∫₀^∞ e^{-z²/(2t)} e^{-r cosh z} sinh z sin(πz/t) dz,
//!
//! characterised by ∫₀^∞ e^{-ν²t/2} Θ(r, t) dt = I_ν(r).
//!
//! The integral is summed over the half-periods [kt, (k+1)t] of sin(πz/t),
//! each split into Gauss–Legendre sub-panels no wider than 0.25 (or 1/√r
//! when r is large, where e^{-r cosh z} narrows). The factor e^{π²/(2t)}
//! means the alternating panel sums cancel to a result many orders of
//! magnitude below the panel sizes; the rounding error of the `f64` sum is
//! estimated from Σ|panel| and, when it exceeds the tolerance, the integral
//! is recomputed in double-double arithmetic. Below `t_min_theta` no
//! evaluation is attempted.

use super::dd::{self, Dd};
use super::QuadConfig;
use crate::quad::{gl16, gl24_dd};
use crate::{Error, Result};
use std::f64::consts::PI;

/// A Θ evaluation in scaled form, `Θ(r, t) e^{-r}`, with the estimated
/// rounding error of the cancelling sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEval {
    pub scaled: f64,
    pub err: f64,
    /// True when the double-double path was needed.
    pub extended: bool,
}

/// Θ(r, t). Tolerances in `cfg` apply to Θ itself.
pub fn hartman_watson_theta(r: f64, t: f64, cfg: &QuadConfig) -> Result<f64> {
    if r > 700.0 {
        return Err(Error::domain(
            "hartman_watson_theta",
            format!("r = {r} overflows; use the scaled form"),
        ));
    }
    let scale = (-r).exp();
    let ev = theta_core(r, t, cfg, cfg.abs_tol * scale)?;
    Ok(ev.scaled / scale)
}

/// Θ(r, t) e^{-r}. Tolerances in `cfg` apply to the scaled value.
pub fn hartman_watson_theta_scaled(r: f64, t: f64, cfg: &QuadConfig) -> Result<ThetaEval> {
    theta_core(r, t, cfg, cfg.abs_tol)
}

fn theta_core(r: f64, t: f64, cfg: &QuadConfig, abs_tol: f64) -> Result<ThetaEval> {
    if r.is_nan() || r < 0.0 || !r.is_finite() {
        return Err(Error::domain(
            "hartman_watson_theta",
            format!("r must be >= 0, got {r}"),
        ));
    }
    if t.is_nan() || t < cfg.t_min_theta {
        return Err(Error::domain(
            "hartman_watson_theta",
            format!(
                "t = {t} below t_min_theta = {} (cancellation regime)",
                cfg.t_min_theta
            ),
        ));
    }
    if r == 0.0 {
        return Ok(ThetaEval {
            scaled: 0.0,
            err: 0.0,
            extended: false,
        });
    }
    // e^{-r cosh z} = e^{-r} e^{-2r sinh²(z/2)}; one more e^{-r} gives the scaled form.
    let pref = (r.ln() - 0.5 * (2.0 * PI.powi(3) * t).ln() + PI * PI / (2.0 * t) - 2.0 * r).exp();
    let plan = PanelPlan::new(r, t, cfg, abs_tol / pref)?;

    let (sum, sum_abs) = plan.integrate_f64(r, t);
    let mut value = pref * sum;
    let mut err = pref * sum_abs * 8.0 * f64::EPSILON;
    let mut extended = false;
    let accept = |v: f64, e: f64| e <= abs_tol + cfg.rel_tol * v.abs();
    if !accept(value, err) {
        let (sum, sum_abs) = plan.integrate_dd(r, t);
        value = pref * sum;
        err = pref * sum_abs * 1e-30;
        extended = true;
        if !accept(value, err) {
            return Err(Error::domain(
                "hartman_watson_theta",
                format!("cancellation too severe at r = {r}, t = {t} (error {err:.2e})"),
            ));
        }
    }
    if value < 0.0 {
        if -value <= abs_tol + err {
            value = 0.0;
        } else {
            return Err(Error::convergence(
                "hartman_watson_theta",
                format!("negative result {value:.3e} at r = {r}, t = {t}"),
            ));
        }
    }
    Ok(ThetaEval {
        scaled: value,
        err,
        extended,
    })
}

/// Sub-panel endpoints, fixed before any summation so that the `f64` and
/// double-double passes integrate over the same partition.
struct PanelPlan {
    edges: Vec<f64>,
}

/// log of the integrand envelope e^{-z²/(2t) - r(cosh z - 1)} sinh z and its slope.
fn log_envelope(r: f64, t: f64, z: f64) -> (f64, f64) {
    let sh2 = (0.5 * z).sinh();
    let l = -z * z / (2.0 * t) - 2.0 * r * sh2 * sh2 + z.sinh().ln();
    let dl = -z / t - r * z.sinh() + 1.0 / z.tanh();
    (l, dl)
}

impl PanelPlan {
    fn new(r: f64, t: f64, cfg: &QuadConfig, tail_tol: f64) -> Result<Self> {
        let width = 0.25f64.min(1.0 / r.sqrt());
        let per_half = (t / width).ceil().max(1.0) as usize;
        let sub = t / per_half as f64;
        let cut = tail_tol / cfg.z_cut_factor;
        let mut edges = vec![0.0];
        for k in 0..cfg.max_panels {
            for j in 1..=per_half {
                let z = if j == per_half {
                    (k + 1) as f64 * t
                } else {
                    k as f64 * t + j as f64 * sub
                };
                edges.push(z);
                let (l, dl) = log_envelope(r, t, z);
                // Past the peak the tail is bounded by envelope / |slope|.
                if dl < 0.0 && l - (-dl).ln() < cut.ln() {
                    return Ok(PanelPlan { edges });
                }
            }
        }
        Err(Error::convergence(
            "hartman_watson_theta",
            format!(
                "{} half-period panels exceeded (r = {r}, t = {t})",
                cfg.max_panels
            ),
        ))
    }

    fn integrate_f64(&self, r: f64, t: f64) -> (f64, f64) {
        let rule = gl16();
        let freq = PI / t;
        let inv2t = 0.5 / t;
        let mut sum = 0.0;
        let mut sum_abs = 0.0;
        for w in self.edges.windows(2) {
            let half = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[1] + w[0]);
            let (mut s, mut sa) = (0.0, 0.0);
            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                let z = mid + half * x;
                let sh2 = (0.5 * z).sinh();
                let g = (-z * z * inv2t - 2.0 * r * sh2 * sh2).exp() * z.sinh() * (freq * z).sin();
                s += wt * g;
                sa += wt * g.abs();
            }
            sum += half * s;
            sum_abs += half * sa;
        }
        (sum, sum_abs)
    }

    fn integrate_dd(&self, r: f64, t: f64) -> (f64, f64) {
        let rule = gl24_dd();
        let t_dd = Dd::from_f64(t);
        let two_t = Dd::from_f64(2.0 * t);
        let mut sum = Dd::ZERO;
        let mut sum_abs = 0.0;
        for w in self.edges.windows(2) {
            let (a, b) = (Dd::from_f64(w[0]), Dd::from_f64(w[1]));
            let half = (b - a).mul_f64(0.5);
            let mid = (b + a).mul_f64(0.5);
            let mut s = Dd::ZERO;
            let mut sa = 0.0;
            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                let z = mid + half * *x;
                let (sh, ch) = z.mul_f64(0.5).sinh_cosh();
                let sinh_z = (sh * ch).mul_f64(2.0);
                let expo = -((z * z) / two_t) - (sh * sh).mul_f64(2.0 * r);
                let g = expo.exp() * sinh_z * ((dd::PI * z) / t_dd).sin();
                s = s + *wt * g;
                sa += wt.hi * g.hi.abs();
            }
            sum = sum + half * s;
            sum_abs += half.hi * sa;
        }
        (sum.to_f64(), sum_abs)
    }
}
