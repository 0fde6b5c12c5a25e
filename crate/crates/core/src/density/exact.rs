//! Closed-form densities of the μ = −½ process θ_t(x) = x e^{B−t/2} / (1 + x a_t).

use crate::parallel::mc_moments;
use crate::quad::{integrate_log_axis, integrate_log_axis_from_peak};
use crate::simulate::{sample_bridge_integrals, TimeGrid};
use crate::specfun::{
    bessel_product_f_scaled, hartman_watson_theta_scaled, BesselOrder, QuadConfig,
};
use crate::stats::McEstimate;
use crate::{Error, Result};

use super::lognormal_density;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be > 0, got {v}")))
    }
}

/// Density of θ_t(x) at w:
///
/// e^{−t/8 + x − w} √(x/w³) ∫₀^∞ z⁻¹ e^{−z/2 − (x² + w²)/(2z)} Θ(xw/z, t) dz.
///
/// The z-integral runs over u = ln z from the peak of the integrand outward
/// until panels are negligible; with the scaled Θ the exponent becomes
/// −z/2 − (x − w)²/(2z).
pub fn density_exact_half(x: f64, t: f64, w: f64, cfg: &QuadConfig) -> Result<f64> {
    check_positive("x", x)?;
    check_positive("w", w)?;
    check_positive("t", t)?;
    if t < cfg.t_min_theta {
        return Err(Error::domain(
            "density_exact_half",
            format!("t = {t} below t_min_theta = {}", cfg.t_min_theta),
        ));
    }
    let d2 = (x - w) * (x - w);
    let g = |z: f64| -> Result<f64> {
        let th = hartman_watson_theta_scaled(x * w / z, t, cfg)?;
        Ok((-0.5 * z - d2 / (2.0 * z)).exp() * th.scaled / z)
    };
    let j =
        integrate_log_axis_from_peak(-24..=10, 0.5, 0.5, cfg.max_panels, cfg.abs_tol * 1e-3, g)?;
    let pre = (-t / 8.0 + x - w).exp() * (x / (w * w * w)).sqrt();
    Ok((pre * j).max(0.0))
}

/// Density of θ_{T_λ}(x) at z for an independent exponential time of rate λ:
/// 2λ e^{x−z} √(x/z³) I_v(x∧z) K_v(x∨z), v = √(2λ + ¼).
pub fn density_exp_time(x: f64, lambda: f64, z: f64) -> Result<f64> {
    check_positive("x", x)?;
    check_positive("z", z)?;
    let v = BesselOrder::from_rate(lambda)?;
    let (lo, hi) = if x <= z { (x, z) } else { (z, x) };
    let f = bessel_product_f_scaled(v, x, z)?;
    Ok(2.0 * lambda * (x / (z * z * z)).sqrt() * f * (x - z + lo - hi).exp())
}

/// ∫₀^∞ [`density_exp_time`] dz, split at the kink z = x.
pub fn exp_time_mass(x: f64, lambda: f64, cfg: &QuadConfig) -> Result<f64> {
    check_positive("x", x)?;
    integrate_log_axis(x.ln(), 0.25, cfg.max_panels, 1e-16, |z| {
        density_exp_time(x, lambda, z)
    })
}

/// ∫₀^∞ [`density_exact_half`] dw by log-axis Gauss–Legendre.
pub fn exact_half_mass(x: f64, t: f64, cfg: &QuadConfig) -> Result<f64> {
    check_positive("x", x)?;
    integrate_log_axis(x.ln() - 0.5 * t, 1.0, cfg.max_panels, 1e-9, |w| {
        density_exact_half(x, t, w, cfg)
    })
}

/// Monte Carlo density of θ_t(x) at w without Θ, valid for every t > 0:
///
/// p_t(w) = x⁻¹ g(w/x),  g(y) = ℓ_t(y) e^{−x(y−1)} E[e^{−x² A_t / 2} | B_t − t/2 = ln y],
///
/// with ℓ_t the lognormal density of e^{B_t − t/2}; the conditional
/// expectation is averaged over Brownian bridges with `steps` grid steps.
pub fn density_half_bridge(
    x: f64,
    t: f64,
    w: f64,
    n: u64,
    steps: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_positive("x", x)?;
    check_positive("w", w)?;
    let grid = TimeGrid::new(t, steps)?;
    let y = w / x;
    let base = lognormal_density(-0.5, t, y)? * (-x * (y - 1.0)).exp() / x;
    let end = y.ln();
    let half_x2 = 0.5 * x * x;
    let m = mc_moments(n, 1, seed, |rng, _, out| {
        let (_, big_a) = sample_bridge_integrals(end, &grid, rng);
        out[0] = (-half_x2 * big_a).exp();
        Ok(())
    })?;
    Ok(McEstimate::from_moments(&m, 0).scale(base))
}
