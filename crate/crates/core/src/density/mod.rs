//! Exact and Monte Carlo densities of θ_t.

mod curve;
mod exact;
mod myor;

pub use curve::{log_grid, support_grid, CurveKind, DensityCurve};
pub use exact::{
    density_exact_half, density_exp_time, density_half_bridge, exact_half_mass, exp_time_mass,
};
pub use myor::{
    density_general_mc, density_general_variants, h_kernel, myor_conditional_laplace, myor_psi,
    KernelVariant, MyorEval, VariantComparison,
};

use crate::simulate::ModelParams;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Density of e^{B_t+μt} at x.
pub fn lognormal_density(mu: f64, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) || !(x > 0.0) || !mu.is_finite() {
        return Err(Error::invalid(format!(
            "lognormal density needs t > 0 and x > 0, got t={t}, x={x}"
        )));
    }
    let y = x.ln() - mu * t;
    Ok((-y * y / (2.0 * t)).exp() / (x * (2.0 * PI * t).sqrt()))
}

/// E exp((β/x₀)∫₀^t θ ds) = 1 + β (e^{(μ+½)t} − 1)/(μ+½), and 1 + βt at μ = −½.
/// For x₀ = 1 the exponent is β∫θ.
pub fn moment_exp_int_theta(params: &ModelParams, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("t must be >= 0, got {t}")));
    }
    let k = params.mu() + 0.5;
    let beta = params.beta();
    if k == 0.0 {
        Ok(1.0 + beta * t)
    } else {
        Ok(1.0 + beta * (k * t).exp_m1() / k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_log_axis;

    #[test]
    fn lognormal_values() {
        let v = lognormal_density(0.0, 1.0, 1.0).unwrap();
        assert!((v - 0.398_942_280_401_432_7).abs() < 1e-15);
        let m =
            integrate_log_axis(0.0, 0.5, 200, 1e-14, |x| lognormal_density(0.3, 2.0, x)).unwrap();
        assert!((m - 1.0).abs() < 1e-8);
        // mode at e^{(μ-1)t}
        let (mu, t) = (0.4f64, 1.5f64);
        let mode = ((mu - 1.0) * t).exp();
        let f = |x| lognormal_density(mu, t, x).unwrap();
        assert!(f(mode) > f(mode * 1.001) && f(mode) > f(mode / 1.001));
        assert!(lognormal_density(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn moment_identity_values() {
        let p = ModelParams::new(0.0, 1.0, 1.0).unwrap();
        assert_eq!(moment_exp_int_theta(&p, 0.0).unwrap(), 1.0);
        let v = moment_exp_int_theta(&p, 1.0).unwrap();
        assert!((v - (1.0 + 2.0 * (0.5f64.exp() - 1.0))).abs() < 1e-14);
        assert!((v - 2.297_443).abs() < 1e-6);
        let at = |mu| moment_exp_int_theta(&ModelParams::new(mu, 0.7, 1.0).unwrap(), 1.3).unwrap();
        assert_eq!(at(-0.5), 1.0 + 0.7 * 1.3);
        assert!((at(-0.5 + 1e-6) - at(-0.5)).abs() < 1e-5);
        assert!((at(-0.5 - 1e-6) - at(-0.5)).abs() < 1e-5);
    }
}
