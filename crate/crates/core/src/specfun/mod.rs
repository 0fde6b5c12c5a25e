//! Special functions: modified Bessel functions of real order, the
//! Hartman–Watson function Θ(r, t) and the arcosh-based Laplace kernel.

mod bessel;
pub(crate) mod dd;
mod hartman_watson;
mod laplace;

pub use bessel::{
    bessel_i, bessel_i_scaled, bessel_k, bessel_k_scaled, bessel_product_f,
    bessel_product_f_scaled, ln_gamma, I_OVERFLOW_GUARD,
};
pub use hartman_watson::{hartman_watson_theta, hartman_watson_theta_scaled, ThetaEval};
pub use laplace::{laplace_kernel_f, phi_arcosh};

use crate::{Error, Result};

/// Tolerances and panel policy shared by every quadrature in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Cap on the number of half-period panels of the Θ integral (and on
    /// outer panels of the log-axis integrals).
    pub max_panels: usize,
    /// Safety multiplier applied to the truncation threshold: the Θ tail is
    /// cut once its envelope bound is below `abs_tol / z_cut_factor`.
    pub z_cut_factor: f64,
    /// Smallest t at which Θ(r, t) is evaluated at all.
    pub t_min_theta: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_panels: 2000,
            z_cut_factor: 10.0,
            t_min_theta: 0.2,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::invalid("abs_tol and rel_tol must be positive"));
        }
        if self.max_panels < 1 {
            return Err(Error::invalid("max_panels must be at least 1"));
        }
        if !(self.t_min_theta > 0.0) {
            return Err(Error::invalid("t_min_theta must be positive"));
        }
        if !(self.z_cut_factor >= 1.0) {
            return Err(Error::invalid("z_cut_factor must be at least 1"));
        }
        Ok(())
    }

    /// Looser configuration for kernels evaluated inside Monte Carlo loops,
    /// where the sampling error dominates any quadrature error below 1e-5.
    pub fn monte_carlo() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-5,
            ..QuadConfig::default()
        }
    }
}

/// Order ν ≥ 0 of a modified Bessel function.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if nu >= 0.0 && nu.is_finite() {
            Ok(BesselOrder(nu))
        } else {
            Err(Error::invalid(format!(
                "Bessel order must be finite and >= 0, got {nu}"
            )))
        }
    }

    /// The order v = √(2λ + 1/4) attached to an exponential time of rate λ.
    pub fn from_rate(lambda: f64) -> Result<Self> {
        if lambda > 0.0 && lambda.is_finite() {
            Ok(BesselOrder((2.0 * lambda + 0.25).sqrt()))
        } else {
            Err(Error::invalid(format!(
                "rate must be positive, got {lambda}"
            )))
        }
    }

    pub fn nu(self) -> f64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_from_rate_exceeds_one_half() {
        for lam in [1e-6, 0.5, 1.0, 2.0, 40.0] {
            let v = BesselOrder::from_rate(lam).unwrap().nu();
            assert!(v > 0.5);
            assert!((v * v - 2.0 * lam - 0.25).abs() < 1e-12);
        }
        assert!(BesselOrder::from_rate(0.0).is_err());
        assert!(BesselOrder::new(-0.1).is_err());
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = QuadConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.max_panels, 2000);
        let bad = QuadConfig {
            t_min_theta: 0.0,
            ..cfg
        };
        assert!(bad.validate().is_err());
    }
}
