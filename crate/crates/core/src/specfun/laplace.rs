//! The arcosh kernel behind the Laplace transform of 1/A_t given the
//! endpoint of the driving Brownian motion.

use crate::{Error, Result};

/// φ_x(y) = arcosh(x e^{-y} + cosh y) for x ≥ 0, evaluated in logarithmic
/// form. Writing the argument as 1 + d with d = x e^{-y} + 2 sinh²(y/2)
/// keeps full relative accuracy when the argument is close to 1.
pub fn phi_arcosh(x: f64, y: f64) -> f64 {
    debug_assert!(x >= 0.0);
    let sh = (0.5 * y).sinh();
    let d = x * (-y).exp() + 2.0 * sh * sh;
    if d.is_infinite() {
        // The argument overflowed; arcosh(u) = ln(2u) to double precision, with
        // ln u = logaddexp(ln x - y, |y| - ln 2).
        let b = y.abs() - std::f64::consts::LN_2;
        let log_u = if x > 0.0 {
            let a = x.ln() - y;
            let m = a.max(b);
            m + ((a - m).exp() + (b - m).exp()).ln()
        } else {
            b
        };
        return log_u + std::f64::consts::LN_2;
    }
    (d + (d * (d + 2.0)).sqrt()).ln_1p()
}

/// F(x, z, t) = exp(-(φ_z(x)² - x²) / (2t)), a value in (0, 1].
pub fn laplace_kernel_f(x: f64, z: f64, t: f64) -> Result<f64> {
    if !(z >= 0.0) || !(t > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "laplace_kernel_f",
            format!("need z >= 0, t > 0 and finite x, got x={x}, z={z}, t={t}"),
        ));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let p = phi_arcosh(z, x);
    // φ² - x² = (φ - |x|)(φ + |x|), both factors nonnegative.
    let diff = ((p - x.abs()).max(0.0)) * (p + x.abs());
    Ok((-diff / (2.0 * t)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_reduces_to_abs_at_zero() {
        for y in [-7.0, -1.0, -1e-9, 0.0, 0.3, 12.0] {
            assert!((phi_arcosh(0.0, y) - f64::abs(y)).abs() < 1e-14 * (1.0 + f64::abs(y)));
        }
    }

    #[test]
    fn phi_known_values() {
        assert!((phi_arcosh(1.0, 0.0) - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-15);
        assert!((phi_arcosh(1.0, 0.0) - 1.316_958).abs() < 1e-6);
        let u: f64 = 3.0 * (-1f64).exp() + 1f64.cosh();
        let direct = (u + (u * u - 1.0).sqrt()).ln();
        assert!((phi_arcosh(3.0, 1.0) - direct).abs() < 1e-14);
        assert!((phi_arcosh(3.0, 1.0) - u.acosh()).abs() < 1e-14);
    }

    #[test]
    fn phi_survives_overflowing_arguments() {
        let p = phi_arcosh(1.0, -800.0);
        assert!((p - 800.0 - 3f64.ln()).abs() < 1e-9);
        let p = phi_arcosh(0.0, 900.0);
        assert!((p - 900.0).abs() < 1e-9);
    }

    #[test]
    fn kernel_values() {
        assert_eq!(laplace_kernel_f(0.4, 0.0, 2.0).unwrap(), 1.0);
        let want = (-(2f64.acosh()).powi(2) / 2.0).exp();
        let got = laplace_kernel_f(0.0, 1.0, 1.0).unwrap();
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.420).abs() < 1e-3);
        assert!(laplace_kernel_f(0.0, -1.0, 1.0).is_err());
        assert!(laplace_kernel_f(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn kernel_nonincreasing_in_z() {
        for x in [-2.0, 0.0, 1.5] {
            let mut prev = 1.0;
            for k in 0..50 {
                let z = 0.2 * k as f64;
                let f = laplace_kernel_f(x, z, 0.7).unwrap();
                assert!(f <= prev && f > 0.0);
                prev = f;
            }
        }
    }
}
