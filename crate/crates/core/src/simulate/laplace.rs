use rand::Rng;
use rand_distr::StandardNormal;

use super::{sample_besq0, simulate_terminal, ModelParams, TimeGrid};
use crate::parallel::mc_moments;
use crate::specfun::laplace_kernel_f;
use crate::stats::McEstimate;
use crate::{Error, Result};

/// Horizon h used by the squared-Bessel representation of E e^{-λθ_t}:
/// the Gaussian endpoint is B_h^{(2μ)} ~ N(2μh, h) and the arcosh kernel is
/// evaluated at time h.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prop1Horizon {
    /// h = t.
    Literal,
    /// h = t/4, from θ_t = θ'_{4t} under B_{4t}/2.
    Rescaled,
}

impl Prop1Horizon {
    pub fn horizon(self, t: f64) -> f64 {
        match self {
            Prop1Horizon::Literal => t,
            Prop1Horizon::Rescaled => 0.25 * t,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Prop1Horizon::Literal => "literal",
            Prop1Horizon::Rescaled => "rescaled",
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("lambda must be >= 0, got {lambda}")))
    }
}

fn check_n(n: u64) -> Result<()> {
    if n >= 2 {
        Ok(())
    } else {
        Err(Error::invalid("at least 2 replicates are needed"))
    }
}

/// E e^{-λθ_t} = E F(W, R/(4β), h) with W ~ N(2μh, h) and R a dimension-0
/// squared Bessel variable at time ½ started from λ x₀ e^{2W}.
pub fn laplace_prop1_mc(
    lambda: f64,
    params: &ModelParams,
    t: f64,
    n: u64,
    seed: u64,
    horizon: Prop1Horizon,
) -> Result<McEstimate> {
    check_lambda(lambda)?;
    check_n(n)?;
    if params.beta() == 0.0 {
        return Err(Error::invalid(
            "the squared-Bessel representation needs beta > 0",
        ));
    }
    if !(t > 0.0) {
        return Err(Error::invalid(format!("t must be > 0, got {t}")));
    }
    let h = horizon.horizon(t);
    let lam = lambda * params.x0();
    let (mean, sd) = (2.0 * params.mu() * h, h.sqrt());
    let four_beta = 4.0 * params.beta();
    let m = mc_moments(n, 1, seed, |rng, _, out| {
        let w = mean + sd * rng.sample::<f64, _>(StandardNormal);
        let r = sample_besq0(lam * (2.0 * w).exp(), 0.5, rng)?;
        out[0] = laplace_kernel_f(w, r / four_beta, h)?;
        Ok(())
    })?;
    Ok(McEstimate::from_moments(&m, 0))
}

/// E e^{-λθ_t} = e^β E exp(−(β + λx₀) e^{B_t+μt} + β(μ+½) a_t − β² A_t / 2).
pub fn laplace_prop7_mc(
    lambda: f64,
    params: &ModelParams,
    grid: &TimeGrid,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_lambda(lambda)?;
    check_n(n)?;
    let beta = params.beta();
    let lam = lambda * params.x0();
    let drift = params.mu() + 0.5;
    // The path integrals are those of the driving GBM, so any crowding works.
    let gbm = ModelParams::new(params.mu(), 0.0, 1.0)?;
    let m = mc_moments(n, 1, seed, |rng, _, out| {
        let p = simulate_terminal(&gbm, grid, rng);
        let x = p.bmd.exp();
        out[0] = (beta - (beta + lam) * x + beta * drift * p.a - 0.5 * beta * beta * p.big_a).exp();
        Ok(())
    })?;
    Ok(McEstimate::from_moments(&m, 0))
}

/// Brute-force average of e^{-λθ_T} over exact-functional paths.
pub fn direct_laplace_mc(
    lambda: f64,
    params: &ModelParams,
    grid: &TimeGrid,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_lambda(lambda)?;
    check_n(n)?;
    let m = mc_moments(n, 1, seed, |rng, _, out| {
        out[0] = (-lambda * simulate_terminal(params, grid, rng).theta).exp();
        Ok(())
    })?;
    Ok(McEstimate::from_moments(&m, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_lambda_is_exactly_one() {
        let p = ModelParams::new(0.0, 1.0, 1.0).unwrap();
        let g = TimeGrid::new(1.0, 50).unwrap();
        let d = direct_laplace_mc(0.0, &p, &g, 100, 1).unwrap();
        assert_eq!((d.mean, d.stderr), (1.0, 0.0));
        let q = ModelParams::new(0.0, 0.0, 1.0).unwrap();
        let e = laplace_prop7_mc(0.0, &q, &g, 100, 1).unwrap();
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));
        let f = laplace_prop1_mc(0.0, &p, 1.0, 100, 1, Prop1Horizon::Rescaled).unwrap();
        assert_eq!(f.mean, 1.0);
    }

    #[test]
    fn prop1_requires_crowding() {
        let p = ModelParams::new(0.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            laplace_prop1_mc(1.0, &p, 1.0, 100, 1, Prop1Horizon::Literal),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn prop1_decreases_in_lambda() {
        let p = ModelParams::new(0.0, 1.0, 1.0).unwrap();
        let v: Vec<f64> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&l| {
                laplace_prop1_mc(l, &p, 1.0, 20_000, 3, Prop1Horizon::Rescaled)
                    .unwrap()
                    .mean
            })
            .collect();
        assert!(v[0] > v[1] && v[1] > v[2]);
    }

    #[test]
    fn direct_matches_lognormal_quadrature_without_crowding() {
        // β = 0: E e^{-λ e^{B_1}} by a fine midpoint rule over the Gaussian.
        let p = ModelParams::new(0.0, 0.0, 1.0).unwrap();
        let g = TimeGrid::new(1.0, 1).unwrap();
        let d = direct_laplace_mc(1.0, &p, &g, 50_000, 8).unwrap();
        let exact = (0..4000)
            .map(|i| {
                let z = -10.0 + (i as f64 + 0.5) * 0.005;
                0.005 * (-z * z / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
                    * (-(z.exp())).exp()
            })
            .sum::<f64>();
        assert!(d.z_against_value(exact) < 3.5, "{d} vs {exact}");
    }

    #[test]
    fn stderr_scales_with_sample_size() {
        let p = ModelParams::new(0.0, 1.0, 1.0).unwrap();
        let g = TimeGrid::new(1.0, 20).unwrap();
        let a = direct_laplace_mc(1.0, &p, &g, 20_000, 4).unwrap();
        let b = direct_laplace_mc(1.0, &p, &g, 80_000, 4).unwrap();
        let ratio = a.stderr / b.stderr;
        assert!((ratio - 2.0).abs() < 0.4, "{ratio}");
    }
}
