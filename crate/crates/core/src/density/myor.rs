//! Joint law of (a_t, B_t + μt) and the conditional Laplace transform of A_t
//! given both, expressed through Θ at time t/4; and the general-μ density
//! built on them.

use crate::parallel::mc_moments;
use crate::simulate::{sample_bridge_integrals, simulate_terminal, ModelParams, TimeGrid};
use crate::specfun::{hartman_watson_theta_scaled, QuadConfig};
use crate::stats::McEstimate;
use crate::{Error, Result};

use super::lognormal_density;

/// Below this joint density the conditional kernel is refused.
pub const PSI_FLOOR: f64 = 1e-12;

/// Arguments of the conditional kernel: drift μ, horizon t, a_t = v,
/// B_t + μt = x and the transform variable λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MyorEval {
    pub mu: f64,
    pub t: f64,
    pub v: f64,
    pub x: f64,
    pub lambda: f64,
}

impl MyorEval {
    pub fn new(mu: f64, t: f64, v: f64, x: f64, lambda: f64) -> Result<Self> {
        if !(t > 0.0 && v > 0.0 && lambda > 0.0) || !mu.is_finite() || !x.is_finite() {
            return Err(Error::invalid(format!(
                "need t, v, lambda > 0 and finite mu, x; got mu={mu}, t={t}, v={v}, x={x}, lambda={lambda}"
            )));
        }
        Ok(MyorEval {
            mu,
            t,
            v,
            x,
            lambda,
        })
    }
}

fn check_quarter(routine: &'static str, t: f64, cfg: &QuadConfig) -> Result<()> {
    if 0.25 * t < cfg.t_min_theta {
        return Err(Error::domain(
            routine,
            format!("t/4 = {} below t_min_theta = {}", 0.25 * t, cfg.t_min_theta),
        ));
    }
    Ok(())
}

fn ln_sinh(c: f64) -> f64 {
    c + (-(-2.0 * c).exp_m1()).ln() - std::f64::consts::LN_2
}

/// ln ψ_t^{(μ)}(v, x); −∞ where Θ vanishes numerically.
fn ln_psi(mu: f64, t: f64, v: f64, x: f64, cfg: &QuadConfig) -> Result<f64> {
    let h = (0.5 * x).exp();
    let th = hartman_watson_theta_scaled(4.0 * h / v, 0.25 * t, cfg)?;
    let d = 1.0 - h;
    Ok(-(2.0 * v).ln() + mu * x - 0.5 * mu * mu * t - 2.0 * d * d / v + th.scaled.ln())
}

/// Joint density of (a_t^{(μ)}, B_t + μt) at (v, x):
/// (2v)⁻¹ e^{μx − μ²t/2} e^{−2(1+eˣ)/v} Θ(4e^{x/2}/v, t/4).
pub fn myor_psi(mu: f64, t: f64, v: f64, x: f64, cfg: &QuadConfig) -> Result<f64> {
    MyorEval::new(mu, t, v, x, 1.0)?;
    check_quarter("myor_psi", t, cfg)?;
    Ok(ln_psi(mu, t, v, x, cfg)?.exp())
}

/// ln of e^{μx−μ²t/2} λ/(4 sinh(λv/2)) e^{−λ(1+eˣ)coth(λv/2)} Θ(φ, t/4),
/// φ = 2λ e^{x/2} / sinh(λv/2).
fn ln_joint_laplace(e: &MyorEval, cfg: &QuadConfig) -> Result<f64> {
    let c = 0.5 * e.lambda * e.v;
    let ls = ln_sinh(c);
    let phi = (e.lambda.ln() + std::f64::consts::LN_2 + 0.5 * e.x - ls).exp();
    let th = hartman_watson_theta_scaled(phi, 0.25 * e.t, cfg)?;
    Ok(e.mu * e.x - 0.5 * e.mu * e.mu * e.t + (e.lambda / 4.0).ln()
        - ls
        - e.lambda * (1.0 + e.x.exp()) / c.tanh()
        + phi
        + th.scaled.ln())
}

fn conditional_ratio(e: &MyorEval, cfg: &QuadConfig) -> Result<(f64, f64)> {
    let lp = ln_psi(e.mu, e.t, e.v, e.x, cfg)?;
    if lp == f64::NEG_INFINITY {
        return Err(Error::OutOfSupport(format!(
            "joint density vanishes at v={}, x={}",
            e.v, e.x
        )));
    }
    Ok(((ln_joint_laplace(e, cfg)? - lp).exp(), lp))
}

/// E[exp(−λ² A_t / 2) | a_t = v, B_t + μt = x]. Refused with
/// [`Error::OutOfSupport`] where the joint density is below [`PSI_FLOOR`].
pub fn myor_conditional_laplace(e: &MyorEval, cfg: &QuadConfig) -> Result<f64> {
    check_quarter("myor_conditional_laplace", e.t, cfg)?;
    let (ratio, lp) = conditional_ratio(e, cfg)?;
    if lp.exp() < PSI_FLOOR {
        return Err(Error::OutOfSupport(format!(
            "joint density {:.3e} below {PSI_FLOOR:e} at v={}, x={}",
            lp.exp(),
            e.v,
            e.x
        )));
    }
    Ok(ratio)
}

/// H_t(y, x) = e^{γ(μ+½)y} E[e^{−γ² A_t / 2} | a_t = y, B_t + μt = ln x].
pub fn h_kernel(gamma: f64, mu: f64, t: f64, y: f64, x: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::invalid(format!("x must be > 0, got {x}")));
    }
    let e = MyorEval::new(mu, t, y, x.ln(), gamma)?;
    Ok((gamma * (mu + 0.5) * y).exp() * myor_conditional_laplace(&e, cfg)?)
}

/// Law of a_t under which the kernel H is averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelVariant {
    /// a_t drawn from free paths of B + μs.
    Unconditional,
    /// a_t drawn from Brownian bridges pinned at B_t + μt = ln x.
    EndpointConditional,
}

impl KernelVariant {
    pub fn name(self) -> &'static str {
        match self {
            KernelVariant::Unconditional => "unconditional",
            KernelVariant::EndpointConditional => "endpoint-conditional",
        }
    }
}

/// g_t(γ, x) = g_t(0, x) e^{−γ(x−1)} E[H_t(a_t, x)] for the start-1 process
/// with drift μ and crowding γ, by Monte Carlo over a_t on a grid of `steps`.
#[allow(clippy::too_many_arguments)]
pub fn density_general_mc(
    gamma: f64,
    mu: f64,
    t: f64,
    x: f64,
    n: u64,
    seed: u64,
    steps: usize,
    cfg: &QuadConfig,
    variant: KernelVariant,
) -> Result<McEstimate> {
    if !(gamma > 0.0) {
        return Err(Error::invalid(format!("gamma must be > 0, got {gamma}")));
    }
    check_quarter("density_general_mc", t, cfg)?;
    let grid = TimeGrid::new(t, steps)?;
    let base = lognormal_density(mu, t, x)? * (-gamma * (x - 1.0)).exp();
    let end = x.ln();
    let gbm = ModelParams::new(mu, 0.0, 1.0)?;
    let tilt = gamma * (mu + 0.5);
    let m = mc_moments(n, 1, seed, |rng, _, out| {
        let a = match variant {
            KernelVariant::Unconditional => simulate_terminal(&gbm, &grid, rng).a,
            KernelVariant::EndpointConditional => sample_bridge_integrals(end, &grid, rng).0,
        };
        let e = MyorEval::new(mu, t, a, end, gamma)?;
        out[0] = (tilt * a).exp() * conditional_ratio(&e, cfg)?.0;
        Ok(())
    })?;
    Ok(McEstimate::from_moments(&m, 0).scale(base))
}

/// Both variants at one point, with a disagreement flag at 5 combined
/// standard errors.
#[derive(Debug)]
pub struct VariantComparison {
    pub unconditional: Result<McEstimate>,
    pub endpoint_conditional: Result<McEstimate>,
    pub disagree: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn density_general_variants(
    gamma: f64,
    mu: f64,
    t: f64,
    x: f64,
    n: u64,
    seed: u64,
    steps: usize,
    cfg: &QuadConfig,
) -> VariantComparison {
    let run = |v| density_general_mc(gamma, mu, t, x, n, seed, steps, cfg, v);
    let u = run(KernelVariant::Unconditional);
    let c = run(KernelVariant::EndpointConditional);
    let disagree = match (&u, &c) {
        (Ok(a), Ok(b)) => a.z_against(b) > 5.0,
        _ => true,
    };
    VariantComparison {
        unconditional: u,
        endpoint_conditional: c,
        disagree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_log_axis;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn psi_x_marginal_is_gaussian() {
        let c = cfg();
        for x in [-1.0f64, 0.0, 1.0] {
            let m =
                integrate_log_axis(0.0, 0.5, 400, 1e-13, |v| myor_psi(0.0, 1.0, v, x, &c)).unwrap();
            let g = (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
            assert!((m - g).abs() < 5e-3 * g, "x={x}: {m} vs {g}");
        }
    }

    #[test]
    fn psi_requires_quarter_horizon() {
        assert!(matches!(
            myor_psi(0.0, 0.5, 1.0, 0.0, &cfg()),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn conditional_laplace_limits_and_monotonicity() {
        let c = cfg();
        let at = |lam| {
            myor_conditional_laplace(&MyorEval::new(0.0, 1.0, 1.0, 0.0, lam).unwrap(), &c).unwrap()
        };
        assert!((at(1e-4) - 1.0).abs() < 1e-2);
        let mut prev = 1.0 + 1e-6;
        for lam in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let v = at(lam);
            assert!(v < prev && v > 0.0 && v <= 1.0 + 1e-6, "lam={lam}: {v}");
            prev = v;
        }
    }

    #[test]
    fn out_of_support_is_refused() {
        let e = MyorEval::new(0.0, 1.0, 0.01, 3.0, 1.0).unwrap();
        assert!(matches!(
            myor_conditional_laplace(&e, &cfg()),
            Err(Error::OutOfSupport(_))
        ));
    }

    #[test]
    fn h_kernel_composition() {
        let c = cfg();
        let bare =
            myor_conditional_laplace(&MyorEval::new(0.0, 1.0, 1.0, 0.0, 1.0).unwrap(), &c).unwrap();
        let h = h_kernel(1.0, 0.0, 1.0, 1.0, 1.0, &c).unwrap();
        assert!((h - bare * 0.5f64.exp()).abs() < 1e-12);
        let h0 = h_kernel(1.0, -0.5, 1.0, 1.0, 1.0, &c).unwrap();
        let b0 = myor_conditional_laplace(&MyorEval::new(-0.5, 1.0, 1.0, 0.0, 1.0).unwrap(), &c)
            .unwrap();
        assert_eq!(h0, b0);
        // increasing in y for μ > −½ at small γ
        let hs: Vec<f64> = [0.6, 0.9, 1.2, 1.5]
            .iter()
            .map(|&y| h_kernel(0.05, 0.5, 1.0, y, 1.0, &c).unwrap())
            .collect();
        assert!(hs.windows(2).all(|w| w[1] > w[0]), "{hs:?}");
    }

    #[test]
    fn general_density_small_gamma_is_lognormal() {
        let c = QuadConfig::monte_carlo();
        let est = density_general_mc(
            1e-6,
            0.0,
            1.0,
            1.2,
            200,
            1,
            100,
            &c,
            KernelVariant::EndpointConditional,
        )
        .unwrap();
        let g = lognormal_density(0.0, 1.0, 1.2).unwrap();
        assert!((est.mean - g).abs() < 1e-5 * g);
    }
}
