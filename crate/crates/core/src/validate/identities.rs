//! Deterministic identities between the special functions and the exact
//! densities, each checked by quadrature.

use crate::density::{density_exact_half, density_exp_time, density_half_bridge};
use crate::parallel::map_slice;
use crate::quad::{gl16, gl32, integrate_log_axis, integrate_log_axis_from_peak};
use crate::specfun::{
    bessel_i, bessel_i_scaled, bessel_product_f, hartman_watson_theta, BesselOrder, QuadConfig,
};
use crate::{Error, Result};

use super::TestReport;

fn fmt_list(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("/")
}

/// I_ν(x∧w) K_ν(x∨w) = ½ ∫₀^∞ e^{−z/2 − (x²+w²)/(2z)} I_ν(xw/z) dz/z, as the
/// maximum relative error over the grid.
pub fn bessel_product_check(xs: &[f64], nus: &[f64], cfg: &QuadConfig) -> Result<TestReport> {
    let mut worst = (0.0f64, String::new());
    for &nu in nus {
        let order = BesselOrder::new(nu)?;
        for &x in xs {
            for &w in xs {
                let d2 = (x - w) * (x - w);
                let q =
                    integrate_log_axis_from_peak(-30..=12, 0.5, 0.5, cfg.max_panels, 1e-15, |z| {
                        Ok(
                            (-0.5 * z - d2 / (2.0 * z)).exp() * bessel_i_scaled(order, x * w / z)?
                                / z,
                        )
                    })?;
                let want = bessel_product_f(order, x, w)?;
                let rel = (0.5 * q - want).abs() / want;
                if rel >= worst.0 {
                    worst = (rel, format!("worst at nu={nu}, x={x}, w={w}"));
                }
            }
        }
    }
    Ok(TestReport::new(
        "bessel_product",
        worst.0,
        1e-5,
        format!("{} points", xs.len() * xs.len() * nus.len()),
        worst.1,
    ))
}

/// Upper bound on ∫₀^{t_lo} e^{−ν²t/2} Θ(r, t) dt, valid for every ν ≥ 0.
///
/// Θ ≥ 0 gives ∫₀^{t_lo} Θ dt ≤ e^{κ²t_lo/2} ∫₀^∞ e^{−κ²t/2} Θ dt =
/// e^{κ²t_lo/2} I_κ(r) for any κ ≥ 0; the bound is minimised over
/// κ ∈ {0, ½, …, 60}.
pub fn hartman_watson_tail_bound(r: f64, t_lo: f64) -> Result<f64> {
    let mut best = f64::INFINITY;
    for k in 0..=120 {
        let kappa = 0.5 * k as f64;
        let v = (0.5 * kappa * kappa * t_lo).exp() * bessel_i(BesselOrder::new(kappa)?, r)?;
        best = best.min(v);
    }
    Ok(best)
}

/// ∫₀^∞ e^{−ν²t/2} Θ(r, t) dt = I_ν(r). The integral is taken from
/// `cfg.t_min_theta` upward on panels in ln t; the omitted piece is covered
/// by [`hartman_watson_tail_bound`] and added to the error.
pub fn hartman_watson_check(rs: &[f64], nus: &[f64], cfg: &QuadConfig) -> Result<TestReport> {
    cfg.validate()?;
    if nus.is_empty() || nus.iter().any(|&n| !(n > 0.0)) {
        return Err(Error::invalid(
            "orders must be positive for the t-integral to converge",
        ));
    }
    let t_lo = cfg.t_min_theta;
    let nu_min = nus.iter().cloned().fold(f64::INFINITY, f64::min);
    let rule = gl16();
    let du = 0.25;
    let per_r: Vec<Result<Vec<(f64, f64)>>> = map_slice(rs, |&r| {
        let mut sums = vec![0.0; nus.len()];
        let (mut quiet, mut k) = (0, 0);
        while quiet < 2 {
            if k >= cfg.max_panels {
                return Err(Error::convergence(
                    "hartman_watson_check",
                    format!("t-integral did not settle for r={r}"),
                ));
            }
            let a = t_lo.ln() + du * k as f64;
            let mid = a + 0.5 * du;
            let mut panel = vec![0.0; nus.len()];
            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                let t = (mid + 0.5 * du * x).exp();
                let th = hartman_watson_theta(r, t, cfg)?;
                for (p, &nu) in panel.iter_mut().zip(nus) {
                    *p += 0.5 * du * wt * t * (-0.5 * nu * nu * t).exp() * th;
                }
            }
            let i_min = nus.iter().position(|&n| n == nu_min).unwrap();
            for (s, p) in sums.iter_mut().zip(&panel) {
                *s += p;
            }
            if panel[i_min].abs() <= 1e-13 * sums[i_min].abs() {
                quiet += 1;
            } else {
                quiet = 0;
            }
            k += 1;
        }
        let tail = hartman_watson_tail_bound(r, t_lo)?;
        nus.iter()
            .zip(&sums)
            .map(|(&nu, &q)| {
                let want = bessel_i(BesselOrder::new(nu)?, r)?;
                Ok((((q - want).abs() + tail) / want, tail / want))
            })
            .collect()
    });
    let mut worst = (0.0f64, 0.0f64, String::new());
    let mut max_tail = 0.0f64;
    for (r, errs) in rs.iter().zip(per_r) {
        for (nu, (e, tail)) in nus.iter().zip(errs?) {
            max_tail = max_tail.max(tail);
            if e >= worst.0 {
                worst = (e, tail, format!("worst at r={r}, nu={nu}"));
            }
        }
    }
    Ok(TestReport::new(
        "hartman_watson",
        worst.0,
        1e-4,
        format!("t_lo={t_lo}"),
        format!(
            "{}; relative error includes the small-t tail bound (max {:.2e} over r={}, nu={})",
            worst.2,
            max_tail,
            fmt_list(rs),
            fmt_list(nus)
        ),
    ))
}

/// z² p(z) for θ_{T_λ} started at an independent Exp(2) point, against
/// 2e^{−2z} E θ_{T_λ}(z)², both sides by log-axis quadrature; maximum
/// relative gap over `zs`.
pub fn z2_symmetry_check(lambda: f64, zs: &[f64], cfg: &QuadConfig) -> Result<TestReport> {
    let mut worst = (0.0f64, String::new());
    for &z in zs {
        let lhs = z
            * z
            * integrate_log_axis(z.ln(), 0.25, cfg.max_panels, 1e-16, |x| {
                Ok(2.0 * (-2.0 * x).exp() * density_exp_time(x, lambda, z)?)
            })?;
        let second = integrate_log_axis(z.ln(), 0.25, cfg.max_panels, 1e-16, |w| {
            Ok(w * w * density_exp_time(z, lambda, w)?)
        })?;
        let rhs = 2.0 * (-2.0 * z).exp() * second;
        let gap = (lhs - rhs).abs() / rhs;
        if gap >= worst.0 {
            worst = (
                gap,
                format!("worst at z={z}: lhs={lhs:.10e} rhs={rhs:.10e}"),
            );
        }
    }
    Ok(TestReport::new(
        format!("symmetry_lambda{lambda}"),
        worst.0,
        1e-3,
        format!("z={}", fmt_list(zs)),
        worst.1,
    ))
}

/// Settings for [`mixture_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureConfig {
    pub x: f64,
    pub lambda: f64,
    pub ws: Vec<f64>,
    /// Below this horizon the fixed-time density is the bridge Monte Carlo
    /// estimate; above it, the Θ quadrature.
    pub t_split: f64,
    /// Bridge replicates per horizon node.
    pub n: u64,
    /// Bridge step.
    pub dt: f64,
    pub seed: u64,
}

impl Default for MixtureConfig {
    fn default() -> Self {
        MixtureConfig {
            x: 1.0,
            lambda: 1.0,
            ws: vec![0.5, 1.0, 2.0],
            t_split: 0.5,
            n: 20_000,
            dt: 5e-4,
            seed: 17,
        }
    }
}

/// λ ∫₀^∞ e^{−λt} p_t(w) dt against the exponential-time density at each w.
///
/// On (0, t_split) the horizon is substituted as t = s² and integrated with
/// 32-point Gauss–Legendre in s, using [`density_half_bridge`]; on
/// (t_split, ∞) panels in ln t use [`density_exact_half`].
pub fn mixture_check(mc: &MixtureConfig, cfg: &QuadConfig) -> Result<TestReport> {
    if !(mc.t_split >= cfg.t_min_theta) {
        return Err(Error::invalid(format!(
            "t_split {} must be at least t_min_theta {}",
            mc.t_split, cfg.t_min_theta
        )));
    }
    let lam = mc.lambda;
    let mut worst = (0.0f64, String::new());
    let mut notes = Vec::new();
    for &w in &mc.ws {
        // small horizons
        let rule = gl32();
        let s_max = mc.t_split.sqrt();
        let nodes: Vec<(f64, f64)> = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, wt)| (0.5 * s_max * (x + 1.0), 0.5 * s_max * wt))
            .collect();
        let parts: Vec<Result<(f64, f64)>> = map_slice(&nodes, |&(s, wt)| {
            let t = s * s;
            let steps = ((t / mc.dt).ceil() as usize).max(2);
            let est = density_half_bridge(mc.x, t, w, mc.n, steps, mc.seed)?;
            let k = wt * lam * (-lam * t).exp() * 2.0 * s;
            Ok((k * est.mean, k * est.stderr))
        });
        let (mut low, mut low_se) = (0.0, 0.0);
        for p in parts {
            let (m, e) = p?;
            low += m;
            low_se += e;
        }
        // large horizons
        let rule = gl16();
        let du = 0.5;
        let (mut high, mut quiet, mut k) = (0.0, 0, 0);
        while quiet < 2 {
            if k >= cfg.max_panels {
                return Err(Error::convergence(
                    "mixture_check",
                    "t-integral did not settle",
                ));
            }
            let mid = mc.t_split.ln() + du * (k as f64 + 0.5);
            let ts: Vec<(f64, f64)> = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, wt)| ((mid + 0.5 * du * x).exp(), 0.5 * du * wt))
                .collect();
            let vals: Vec<Result<f64>> = map_slice(&ts, |&(t, wt)| {
                Ok(wt * t * lam * (-lam * t).exp() * density_exact_half(mc.x, t, w, cfg)?)
            });
            let mut p = 0.0;
            for v in vals {
                p += v?;
            }
            high += p;
            quiet = if p.abs() <= 1e-12 * high.abs() {
                quiet + 1
            } else {
                0
            };
            k += 1;
        }
        let mix = low + high;
        let want = density_exp_time(mc.x, lam, w)?;
        let gap = (mix - want).abs() / want;
        notes.push(format!(
            "w={w}: mixture={mix:.7e} (bridge part {low:.4e} +/- {low_se:.1e}) exact={want:.7e}"
        ));
        if gap >= worst.0 {
            worst = (gap, format!("worst at w={w}"));
        }
    }
    Ok(TestReport::new(
        "mixture",
        worst.0,
        1e-3,
        format!("bridge n={} per node, t_split={}", mc.n, mc.t_split),
        format!("{}; {}", worst.1, notes.join("; ")),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_product_identity_on_a_small_grid() {
        let r = bessel_product_check(&[0.5, 2.0], &[1.0], &QuadConfig::default()).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.statistic() < 1e-9, "{r}");
    }

    #[test]
    fn tail_bound_is_small_and_decreasing_in_t() {
        let a = hartman_watson_tail_bound(3.0, 0.1).unwrap();
        let b = hartman_watson_tail_bound(3.0, 0.05).unwrap();
        assert!(a < 1e-6 && b < a, "{a} {b}");
    }

    #[test]
    fn symmetry_holds() {
        let r = z2_symmetry_check(1.0, &[1.0], &QuadConfig::default()).unwrap();
        assert!(r.passed(), "{r}");
    }
}
