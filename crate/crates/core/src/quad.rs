//! Gauss–Legendre rules and the composite integrators built on them.

use std::sync::OnceLock;

use crate::specfun::dd::Dd;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Legendre P_n and its derivative at x, by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn legendre_dd(n: usize, x: Dd) -> (Dd, Dd) {
    let (mut p0, mut p1) = (Dd::ONE, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((x * p1).mul_f64(2.0 * k - 1.0) - p0.mul_f64(k - 1.0)) / Dd::from_f64(k);
        p0 = p1;
        p1 = p2;
    }
    let dp = (x * p1 - p0).mul_f64(n as f64) / (x * x - Dd::ONE);
    (p1, dp)
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum();
        half * s
    }
}

/// Gauss–Legendre rule with nodes and weights in double-double precision.
#[derive(Debug, Clone)]
pub(crate) struct GaussLegendreDd {
    pub nodes: Vec<Dd>,
    pub weights: Vec<Dd>,
}

impl GaussLegendreDd {
    pub fn new(n: usize) -> Self {
        let seed = GaussLegendre::new(n);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for &x0 in &seed.nodes {
            let mut x = Dd::from_f64(x0);
            if x0 != 0.0 {
                for _ in 0..3 {
                    let (p, dp) = legendre_dd(n, x);
                    x = x - p / dp;
                }
            }
            let (_, dp) = legendre_dd(n, x);
            let w = Dd::from_f64(2.0) / ((Dd::ONE - x * x) * dp * dp);
            nodes.push(x);
            weights.push(w);
        }
        GaussLegendreDd { nodes, weights }
    }
}

pub fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

pub fn gl32() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(32))
}

pub(crate) fn gl24_dd() -> &'static GaussLegendreDd {
    static RULE: OnceLock<GaussLegendreDd> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendreDd::new(24))
}

/// Integrates a function over `(0, ∞)` after the substitution `z = e^u`,
/// summing unit-free panels of width `du` outward from `u0` in both
/// directions until a panel contributes less than `tol` (absolute) or less
/// than `tol` relative to the running total, twice in a row.
///
/// `f` receives `z` and must already include the Jacobian-free integrand;
/// the `e^u` factor is applied here.
pub fn integrate_log_axis(
    u0: f64,
    du: f64,
    max_panels: usize,
    tol: f64,
    mut f: impl FnMut(f64) -> crate::Result<f64>,
) -> crate::Result<f64> {
    let rule = gl32();
    let mut panel = |a: f64, b: f64| -> crate::Result<f64> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut s = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let u = mid + half * x;
            let z = u.exp();
            s += w * f(z)? * z;
        }
        Ok(half * s)
    };
    let mut total = 0.0;
    for dir in [1.0, -1.0] {
        let mut quiet = 0;
        let mut k = 0;
        loop {
            if k >= max_panels {
                return Err(crate::Error::convergence(
                    "integrate_log_axis",
                    format!("{max_panels} panels exhausted (u0={u0}, dir={dir})"),
                ));
            }
            let (a, b) = if dir > 0.0 {
                (u0 + du * k as f64, u0 + du * (k + 1) as f64)
            } else {
                (u0 - du * (k + 1) as f64, u0 - du * k as f64)
            };
            let p = panel(a, b)?;
            total += p;
            k += 1;
            if p.abs() <= tol.max(1e-15 * total.abs()) {
                quiet += 1;
                if quiet >= 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
    }
    Ok(total)
}

/// [`integrate_log_axis`] started at the largest of `z·f(z)` over the coarse
/// scan `u = k·scan_step`, `k ∈ ks`. Returns 0 when the scan sees no mass.
pub fn integrate_log_axis_from_peak(
    ks: std::ops::RangeInclusive<i32>,
    scan_step: f64,
    du: f64,
    max_panels: usize,
    tol: f64,
    mut f: impl FnMut(f64) -> crate::Result<f64>,
) -> crate::Result<f64> {
    let mut best = (0.0, 0.0);
    for k in ks {
        let u = scan_step * k as f64;
        let z = u.exp();
        let v = f(z)? * z;
        if v > best.0 {
            best = (v, u);
        }
    }
    if best.0 <= 0.0 {
        return Ok(0.0);
    }
    integrate_log_axis(best.1, du, max_panels, tol, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_integrate_polynomials_exactly() {
        for n in [1, 2, 5, 16, 24, 32] {
            let gl = GaussLegendre::new(n);
            let sum: f64 = gl.weights.iter().sum();
            assert!((sum - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 1;
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            let got = gl.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
            assert!((got - exact).abs() < 1e-12, "n={n}");
            // even power 2n-2 is also exact
            let deg = 2 * n - 2;
            let got = gl.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn dd_rule_matches_f64_rule_and_is_exact_for_high_degree() {
        let dd = GaussLegendreDd::new(24);
        let f = GaussLegendre::new(24);
        let mut sum = Dd::ZERO;
        for (x, w) in dd.nodes.iter().zip(&dd.weights) {
            let x2 = *x * *x;
            let mut p = Dd::ONE;
            for _ in 0..23 {
                p = p * x2;
            }
            sum = sum + *w * p;
        }
        // ∫_{-1}^{1} x^46 dx = 2/47
        let exact = Dd::from_f64(2.0) / Dd::from_f64(47.0);
        assert!((sum - exact).to_f64().abs() < 1e-30);
        for i in 0..24 {
            assert!((dd.nodes[i].to_f64() - f.nodes[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn log_axis_integrates_gamma_function() {
        // ∫ z^{1/2} e^{-z} dz = Γ(3/2) = √π / 2
        let v = integrate_log_axis(0.0, 1.0, 80, 1e-16, |z| Ok(z.sqrt() * (-z).exp())).unwrap();
        assert!((v - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }
}
