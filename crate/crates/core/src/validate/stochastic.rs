//! Monte Carlo checks: martingale and measure change, moments, Laplace
//! cross-oracles, pathwise representation, and distributional comparisons
//! of the exact densities against simulated samples.

use rand_chacha::ChaCha8Rng;

use crate::density::density_general_mc;
use crate::density::{
    density_exact_half, density_exp_time, density_general_variants, exp_time_mass, log_grid,
    moment_exp_int_theta, CurveKind, DensityCurve, KernelVariant,
};
use crate::parallel::{mc_map, mc_moments};
use crate::simulate::{
    direct_laplace_mc, functional_from_increments, girsanov_weight, laplace_prop1_mc,
    laplace_prop7_mc, sample_exp_time, simulate_terminal, terminal_samples, ModelParams,
    Prop1Horizon, TimeGrid,
};
use crate::specfun::QuadConfig;
use crate::stats::McEstimate;
use crate::{Error, Result};

use super::{ks_distance, CdfTable, TestReport};

/// Decorrelated seed for sub-run `tag` of a check.
pub(crate) fn sub_seed(seed: u64, tag: u64) -> u64 {
    seed ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// (γ, μ, β, T) ∈ {½, 1} × {−½, 0, ½} × {0, 1} × {½, 1}.
pub fn martingale_grid() -> Vec<(f64, f64, f64, f64)> {
    let mut g = Vec::new();
    for gamma in [0.5, 1.0] {
        for mu in [-0.5, 0.0, 0.5] {
            for beta in [0.0, 1.0] {
                for t in [0.5, 1.0] {
                    g.push((gamma, mu, beta, t));
                }
            }
        }
    }
    g
}

/// E M_T = 1 at each (γ, μ, β, T) of `combos` for the start-1 process;
/// statistic is the largest |z|.
pub fn martingale_check(
    combos: &[(f64, f64, f64, f64)],
    n: u64,
    dt: f64,
    seed: u64,
) -> Result<TestReport> {
    let mut worst = (0.0f64, String::new());
    for (i, &(gamma, mu, beta, t)) in combos.iter().enumerate() {
        let params = ModelParams::new(mu, beta, 1.0)?;
        let grid = TimeGrid::with_step(t, dt)?;
        let m = mc_moments(n, 1, sub_seed(seed, i as u64), |rng, _, out| {
            let p = simulate_terminal(&params, &grid, rng);
            out[0] = girsanov_weight(&p, gamma, &params)?;
            Ok(())
        })?;
        let est = McEstimate::from_moments(&m, 0);
        let z = est.z_against_value(1.0);
        if z >= worst.0 {
            worst = (
                z,
                format!("worst at gamma={gamma}, mu={mu}, beta={beta}, T={t}: E[M]={est}"),
            );
        }
    }
    Ok(TestReport::new(
        "martingale",
        worst.0,
        3.0,
        format!("{n} paths x {} cases, dt={dt}", combos.len()),
        worst.1,
    ))
}

/// Bounded test functions for the measure-change check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFn {
    /// 1{θ ≤ c}.
    Below(f64),
    /// e^{−θ}.
    ExpNeg,
}

impl TestFn {
    pub fn eval(self, theta: f64) -> f64 {
        match self {
            TestFn::Below(c) => f64::from(u8::from(theta <= c)),
            TestFn::ExpNeg => (-theta).exp(),
        }
    }

    pub fn label(self) -> String {
        match self {
            TestFn::Below(c) => format!("1{{theta<={c}}}"),
            TestFn::ExpNeg => "exp(-theta)".into(),
        }
    }

    /// 1{θ ≤ c} for c ∈ {½, 1, 2} and e^{−θ}.
    pub fn standard_family() -> Vec<TestFn> {
        vec![
            TestFn::Below(0.5),
            TestFn::Below(1.0),
            TestFn::Below(2.0),
            TestFn::ExpNeg,
        ]
    }
}

/// E[M_t f(θ^{(μ,β)}_t)] = E[f(θ^{(μ,β+γ)}_t)] for each f, both sides driven
/// by the same Brownian path; z-scores use the variance of the paired
/// differences.
pub fn measure_change_test(
    params: &ModelParams,
    gamma: f64,
    grid: &TimeGrid,
    n: u64,
    seed: u64,
    fns: &[TestFn],
) -> Result<TestReport> {
    params.require_start_one("measure_change_test")?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!("gamma must be >= 0, got {gamma}")));
    }
    if fns.is_empty() {
        return Err(Error::invalid("at least one test function is needed"));
    }
    let shifted = params.with_crowding(params.crowding() + gamma)?;
    let m = mc_moments(n, fns.len(), seed, |rng, _, out| {
        let mut twin: ChaCha8Rng = rng.clone();
        let base = simulate_terminal(params, grid, rng);
        let moved = simulate_terminal(&shifted, grid, &mut twin);
        let w = girsanov_weight(&base, gamma, params)?;
        for (o, f) in out.iter_mut().zip(fns) {
            *o = w * f.eval(base.theta) - f.eval(moved.theta);
        }
        Ok(())
    })?;
    let mut worst = (0.0f64, String::new());
    for (k, f) in fns.iter().enumerate() {
        let d = McEstimate::from_moments(&m, k);
        let z = d.z_against_value(0.0);
        if z >= worst.0 {
            worst = (z, format!("worst f={}: mean difference {d}", f.label()));
        }
    }
    Ok(TestReport::new(
        format!("measure_change_beta{}", params.beta()),
        worst.0,
        3.0,
        format!("{n} paired paths, dt={}", grid.dt()),
        format!(
            "mu={}, gamma={gamma}, t={}; {}",
            params.mu(),
            grid.t_end(),
            worst.1
        ),
    ))
}

/// E e^{β∫θ} against 1 + β(e^{(μ+½)t} − 1)/(μ+½) at each (μ, β, t).
pub fn moment_check(combos: &[(f64, f64, f64)], n: u64, dt: f64, seed: u64) -> Result<TestReport> {
    let mut worst = (0.0f64, String::new());
    for (i, &(mu, beta, t)) in combos.iter().enumerate() {
        let params = ModelParams::new(mu, beta, 1.0)?;
        let grid = TimeGrid::with_step(t, dt)?;
        let m = mc_moments(n, 1, sub_seed(seed, i as u64), |rng, _, out| {
            out[0] = (beta * simulate_terminal(&params, &grid, rng).int_theta).exp();
            Ok(())
        })?;
        let est = McEstimate::from_moments(&m, 0);
        let want = moment_exp_int_theta(&params, t)?;
        let z = est.z_against_value(want);
        if z >= worst.0 {
            worst = (
                z,
                format!("worst at mu={mu}, beta={beta}, t={t}: {est} vs {want:.6}"),
            );
        }
    }
    Ok(TestReport::new(
        "moment",
        worst.0,
        3.0,
        format!("{n} paths x {} cases, dt={dt}", combos.len()),
        worst.1,
    ))
}

/// Squared-Bessel, Girsanov-functional and direct estimates of E e^{−λθ_t},
/// pairwise. Both horizons of the squared-Bessel form are run; the report
/// keeps the one with the smaller worst pairwise z and names it.
pub fn laplace_triangle_check(
    lambda: f64,
    params: &ModelParams,
    t: f64,
    n: u64,
    dt: f64,
    seed: u64,
) -> Result<TestReport> {
    let grid = TimeGrid::with_step(t, dt)?;
    let p7 = laplace_prop7_mc(lambda, params, &grid, n, sub_seed(seed, 0))?;
    let direct = direct_laplace_mc(lambda, params, &grid, n, sub_seed(seed, 1))?;
    let z_7d = p7.z_against(&direct);
    let mut rows = Vec::new();
    for (k, h) in [Prop1Horizon::Literal, Prop1Horizon::Rescaled]
        .into_iter()
        .enumerate()
    {
        let p1 = laplace_prop1_mc(lambda, params, t, n, sub_seed(seed, 2 + k as u64), h)?;
        let worst = p1.z_against(&p7).max(p1.z_against(&direct)).max(z_7d);
        rows.push((worst, h, p1));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (stat, chosen, p1) = rows[0];
    let (other_z, other, other_p1) = rows[1];
    Ok(TestReport::new(
        "laplace_triangle",
        stat,
        3.0,
        format!("{n} per estimator, dt={dt}"),
        format!(
            "selected horizon={} (bessel {p1}); rejected horizon={} (bessel {other_p1}, worst z={other_z:.2}); functional {p7}; direct {direct}",
            chosen.name(),
            other.name()
        ),
    ))
}

/// Parameters of the pathwise decomposition
/// B_t + μt = α(V_t + μt) + (1−α) ln θ_t, V = B + γ∫θ, with β = γα/(1−α).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepresentationParams {
    alpha: f64,
    gamma: f64,
    beta: f64,
    mu: f64,
    t: f64,
    big_t: f64,
}

impl RepresentationParams {
    pub fn new(alpha: f64, gamma: f64, mu: f64, t: f64, big_t: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::invalid(format!(
                "alpha must lie in [0, 1), got {alpha}"
            )));
        }
        if !(gamma > 0.0) || !mu.is_finite() || !(t > 0.0) || !(big_t > t) {
            return Err(Error::invalid(format!(
                "need gamma > 0, finite mu and 0 < t < T; got gamma={gamma}, mu={mu}, t={t}, T={big_t}"
            )));
        }
        Ok(RepresentationParams {
            alpha,
            gamma,
            beta: gamma * alpha / (1.0 - alpha),
            mu,
            t,
            big_t,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn big_t(&self) -> f64 {
        self.big_t
    }
}

/// Largest |B+μs − α(V+μs) − (1−α) ln θ_s| over the grid nodes of `paths`
/// paths at step `dt`, and again at `dt/2` on the same Brownian paths.
///
/// Two reports: the residual at `dt` against 10·dt, and the ratio of the
/// summed residuals at `dt/2` and `dt` against ½.
pub fn representation_check(
    rp: &RepresentationParams,
    dt: f64,
    paths: u64,
    seed: u64,
) -> Result<Vec<TestReport>> {
    let coarse = TimeGrid::with_step(rp.t, dt)?;
    let fine = TimeGrid::new(rp.t, 2 * coarse.n_steps())?;
    let params = ModelParams::new(rp.mu, rp.beta, 1.0)?;
    let (a, g) = (rp.alpha, rp.gamma);
    let residual = |grid: &TimeGrid, db: &[f64]| -> Result<f64> {
        let p = functional_from_increments(&params, grid, db)?;
        let mut r: f64 = 0.0;
        for i in 0..p.theta.len() {
            let y = p.bmd[i];
            let v = y + g * p.running[i].int_theta;
            r = r.max((y - a * v - (1.0 - a) * p.theta[i].ln()).abs());
        }
        Ok(r)
    };
    let sd = fine.dt().sqrt();
    let pairs = mc_map(paths, seed, |rng, _| {
        use rand::Rng;
        let db: Vec<f64> = (0..fine.n_steps())
            .map(|_| sd * rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let dbc: Vec<f64> = db.chunks(2).map(|c| c[0] + c[1]).collect();
        Ok((residual(&coarse, &dbc)?, residual(&fine, &db)?))
    })?;
    let max_c = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    let (sum_c, sum_f) = pairs.iter().fold((0.0, 0.0), |s, p| (s.0 + p.0, s.1 + p.1));
    let ratio = if sum_c > 0.0 { sum_f / sum_c } else { 0.0 };
    let label = format!(
        "alpha={a}, gamma={g}, beta={}, mu={}, t={}, T={}",
        rp.beta, rp.mu, rp.t, rp.big_t
    );
    Ok(vec![
        TestReport::new(
            "representation",
            max_c,
            10.0 * coarse.dt(),
            format!("{paths} paths, dt={}", coarse.dt()),
            label.clone(),
        ),
        TestReport::new(
            "representation_refinement",
            ratio,
            0.5,
            format!("{paths} paths, dt={} -> {}", coarse.dt(), fine.dt()),
            format!("{label}; summed residual {sum_c:.3e} -> {sum_f:.3e}"),
        ),
    ])
}

/// Mass of the exact μ = −½ density and its KS distance to θ_t(x) samples
/// of the exact functional.
pub fn exact_half_ks_check(
    x: f64,
    t: f64,
    n: u64,
    dt: f64,
    seed: u64,
    cfg: &QuadConfig,
) -> Result<Vec<TestReport>> {
    let centre = x.ln() - 0.5 * t;
    let half = 8.0 * t.sqrt();
    let table = CdfTable::from_density(
        |w| density_exact_half(x, t, w, cfg),
        (centre - half).exp(),
        (centre + half).exp(),
        ((2.0 * half / 0.2).ceil() as usize).max(10),
    )?;
    let samples = sorted(terminal_samples(
        &ModelParams::half_drift(x)?,
        &TimeGrid::with_step(t, dt)?,
        n,
        seed,
    )?);
    let ks = ks_distance(&samples, |w| table.cdf(w))?;
    let mass = table.mass();
    let label = format!("x={x}, t={t}");
    Ok(vec![
        TestReport::new(
            "exact_half_mass",
            (mass - 1.0).abs(),
            1e-3,
            "quadrature",
            format!("{label}; mass={mass:.8}"),
        ),
        TestReport::new(
            "exact_half_ks",
            ks,
            5e-3,
            format!("{n} paths, dt={dt}"),
            label,
        ),
    ])
}

/// Mass of the exponential-time density and its KS distance to θ_{T_λ}(x)
/// samples, T_λ drawn independently per path.
pub fn exp_time_ks_check(
    x: f64,
    lambda: f64,
    n: u64,
    dt: f64,
    seed: u64,
    cfg: &QuadConfig,
) -> Result<Vec<TestReport>> {
    let mass = exp_time_mass(x, lambda, cfg)?;
    let lo = x.ln() - 20.0;
    let hi = x.ln() + 6.0;
    let table =
        CdfTable::from_density(|z| density_exp_time(x, lambda, z), lo.exp(), hi.exp(), 130)?;
    let params = ModelParams::half_drift(x)?;
    let samples = sorted(mc_map(n, seed, |rng, _| {
        let t = sample_exp_time(lambda, rng)?;
        let grid = TimeGrid::with_step(t, dt)?;
        Ok(simulate_terminal(&params, &grid, rng).theta)
    })?);
    let ks = ks_distance(&samples, |z| table.cdf(z))?;
    let label = format!("x={x}, lambda={lambda}");
    Ok(vec![
        TestReport::new(
            "exp_time_mass",
            (mass - 1.0).abs(),
            1e-6,
            "quadrature",
            format!("{label}; mass={mass:.10}"),
        ),
        TestReport::new(
            "exp_time_ks",
            ks,
            1e-2,
            format!("{n} samples, dt={dt}"),
            label,
        ),
    ])
}

/// Settings for [`general_drift_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralDriftConfig {
    pub gamma: f64,
    pub mu: f64,
    pub t: f64,
    /// Point at which the two kernel variants are arbitrated.
    pub x_arbitrate: f64,
    /// Kernel replicates per variant at the arbitration point.
    pub n_arbitrate: u64,
    /// Simulated paths for the histogram and empirical CDF.
    pub n_paths: u64,
    /// Path step for the simulated oracle.
    pub dt: f64,
    /// Kernel replicates per curve point.
    pub n_curve: u64,
    /// Grid steps for a_t inside the kernel average.
    pub steps: usize,
    pub curve_lo: f64,
    pub curve_hi: f64,
    pub curve_points: usize,
    pub seed: u64,
}

impl Default for GeneralDriftConfig {
    fn default() -> Self {
        GeneralDriftConfig {
            gamma: 1.0,
            mu: 0.0,
            t: 1.0,
            x_arbitrate: 1.0,
            n_arbitrate: 100_000,
            n_paths: 1_000_000,
            dt: 1e-3,
            n_curve: 10_000,
            steps: 400,
            curve_lo: 0.05,
            curve_hi: 8.0,
            curve_points: 80,
            seed: 29,
        }
    }
}

/// Histogram density of sorted `samples` at `x` with Freedman–Diaconis bin
/// width, as an estimate with binomial standard error.
fn histogram_at(samples: &[f64], x: f64) -> (McEstimate, f64) {
    let n = samples.len();
    let q = |p: f64| samples[((p * (n - 1) as f64).round() as usize).min(n - 1)];
    let h = 2.0 * (q(0.75) - q(0.25)) / (n as f64).cbrt();
    let lo = samples.partition_point(|&s| s < x - 0.5 * h);
    let hi = samples.partition_point(|&s| s < x + 0.5 * h);
    let c = (hi - lo) as f64;
    let nf = n as f64;
    let p = c / nf;
    (
        McEstimate {
            mean: p / h,
            stderr: (p * (1.0 - p) / nf).sqrt() / h,
            n: n as u64,
        },
        h,
    )
}

/// The general-drift density by kernel Monte Carlo against simulated paths
/// of the process with crowding γ started at 1.
///
/// Both laws of a_t are tried at `x_arbitrate` against a Freedman–Diaconis
/// histogram; the variant closer in combined standard errors is selected
/// (report 1, passing when it is within 3). The selected variant is then
/// evaluated on a log grid and compared by sup-CDF distance (report 2) and
/// trapezoid mass (report 3).
pub fn general_drift_check(tc: &GeneralDriftConfig, cfg: &QuadConfig) -> Result<Vec<TestReport>> {
    let process = ModelParams::new(tc.mu, tc.gamma, 1.0)?;
    let samples = sorted(terminal_samples(
        &process,
        &TimeGrid::with_step(tc.t, tc.dt)?,
        tc.n_paths,
        sub_seed(tc.seed, 0),
    )?);
    let (hist, h) = histogram_at(&samples, tc.x_arbitrate);
    let cmp = density_general_variants(
        tc.gamma,
        tc.mu,
        tc.t,
        tc.x_arbitrate,
        tc.n_arbitrate,
        sub_seed(tc.seed, 1),
        tc.steps,
        cfg,
    );
    let describe = |r: &Result<McEstimate>| match r {
        Ok(e) => format!("{e} (z={:.2})", e.z_against(&hist)),
        Err(e) => format!("error[{}]: {e}", e.kind()),
    };
    let z_of = |r: &Result<McEstimate>| r.as_ref().map_or(f64::INFINITY, |e| e.z_against(&hist));
    let (zu, zc) = (z_of(&cmp.unconditional), z_of(&cmp.endpoint_conditional));
    let (selected, z_sel) = if zc <= zu {
        (KernelVariant::EndpointConditional, zc)
    } else {
        (KernelVariant::Unconditional, zu)
    };
    let label = format!("gamma={}, mu={}, t={}", tc.gamma, tc.mu, tc.t);
    let arbitration = TestReport::new(
        "general_drift_arbitration",
        z_sel,
        3.0,
        format!("{} kernel draws, {} paths", tc.n_arbitrate, tc.n_paths),
        format!(
            "{label}; x={}; histogram {hist} (bin {h:.4}); unconditional {}; endpoint-conditional {}; variants disagree: {}; selected {}",
            tc.x_arbitrate,
            describe(&cmp.unconditional),
            describe(&cmp.endpoint_conditional),
            cmp.disagree,
            selected.name()
        ),
    );
    let grid = log_grid(tc.curve_lo, tc.curve_hi, tc.curve_points)?;
    let curve_seed = sub_seed(tc.seed, 2);
    let curve = DensityCurve::from_fn(CurveKind::GeneralMc, label.clone(), grid, |x| {
        Ok(density_general_mc(
            tc.gamma, tc.mu, tc.t, x, tc.n_curve, curve_seed, tc.steps, cfg, selected,
        )?
        .mean)
    })?;
    let cdf = curve.cdf();
    let dist = ks_distance(&samples, cdf)?;
    let curve_n = format!("{} points x {} kernel draws", tc.curve_points, tc.n_curve);
    Ok(vec![
        arbitration,
        TestReport::new(
            "general_drift_cdf",
            dist,
            1e-2,
            curve_n.clone(),
            format!(
                "{label}; variant {}; curve on [{}, {}] vs {} paths",
                selected.name(),
                tc.curve_lo,
                tc.curve_hi,
                tc.n_paths
            ),
        ),
        TestReport::new(
            "general_drift_mass",
            (curve.total_mass - 1.0).abs(),
            2e-2,
            curve_n,
            format!("{label}; mass={:.5}", curve.total_mass),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parallel::replicate_rng;

    #[test]
    fn representation_is_exact_without_crowding() {
        let rp = RepresentationParams::new(0.0, 1.0, 0.3, 1.0, 2.0).unwrap();
        assert_eq!(rp.beta(), 0.0);
        let r = representation_check(&rp, 1e-2, 4, 1).unwrap();
        assert!(r[0].statistic() < 1e-12, "{}", r[0]);
    }

    #[test]
    fn representation_params_coupling() {
        let rp = RepresentationParams::new(0.5, 1.0, 0.0, 1.0, 2.0).unwrap();
        assert_eq!(rp.beta() * (1.0 - rp.alpha()), rp.gamma() * rp.alpha());
        assert!(RepresentationParams::new(1.0, 1.0, 0.0, 1.0, 2.0).is_err());
        assert!(RepresentationParams::new(0.5, 1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn measure_change_zero_gamma_is_trivial() {
        let p = ModelParams::new(0.0, 1.0, 1.0).unwrap();
        let g = TimeGrid::new(1.0, 50).unwrap();
        let r = measure_change_test(&p, 0.0, &g, 2000, 3, &TestFn::standard_family()).unwrap();
        assert_eq!(r.statistic(), 0.0, "{r}");
        assert!(measure_change_test(
            &ModelParams::half_drift(2.0).unwrap(),
            1.0,
            &g,
            10,
            1,
            &[TestFn::ExpNeg]
        )
        .is_err());
    }

    #[test]
    fn test_functions() {
        assert_eq!(TestFn::Below(1.0).eval(1.0), 1.0);
        assert_eq!(TestFn::Below(1.0).eval(1.5), 0.0);
        assert_eq!(TestFn::ExpNeg.eval(0.0), 1.0);
    }

    #[test]
    fn histogram_of_uniform_samples() {
        let n = 100_000;
        let mut rng = replicate_rng(2, 0);
        let s = sorted((0..n).map(|_| rand::Rng::random::<f64>(&mut rng)).collect());
        let (e, h) = histogram_at(&s, 0.5);
        assert!(h > 0.0 && h < 0.05);
        assert!(e.z_against_value(1.0) < 4.0, "{e}");
    }

    #[test]
    fn sub_seeds_differ() {
        assert_ne!(sub_seed(1, 0), sub_seed(1, 1));
        assert_ne!(sub_seed(1, 0), 1);
    }
}
