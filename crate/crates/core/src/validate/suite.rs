use crate::parallel::{map_slice, with_threads};
use crate::simulate::{ModelParams, TimeGrid};
use crate::specfun::QuadConfig;
use crate::{Error, Result};

use super::stochastic::sub_seed;
use super::*;

/// Run settings shared by every registered check.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Names of the checks to run; empty runs all.
    pub only: Vec<String>,
    /// Multiplier on every Monte Carlo sample count.
    pub scale: f64,
    /// Worker cap; `None` uses all cores. Results do not depend on it.
    pub threads: Option<usize>,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            only: Vec::new(),
            scale: 1.0,
            threads: None,
            seed: 20_240_601,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale <= 1e3) {
            return Err(Error::invalid(format!(
                "scale must lie in (0, 1000], got {}",
                self.scale
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("thread count must be at least 1"));
        }
        let known: Vec<&str> = registry().iter().map(|c| c.name).collect();
        for name in &self.only {
            if !known.contains(&name.as_str()) {
                return Err(Error::invalid(format!(
                    "unknown check '{name}'; known: {}",
                    known.join(", ")
                )));
            }
        }
        Ok(())
    }

    fn n(&self, base: u64) -> u64 {
        ((base as f64 * self.scale).round() as u64).max(100)
    }

    fn seed_for(&self, name: &str) -> u64 {
        // FNV-1a of the name, so a check draws the same numbers alone or in the suite
        let h = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
        });
        sub_seed(self.seed, h)
    }
}

/// A registered check.
#[derive(Clone, Copy)]
pub struct Check {
    pub name: &'static str,
    /// Whether the check draws random numbers.
    pub monte_carlo: bool,
    pub run: fn(&SuiteConfig) -> Result<Vec<TestReport>>,
}

impl std::fmt::Debug for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Check")
            .field("name", &self.name)
            .field("monte_carlo", &self.monte_carlo)
            .finish()
    }
}

const DT: f64 = 1e-3;

fn one(r: Result<TestReport>) -> Result<Vec<TestReport>> {
    r.map(|r| vec![r])
}

fn bessel_product(_: &SuiteConfig) -> Result<Vec<TestReport>> {
    one(bessel_product_check(
        &[0.5, 1.0, 2.0, 3.0],
        &[0.6, 1.0, 2.0],
        &QuadConfig::default(),
    ))
}

fn hartman_watson(_: &SuiteConfig) -> Result<Vec<TestReport>> {
    let cfg = QuadConfig {
        t_min_theta: 0.1,
        ..QuadConfig::default()
    };
    one(hartman_watson_check(
        &[0.5, 1.0, 2.0, 3.0],
        &[0.6, 1.0, 2.0],
        &cfg,
    ))
}

fn exact_half(c: &SuiteConfig) -> Result<Vec<TestReport>> {
    exact_half_ks_check(
        1.0,
        1.0,
        c.n(1_000_000),
        DT,
        c.seed_for("exact_half"),
        &QuadConfig::default(),
    )
}

fn exp_time(c: &SuiteConfig) -> Result<Vec<TestReport>> {
    exp_time_ks_check(
        1.0,
        1.0,
        c.n(100_000),
        DT,
        c.seed_for("exp_time"),
        &QuadConfig::default(),
    )
}

fn mixture(c: &SuiteConfig) -> Result<Vec<TestReport>> {
    let mc = MixtureConfig {
        n: c.n(50_000),
        seed: c.seed_for("mixture"),
        ..MixtureConfig::default()
    };
    one(mixture_check(&mc, &QuadConfig::default()))
}

fn martingale(c: &SuiteConfig) -> Result<Vec<TestReport>> {
    one(martingale_check(
        &martingale_grid(),
        c.n(100_000),
        DT,
        c.seed_for("martingale"),
    ))
}

fn measure_change(c: &SuiteConfig) -> Result<Vec<TestReport>> {
    let grid = TimeGrid::with_step(1.0, DT)?;
    [0.0, 1.0]
        .iter()
        .enumerate()
        .map(|(k, &beta)| {
            measure_change_test(
                &ModelParams::new(0.0, beta, 1.0)?,
                1.0,
                &grid,
                c.n(100_000),
                sub_seed(c.seed_for("measure_change"), k as u64),
                &TestFn::standard_family(),
            )
        })
        .collect()
}

fn moment(c: &SuiteConfig) -> Result<Vec<TestReport>> {
    let mut combos = Vec::new();
    for mu in [-0.25, 0.0, 0.5] {
        for beta in [0.5, 1.0] {
            for t in [0.5, 1.0] {
                combos.push((mu, beta, t));
            }
        }
    }
    one(moment_check(
        &combos,
        c.n(100_000),
        DT,
        c.seed_for("moment"),
    ))
}

fn laplace_triangle(c: &SuiteConfig) -> Result<Vec<TestReport>> {
    one(laplace_triangle_check(
        1.0,
        &ModelParams::new(0.0, 1.0, 1.0)?,
        1.0,
        c.n(100_000),
        DT,
        c.seed_for("laplace_triangle"),
    ))
}

fn general_drift(c: &SuiteConfig) -> Result<Vec<TestReport>> {
    let d = GeneralDriftConfig::default();
    let tc = GeneralDriftConfig {
        n_arbitrate: c.n(d.n_arbitrate),
        n_paths: c.n(d.n_paths),
        n_curve: c.n(d.n_curve),
        seed: c.seed_for("general_drift"),
        ..d
    };
    general_drift_check(&tc, &QuadConfig::monte_carlo())
}

fn representation(c: &SuiteConfig) -> Result<Vec<TestReport>> {
    let rp = RepresentationParams::new(0.5, 1.0, 0.0, 1.0, 2.0)?;
    representation_check(&rp, DT, 16, c.seed_for("representation"))
}

fn symmetry(_: &SuiteConfig) -> Result<Vec<TestReport>> {
    let cfg = QuadConfig::default();
    [1.0, 2.0]
        .iter()
        .map(|&l| z2_symmetry_check(l, &[0.5, 1.0, 2.0], &cfg))
        .collect()
}

/// Scale applied to the Monte Carlo checks when they are replayed for the
/// determinism comparison.
const REPLAY_SCALE: f64 = 0.02;

fn determinism(c: &SuiteConfig) -> Result<Vec<TestReport>> {
    let checks: Vec<Check> = registry()
        .into_iter()
        .filter(|k| k.monte_carlo && k.name != "determinism")
        .collect();
    let small = SuiteConfig {
        scale: c.scale * REPLAY_SCALE,
        ..c.clone()
    };
    // an erroring check is part of the outcome being compared
    let run = |threads| -> Result<Vec<TestReport>> {
        with_threads(Some(threads), || {
            checks
                .iter()
                .flat_map(|k| {
                    (k.run)(&small).unwrap_or_else(|e| vec![TestReport::errored(k.name, &e)])
                })
                .collect()
        })
    };
    let (a, b) = (run(1)?, run(4)?);
    let mismatches: Vec<&str> = a
        .iter()
        .zip(&b)
        .filter(|(x, y)| {
            x.statistic().to_bits() != y.statistic().to_bits() || x.details() != y.details()
        })
        .map(|(x, _)| x.name())
        .collect();
    let count = mismatches.len() + a.len().abs_diff(b.len());
    Ok(vec![TestReport::new(
        "determinism",
        count as f64,
        0.0,
        format!("{} reports replayed at scale {}", a.len(), small.scale),
        if mismatches.is_empty() {
            "bit-identical statistics with 1 and 4 workers".to_string()
        } else {
            format!("differing: {}", mismatches.join(", "))
        },
    )])
}

/// All checks, in registration order.
pub fn registry() -> Vec<Check> {
    let c = |name, monte_carlo, run| Check {
        name,
        monte_carlo,
        run,
    };
    vec![
        c(
            "bessel_product",
            false,
            bessel_product as fn(&SuiteConfig) -> _,
        ),
        c("hartman_watson", false, hartman_watson),
        c("exact_half", true, exact_half),
        c("exp_time", true, exp_time),
        c("mixture", true, mixture),
        c("martingale", true, martingale),
        c("measure_change", true, measure_change),
        c("moment", true, moment),
        c("laplace_triangle", true, laplace_triangle),
        c("general_drift", true, general_drift),
        c("representation", true, representation),
        c("symmetry", false, symmetry),
        c("determinism", true, determinism),
    ]
}

/// Runs `checks` in parallel and returns their reports in registration
/// order. A check that errors yields one failed report; the rest still run.
/// When more than ten Monte Carlo reports are produced, each carries a
/// Bonferroni note.
pub fn run_checks(checks: &[Check], cfg: &SuiteConfig) -> Result<Vec<TestReport>> {
    cfg.validate()?;
    let results = with_threads(cfg.threads, || {
        map_slice(checks, |k| match (k.run)(cfg) {
            Ok(v) => v.into_iter().map(|r| (k.monte_carlo, r)).collect(),
            Err(e) => vec![(k.monte_carlo, TestReport::errored(k.name, &e))],
        })
    })?;
    let mut flat: Vec<(bool, TestReport)> = results.into_iter().flatten().collect();
    let mc = flat.iter().filter(|(m, _)| *m).count();
    if mc > 10 {
        let note = format!(
            "Bonferroni: {mc} Monte Carlo reports at 3 sigma, family-wise false-alarm rate up to {:.1}%",
            100.0 * mc as f64 * 0.0027
        );
        for (m, r) in flat.iter_mut() {
            if *m {
                r.append_details(&note);
            }
        }
    }
    Ok(flat.into_iter().map(|(_, r)| r).collect())
}

/// Runs the registered checks selected by `cfg.only` (all when empty).
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<TestReport>> {
    cfg.validate()?;
    let checks: Vec<Check> = registry()
        .into_iter()
        .filter(|c| cfg.only.is_empty() || cfg.only.iter().any(|o| o == c.name))
        .collect();
    run_checks(&checks, cfg)
}
