//! Pass/fail checks of the closed-form results against quadrature and Monte
//! Carlo oracles, and the suite that runs them.

mod cdf;
mod identities;
mod stochastic;
mod suite;

pub use cdf::{ks_distance, CdfTable};
pub use identities::{
    bessel_product_check, hartman_watson_check, hartman_watson_tail_bound, mixture_check,
    z2_symmetry_check, MixtureConfig,
};
pub use stochastic::{
    exact_half_ks_check, exp_time_ks_check, general_drift_check, laplace_triangle_check,
    martingale_check, martingale_grid, measure_change_test, moment_check, representation_check,
    GeneralDriftConfig, RepresentationParams, TestFn,
};
pub use suite::{registry, run_checks, run_suite, Check, SuiteConfig};

use std::fmt;
use std::io;

use crate::Error;

/// Outcome of one check. `passed` holds exactly when `statistic <= threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    name: String,
    statistic: f64,
    threshold: f64,
    n_or_tolerance: String,
    passed: bool,
    details: String,
}

impl TestReport {
    pub fn new(
        name: impl Into<String>,
        statistic: f64,
        threshold: f64,
        n_or_tolerance: impl Into<String>,
        details: impl Into<String>,
    ) -> Self {
        TestReport {
            name: name.into(),
            statistic,
            threshold,
            n_or_tolerance: n_or_tolerance.into(),
            passed: statistic <= threshold,
            details: details.into(),
        }
    }

    /// A failed report carrying the error that stopped the check.
    pub fn errored(name: impl Into<String>, err: &Error) -> Self {
        Self::new(
            name,
            f64::NAN,
            f64::NAN,
            "-",
            format!("error[{}]: {err}", err.kind()),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn statistic(&self) -> f64 {
        self.statistic
    }
    pub fn threshold(&self) -> f64 {
        self.threshold
    }
    pub fn n_or_tolerance(&self) -> &str {
        &self.n_or_tolerance
    }
    pub fn passed(&self) -> bool {
        self.passed
    }
    pub fn details(&self) -> &str {
        &self.details
    }

    pub(crate) fn append_details(&mut self, note: &str) {
        if !self.details.is_empty() {
            self.details.push_str("; ");
        }
        self.details.push_str(note);
    }
}

impl fmt::Display for TestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<24} statistic={:.4e} threshold={:.4e} n={} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.statistic,
            self.threshold,
            self.n_or_tolerance,
            self.details
        )
    }
}

/// CSV `name,statistic,threshold,passed,details`.
pub fn write_reports_csv<W: io::Write>(reports: &[TestReport], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["name", "statistic", "threshold", "passed", "details"])?;
    for r in reports {
        out.write_record([
            r.name.as_str(),
            &r.statistic.to_string(),
            &r.threshold.to_string(),
            &r.passed.to_string(),
            &format!("n={}; {}", r.n_or_tolerance, r.details),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One line per report followed by a pass count.
pub fn summary(reports: &[TestReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&r.to_string());
        s.push('\n');
    }
    let ok = reports.iter().filter(|r| r.passed).count();
    s.push_str(&format!("{ok}/{} checks passed\n", reports.len()));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_threshold() {
        assert!(TestReport::new("a", 1.0, 1.0, "1", "").passed());
        assert!(!TestReport::new("a", 1.5, 1.0, "1", "").passed());
        let e = TestReport::errored("b", &Error::invalid("x"));
        assert!(!e.passed());
        assert!(e.details().starts_with("error[invalid-parameter]"));
    }

    #[test]
    fn csv_quotes_free_text() {
        let r = vec![TestReport::new("k", 0.5, 1.0, "10", "a, b")];
        let mut buf = Vec::new();
        write_reports_csv(&r, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "name,statistic,threshold,passed,details\nk,0.5,1,true,\"n=10; a, b\"\n"
        );
        assert!(summary(&r).ends_with("1/1 checks passed\n"));
    }
}
