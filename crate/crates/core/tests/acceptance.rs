//! One line per acceptance criterion, run at full sample budgets.

use std::process::ExitCode;

use verhulst::validate::{run_suite, SuiteConfig, TestReport};

const CRITERIA: [(u32, &str, &str); 13] = [
    (
        1,
        "bessel_product",
        "Bessel product formula against direct quadrature",
    ),
    (2, "hartman_watson", "Hartman-Watson Laplace identity"),
    (
        3,
        "exact_half",
        "mu = -1/2 density: unit mass and KS against simulation",
    ),
    (
        4,
        "exp_time",
        "exponential-time density: unit mass and KS against simulation",
    ),
    (
        5,
        "mixture",
        "exponential-time density as a time mixture of the exact law",
    ),
    (6, "martingale", "exponential martingale has unit mean"),
    (
        7,
        "measure_change",
        "measure change between crowding levels",
    ),
    (
        8,
        "moment",
        "exponential moment of the integrated process in closed form",
    ),
    (
        9,
        "laplace_triangle",
        "three Laplace-transform estimators agree",
    ),
    (
        10,
        "general_drift",
        "general-drift density by kernel Monte Carlo",
    ),
    (
        11,
        "representation",
        "pathwise representation identity and step refinement",
    ),
    (12, "symmetry", "z -> 2/z symmetry of the Laplace kernel"),
    (
        13,
        "determinism",
        "bit-identical results across worker counts",
    ),
];

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let reports = run_suite(&cfg).expect("suite runs");
    let mut failed = Vec::new();
    for (id, check, what) in CRITERIA {
        let mine: Vec<&TestReport> = reports
            .iter()
            .filter(|r| r.name() == check || r.name().starts_with(&format!("{check}_")))
            .collect();
        let ok = !mine.is_empty() && mine.iter().all(|r| r.passed());
        let stats: Vec<String> = mine
            .iter()
            .map(|r| format!("{}={:.3e}/{:.1e}", r.name(), r.statistic(), r.threshold()))
            .collect();
        println!(
            "criterion {id:>2} {} {check}: {what} [{}]",
            if ok { "PASS" } else { "FAIL" },
            stats.join(", ")
        );
        if !ok {
            failed.push(id);
            for r in &mine {
                println!("    {r}");
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        CRITERIA.len() - failed.len(),
        CRITERIA.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
