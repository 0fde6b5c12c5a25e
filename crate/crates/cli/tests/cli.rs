use std::fs;
use std::process::{Command, Output};

fn verhulst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verhulst"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    let tail = text
        .split(&format!("{key}="))
        .nth(1)
        .unwrap_or_else(|| panic!("no {key} in {text}"));
    tail.split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn exact_densities_integrate_to_one() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, extra) in [
        ("exact-half", ["--t", "1"]),
        ("exp-time", ["--lambda", "1"]),
    ] {
        let out = dir.path().join(format!("{kind}.csv"));
        let o = verhulst(&[
            "density",
            "--kind",
            kind,
            "--x",
            "1",
            extra[0],
            extra[1],
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{o:?}");
        let s = stdout(&o);
        assert!((field(&s, "quadrature_mass") - 1.0).abs() < 1e-6, "{s}");
        assert!((field(&s, "total_mass") - 1.0).abs() < 5e-3, "{s}");
        let csv = fs::read_to_string(&out).unwrap();
        assert!(csv.lines().count() > 100);
    }
}

#[test]
fn lognormal_to_stdout() {
    let o = verhulst(&[
        "density",
        "--kind",
        "lognormal",
        "--mu",
        "-0.3",
        "--points",
        "50",
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.lines().filter(|l| !l.starts_with('#')).count() >= 50);
}

#[test]
fn seeded_simulation_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let p = dir.path().join(name);
        let o = verhulst(&[
            "--seed",
            "17",
            "--threads",
            threads,
            "simulate",
            "--mu",
            "0.2",
            "--beta",
            "0.5",
            "--n",
            "3000",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{o:?}");
        fs::read(p).unwrap()
    };
    assert_eq!(run("a.csv", "1"), run("b.csv", "4"));
}

#[test]
fn single_path_has_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("path.csv");
    let o = verhulst(&[
        "--seed",
        "5",
        "simulate",
        "--x",
        "2",
        "--t",
        "0.5",
        "--dt",
        "0.01",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    let csv = fs::read_to_string(&p).unwrap();
    let rows = csv.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(rows, 51);
}

#[test]
fn geometric_brownian_mean() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("gbm.csv");
    let o = verhulst(&[
        "--seed",
        "9",
        "simulate",
        "--mu",
        "0",
        "--n",
        "20000",
        "--t",
        "1",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    // beta = 0, mu = 0: E e^{B_1} = e^{1/2}
    let (m, se) = (field(&s, "mean_theta_T"), field(&s, "stderr"));
    assert!((m - 0.5f64.exp()).abs() < 4.0 * se, "{s}");
}

#[test]
fn missing_seed_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.csv");
    let o = verhulst(&["simulate", "--n", "200", "--out", p.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("# seed="));
}

#[test]
fn laplace_without_crowding_reports_error() {
    let o = verhulst(&[
        "--seed", "1", "laplace", "--lambda", "1", "--beta", "0", "--n", "500",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let s = stdout(&o);
    assert!(s.contains("prop7,") && s.contains("direct,"));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[invalid-parameter]"));
}

#[test]
fn usage_and_domain_errors_exit_two() {
    assert_eq!(
        verhulst(&["density", "--kind", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        verhulst(&["validate", "--only", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        verhulst(&["--threads", "0", "validate"]).status.code(),
        Some(2)
    );
    let o = verhulst(&["density", "--kind", "exact-half", "--t", "0.05"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error[domain]"));
}

#[test]
fn failed_command_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("never.csv");
    let o = verhulst(&["simulate", "--dt", "-1", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!p.exists());
}

#[test]
fn validate_subset_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("report.csv");
    let o = verhulst(&[
        "--seed",
        "3",
        "validate",
        "--only",
        "martingale,symmetry",
        "--scale",
        "0.02",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert!(
        o.status.code() == Some(0) || o.status.code() == Some(1),
        "{o:?}"
    );
    assert!(stdout(&o).contains("checks passed"));
    let csv = fs::read_to_string(&p).unwrap();
    assert!(csv.starts_with("name,statistic,threshold,passed,details"));
    assert_eq!(csv.lines().count(), 4);
}
