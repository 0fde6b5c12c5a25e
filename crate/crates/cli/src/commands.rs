use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use verhulst::density::{
    density_exact_half, density_exp_time, density_general_mc, exact_half_mass, exp_time_mass,
    log_grid, lognormal_density, CurveKind, DensityCurve, KernelVariant,
};
use verhulst::parallel::with_threads;
use verhulst::simulate::{
    direct_laplace_mc, laplace_prop1_mc, laplace_prop7_mc, simulate_functional, simulate_sde_euler,
    terminal_samples, ModelParams, Prop1Horizon, TimeGrid,
};
use verhulst::specfun::QuadConfig;
use verhulst::stats::McEstimate;
use verhulst::validate::{run_suite, summary, write_reports_csv, SuiteConfig};

use crate::{
    Cli, Command, DensityArgs, DensityKind, HorizonArg, LaplaceArgs, QuadArgs, SimulateArgs,
    ValidateArgs, VariantArg,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] verhulst::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Model(e) => e.kind(),
            CliError::Io { .. } => "io",
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Dispatches a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let threads = cli.threads.map(|t| t as usize);
    let seed = cli.seed;
    let outcome = with_threads(threads, move || match cli.command {
        Command::Density(a) => cmd_density(&a, seed),
        Command::Laplace(a) => cmd_laplace(&a, seed),
        Command::Simulate(a) => cmd_simulate(&a, seed),
        Command::Validate(a) => cmd_validate(&a, seed, threads),
    });
    match outcome.map_err(CliError::from).and_then(|r| r) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            EXIT_USAGE
        }
    }
}

/// The given seed, or a fresh one from entropy that is echoed to stdout.
fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        println!("# seed={s}");
        s
    })
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed command never leaves a partial file. Without a
/// path, writes to stdout.
fn write_output<F>(path: Option<&Path>, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let Some(path) = path else {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        return f(&mut lock).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        });
    };
    let io_err = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        f(&mut w).map_err(io_err)?;
        w.flush().map_err(io_err)?;
    }
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn quad_config(q: &QuadArgs) -> Result<QuadConfig> {
    let cfg = QuadConfig {
        abs_tol: q.abs_tol,
        rel_tol: q.rel_tol,
        t_min_theta: q.t_min_theta,
        ..QuadConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn grid_or(a: &DensityArgs, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    Ok(log_grid(
        a.lo.unwrap_or(lo),
        a.hi.unwrap_or(hi),
        a.points.unwrap_or(points),
    )?)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(verhulst::Error::InvalidParameter(format!("{name} must be > 0, got {v}")).into())
    }
}

pub fn cmd_density(a: &DensityArgs, seed: Option<u64>) -> Result<u8> {
    let cfg = quad_config(&a.quad)?;
    check_positive("t", a.t)?;
    let (curve, quadrature_mass) = match a.kind {
        DensityKind::Lognormal => {
            ModelParams::new(a.mu, 0.0, 1.0)?;
            let s = 6.0 * a.t.sqrt();
            let grid = grid_or(a, (a.mu * a.t - s).exp(), (a.mu * a.t + s).exp(), 200)?;
            let c = DensityCurve::from_fn(
                CurveKind::Lognormal,
                format!("mu={},t={}", a.mu, a.t),
                grid,
                |x| lognormal_density(a.mu, a.t, x),
            )?;
            (c, None)
        }
        DensityKind::ExactHalf => {
            ModelParams::half_drift(a.x)?;
            if a.t < cfg.t_min_theta {
                return Err(verhulst::Error::Domain {
                    routine: "density",
                    reason: format!("t = {} below t_min_theta = {}", a.t, cfg.t_min_theta),
                }
                .into());
            }
            let c0 = a.x.ln() - 0.5 * a.t;
            let s = 6.0 * a.t.sqrt();
            let grid = grid_or(a, (c0 - s).exp(), (c0 + s).exp(), 200)?;
            let c = DensityCurve::from_fn(
                CurveKind::ExactHalf,
                format!("x={},t={}", a.x, a.t),
                grid,
                |w| density_exact_half(a.x, a.t, w, &cfg),
            )?;
            (c, Some(exact_half_mass(a.x, a.t, &cfg)?))
        }
        DensityKind::ExpTime => {
            ModelParams::half_drift(a.x)?;
            check_positive("lambda", a.lambda)?;
            let grid = grid_or(a, a.x * (-12f64).exp(), a.x * 5f64.exp(), 200)?;
            let c = DensityCurve::from_fn(
                CurveKind::ExpTime,
                format!("x={},lambda={}", a.x, a.lambda),
                grid,
                |z| density_exp_time(a.x, a.lambda, z),
            )?;
            (c, Some(exp_time_mass(a.x, a.lambda, &cfg)?))
        }
        DensityKind::GeneralMc => {
            ModelParams::new(a.mu, a.gamma, 1.0)?;
            check_positive("gamma", a.gamma)?;
            let grid = grid_or(a, 0.05, 8.0, 80)?;
            let seed = resolve_seed(seed);
            let variant = match a.variant {
                VariantArg::Unconditional => KernelVariant::Unconditional,
                VariantArg::EndpointConditional => KernelVariant::EndpointConditional,
            };
            let c = DensityCurve::from_fn(
                CurveKind::GeneralMc,
                format!(
                    "gamma={},mu={},t={},n={},steps={},variant={},seed={seed}",
                    a.gamma,
                    a.mu,
                    a.t,
                    a.n,
                    a.steps,
                    variant.name()
                ),
                grid,
                |x| {
                    Ok(density_general_mc(
                        a.gamma, a.mu, a.t, x, a.n, seed, a.steps, &cfg, variant,
                    )?
                    .mean)
                },
            )?;
            (c, None)
        }
    };
    write_output(a.out.as_deref(), |w| curve.write_csv(w))?;
    if a.out.is_some() {
        match quadrature_mass {
            Some(q) => println!("total_mass={} quadrature_mass={q}", curve.total_mass),
            None => println!("total_mass={}", curve.total_mass),
        }
    } else if let Some(q) = quadrature_mass {
        println!("# quadrature_mass={q}");
    }
    Ok(EXIT_OK)
}

pub fn cmd_laplace(a: &LaplaceArgs, seed: Option<u64>) -> Result<u8> {
    let params = ModelParams::new(a.mu, a.beta, a.x0)?;
    let grid = TimeGrid::with_step(a.t, a.dt)?;
    if !(a.lambda >= 0.0 && a.lambda.is_finite()) {
        return Err(verhulst::Error::InvalidParameter(format!(
            "lambda must be >= 0, got {}",
            a.lambda
        ))
        .into());
    }
    let seed = resolve_seed(seed);
    let horizon = match a.horizon {
        HorizonArg::Literal => Prop1Horizon::Literal,
        HorizonArg::Rescaled => Prop1Horizon::Rescaled,
    };
    let p7 = laplace_prop7_mc(a.lambda, &params, &grid, a.n, seed)?;
    let direct = direct_laplace_mc(a.lambda, &params, &grid, a.n, seed.wrapping_add(1))?;
    let p1 = laplace_prop1_mc(a.lambda, &params, a.t, a.n, seed.wrapping_add(2), horizon);
    let mut rows: Vec<(String, McEstimate)> = Vec::new();
    if let Ok(e) = &p1 {
        rows.push(("prop1".into(), *e));
    }
    rows.push(("prop7".into(), p7));
    rows.push(("direct".into(), direct));
    let table = |w: &mut dyn Write| -> io::Result<()> {
        writeln!(w, "estimator,mean,stderr,n")?;
        for (name, e) in &rows {
            writeln!(w, "{name},{},{},{}", e.mean, e.stderr, e.n)?;
        }
        Ok(())
    };
    write_output(None, table)?;
    if let Some(path) = a.out.as_deref() {
        write_output(Some(path), table)?;
    }
    println!("# prop1 horizon={}", horizon.name());
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            println!(
                "# z({},{})={:.3}",
                rows[i].0,
                rows[j].0,
                rows[i].1.z_against(&rows[j].1)
            );
        }
    }
    p1?;
    Ok(EXIT_OK)
}

pub fn cmd_simulate(a: &SimulateArgs, seed: Option<u64>) -> Result<u8> {
    let params = match a.x {
        Some(x) => ModelParams::half_drift(x)?,
        None => ModelParams::new(a.mu, a.beta, a.x0)?,
    };
    let grid = TimeGrid::with_step(a.t, a.dt)?;
    if a.n == 0 {
        return Err(verhulst::Error::InvalidParameter("n must be at least 1".into()).into());
    }
    if a.euler && a.n != 1 {
        return Err(verhulst::Error::InvalidParameter(
            "--euler writes a single path; use n = 1".into(),
        )
        .into());
    }
    let seed = resolve_seed(seed);
    if a.n == 1 {
        let path = if a.euler {
            simulate_sde_euler(&params, &grid, seed)
        } else {
            simulate_functional(&params, &grid, seed)
        };
        write_output(Some(&a.out), |w| path.write_csv(w))?;
        println!(
            "theta_T={} guard_events={}",
            path.terminal().theta,
            path.guard_events
        );
    } else {
        let xs = terminal_samples(&params, &grid, a.n, seed)?;
        write_output(Some(&a.out), |w| {
            writeln!(w, "replicate,theta_T")?;
            for (i, x) in xs.iter().enumerate() {
                writeln!(w, "{i},{x}")?;
            }
            Ok(())
        })?;
        let e = McEstimate::from_samples(&xs);
        println!("mean_theta_T={} stderr={} n={}", e.mean, e.stderr, e.n);
    }
    Ok(EXIT_OK)
}

pub fn cmd_validate(a: &ValidateArgs, seed: Option<u64>, threads: Option<usize>) -> Result<u8> {
    let mut cfg = SuiteConfig {
        only: a.only.clone(),
        scale: a.scale,
        threads,
        ..SuiteConfig::default()
    };
    cfg.validate()?;
    cfg.seed = resolve_seed(seed);
    let reports = run_suite(&cfg)?;
    print!("{}", summary(&reports));
    if let Some(path) = a.out.as_deref() {
        write_output(Some(path), |w| {
            write_reports_csv(&reports, w).map_err(io::Error::other)
        })?;
    }
    Ok(if reports.iter().all(|r| r.passed()) {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}
