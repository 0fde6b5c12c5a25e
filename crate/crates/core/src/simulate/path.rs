use std::io::{self, Write};

use rand::Rng;
use rand_distr::StandardNormal;

use super::{ModelParams, TimeGrid};
use crate::parallel::{mc_map, replicate_rng};
use crate::{Error, Result};

/// Euler iterates that fall to or below zero are reset to this multiple of x₀.
pub const EULER_FLOOR: f64 = 1e-12;

/// Path functionals at the final grid node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Terminal {
    pub theta: f64,
    /// B_T + μT.
    pub bmd: f64,
    pub int_theta: f64,
    pub int_theta_sq: f64,
    /// a_T = ∫ e^{B+μs} ds.
    pub a: f64,
    /// A_T = ∫ e^{2(B+μs)} ds.
    pub big_a: f64,
}

/// Running values of the four trapezoid integrals at one grid node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunningIntegrals {
    pub int_theta: f64,
    pub int_theta_sq: f64,
    pub a: f64,
    pub big_a: f64,
}

/// A discretised trajectory with its running integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub grid: TimeGrid,
    pub theta: Vec<f64>,
    pub bmd: Vec<f64>,
    pub running: Vec<RunningIntegrals>,
    pub int_theta: f64,
    pub int_theta_sq: f64,
    pub a_t: f64,
    pub big_a_t: f64,
    /// Number of Euler steps that needed the positivity floor (0 for the
    /// exact functional).
    pub guard_events: u64,
}

impl PathSample {
    pub fn terminal(&self) -> Terminal {
        Terminal {
            theta: *self.theta.last().unwrap(),
            bmd: *self.bmd.last().unwrap(),
            int_theta: self.int_theta,
            int_theta_sq: self.int_theta_sq,
            a: self.a_t,
            big_a: self.big_a_t,
        }
    }

    /// CSV with header `t,theta,bmd,int_theta,int_theta_sq,a_t,A_t`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,theta,bmd,int_theta,int_theta_sq,a_t,A_t")?;
        for (i, r) in self.running.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                self.grid.time(i),
                self.theta[i],
                self.bmd[i],
                r.int_theta,
                r.int_theta_sq,
                r.a,
                r.big_a
            )?;
        }
        Ok(())
    }
}

/// Running state shared by the exact functional and the Euler scheme: the
/// drifted Brownian motion, e^{bmd}, and the trapezoid integrals.
#[derive(Clone, Copy)]
struct State {
    bmd: f64,
    e: f64,
    theta: f64,
    acc: RunningIntegrals,
}

struct Consts {
    x0: f64,
    beta: f64,
    mu: f64,
    c: f64,
    dt: f64,
    half_dt: f64,
}

impl Consts {
    fn new(p: &ModelParams, g: &TimeGrid) -> Self {
        let dt = g.dt();
        Consts {
            x0: p.x0(),
            beta: p.beta(),
            mu: p.mu(),
            c: p.crowding(),
            dt,
            half_dt: 0.5 * dt,
        }
    }
}

impl State {
    fn start(x0: f64) -> Self {
        State {
            bmd: 0.0,
            e: 1.0,
            theta: x0,
            acc: RunningIntegrals::default(),
        }
    }

    #[inline]
    fn advance_gbm(&mut self, db: f64, k: &Consts) -> f64 {
        self.bmd += db + k.mu * k.dt;
        let e = self.bmd.exp();
        self.acc.a += k.half_dt * (self.e + e);
        self.acc.big_a += k.half_dt * (self.e * self.e + e * e);
        self.e = e;
        e
    }

    #[inline]
    fn set_theta(&mut self, theta: f64, k: &Consts) {
        self.acc.int_theta += k.half_dt * (self.theta + theta);
        self.acc.int_theta_sq += k.half_dt * (self.theta * self.theta + theta * theta);
        self.theta = theta;
    }

    #[inline]
    fn step_functional(&mut self, db: f64, k: &Consts) {
        let e = self.advance_gbm(db, k);
        let theta = k.x0 * e / (1.0 + k.beta * self.acc.a);
        self.set_theta(theta, k);
    }

    /// One Euler step; returns true when the positivity floor was used.
    #[inline]
    fn step_euler(&mut self, db: f64, k: &Consts) -> bool {
        let th = self.theta;
        let mut next = th + th * db + ((k.mu + 0.5) * th - k.c * th * th) * k.dt;
        let guarded = next <= 0.0;
        if guarded {
            next = EULER_FLOOR * k.x0;
        }
        self.advance_gbm(db, k);
        self.set_theta(next, k);
        guarded
    }

    fn terminal(&self) -> Terminal {
        Terminal {
            theta: self.theta,
            bmd: self.bmd,
            int_theta: self.acc.int_theta,
            int_theta_sq: self.acc.int_theta_sq,
            a: self.acc.a,
            big_a: self.acc.big_a,
        }
    }
}

/// Terminal functionals of one exact-functional path drawn from `rng`.
pub fn simulate_terminal<R: Rng + ?Sized>(
    params: &ModelParams,
    grid: &TimeGrid,
    rng: &mut R,
) -> Terminal {
    let k = Consts::new(params, grid);
    let sd = k.dt.sqrt();
    let mut s = State::start(k.x0);
    for _ in 0..grid.n_steps() {
        let z: f64 = rng.sample(StandardNormal);
        s.step_functional(sd * z, &k);
    }
    s.terminal()
}

fn draw_increments(grid: &TimeGrid, seed: u64) -> Vec<f64> {
    let mut rng = replicate_rng(seed, 0);
    let sd = grid.dt().sqrt();
    (0..grid.n_steps())
        .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

fn check_increments(grid: &TimeGrid, db: &[f64]) -> Result<()> {
    if db.len() != grid.n_steps() {
        return Err(Error::invalid(format!(
            "expected {} increments, got {}",
            grid.n_steps(),
            db.len()
        )));
    }
    Ok(())
}

fn record<F>(params: &ModelParams, grid: &TimeGrid, db: &[f64], mut step: F) -> PathSample
where
    F: FnMut(&mut State, f64, &Consts) -> bool,
{
    let k = Consts::new(params, grid);
    let n = grid.n_steps() + 1;
    let mut s = State::start(k.x0);
    let mut theta = Vec::with_capacity(n);
    let mut bmd = Vec::with_capacity(n);
    let mut running = Vec::with_capacity(n);
    theta.push(s.theta);
    bmd.push(0.0);
    running.push(s.acc);
    let mut guard_events = 0;
    for &d in db {
        if step(&mut s, d, &k) {
            guard_events += 1;
        }
        theta.push(s.theta);
        bmd.push(s.bmd);
        running.push(s.acc);
    }
    PathSample {
        grid: *grid,
        theta,
        bmd,
        running,
        int_theta: s.acc.int_theta,
        int_theta_sq: s.acc.int_theta_sq,
        a_t: s.acc.a,
        big_a_t: s.acc.big_a,
        guard_events,
    }
}

/// The exact functional driven by the given Brownian increments.
pub fn functional_from_increments(
    params: &ModelParams,
    grid: &TimeGrid,
    db: &[f64],
) -> Result<PathSample> {
    check_increments(grid, db)?;
    Ok(record(params, grid, db, |s, d, k| {
        s.step_functional(d, k);
        false
    }))
}

/// The Euler–Maruyama scheme driven by the given Brownian increments.
pub fn euler_from_increments(
    params: &ModelParams,
    grid: &TimeGrid,
    db: &[f64],
) -> Result<PathSample> {
    check_increments(grid, db)?;
    Ok(record(params, grid, db, |s, d, k| s.step_euler(d, k)))
}

/// One path of the exact functional. Uses replicate stream 0 of `seed`, so
/// it coincides with replicate 0 of [`terminal_samples`], and shares its
/// increments with [`simulate_sde_euler`] under the same seed.
pub fn simulate_functional(params: &ModelParams, grid: &TimeGrid, seed: u64) -> PathSample {
    let db = draw_increments(grid, seed);
    record(params, grid, &db, |s, d, k| {
        s.step_functional(d, k);
        false
    })
}

/// One Euler–Maruyama path of dθ = θ dB + ((μ+½)θ − (β/x₀)θ²) dt.
pub fn simulate_sde_euler(params: &ModelParams, grid: &TimeGrid, seed: u64) -> PathSample {
    let db = draw_increments(grid, seed);
    record(params, grid, &db, |s, d, k| s.step_euler(d, k))
}

/// θ_T for replicates `0..n`.
pub fn terminal_samples(
    params: &ModelParams,
    grid: &TimeGrid,
    n: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    mc_map(n, seed, |rng, _| {
        Ok(simulate_terminal(params, grid, rng).theta)
    })
}

/// The Girsanov density M_T turning crowding β/x₀ into β/x₀ + γ:
/// exp(−γ(θ_T − x₀) + γ(μ+½)∫θ − (γβ/x₀ + γ²/2)∫θ²).
pub fn girsanov_weight(path: &Terminal, gamma: f64, params: &ModelParams) -> Result<f64> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!("gamma must be >= 0, got {gamma}")));
    }
    let log_m = -gamma * (path.theta - params.x0()) + gamma * (params.mu() + 0.5) * path.int_theta
        - (gamma * params.crowding() + 0.5 * gamma * gamma) * path.int_theta_sq;
    Ok(log_m.exp())
}

/// Deterministic upper bound on [`girsanov_weight`] over horizon `t`.
pub fn girsanov_bound(gamma: f64, params: &ModelParams, t: f64) -> f64 {
    let k = gamma * params.crowding() + 0.5 * gamma * gamma;
    let g = gamma * (params.mu() + 0.5);
    (gamma * params.x0() + g * g * t / (4.0 * k)).exp()
}
