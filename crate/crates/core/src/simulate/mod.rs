//! Monte Carlo oracles for the Verhulst process
//!
//! θ_t = x₀ e^{B_t+μt} / (1 + β a_t),  a_t = ∫₀^t e^{B_s+μs} ds,
//!
//! which solves dθ = θ dB + ((μ + ½)θ − (β/x₀)θ²) dt.

mod laplace;
mod path;
mod sampling;

pub use laplace::{direct_laplace_mc, laplace_prop1_mc, laplace_prop7_mc, Prop1Horizon};
pub use path::{
    euler_from_increments, functional_from_increments, girsanov_bound, girsanov_weight,
    simulate_functional, simulate_sde_euler, simulate_terminal, terminal_samples, PathSample,
    RunningIntegrals, Terminal, EULER_FLOOR,
};
pub use sampling::{sample_besq0, sample_bridge_integrals, sample_exp_time};

use crate::{Error, Result};

/// Which normalisation of the process a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Any μ, β ≥ 0 and x₀ > 0.
    Generic,
    /// μ = −½ and β = x₀ = x: θ_t(x) = x e^{B−t/2} / (1 + x ∫ e^{B−u/2} du).
    HalfDrift,
}

/// Drift μ, crowding β and start value x₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    mu: f64,
    beta: f64,
    x0: f64,
    mode: Mode,
}

impl ModelParams {
    pub fn new(mu: f64, beta: f64, x0: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::invalid(format!("mu must be finite, got {mu}")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::invalid(format!("beta must be >= 0, got {beta}")));
        }
        if !(x0 > 0.0 && x0.is_finite()) {
            return Err(Error::invalid(format!("x0 must be > 0, got {x0}")));
        }
        Ok(ModelParams {
            mu,
            beta,
            x0,
            mode: Mode::Generic,
        })
    }

    /// The start-x process with μ = −½ and β = x.
    pub fn half_drift(x: f64) -> Result<Self> {
        let mut p = Self::new(-0.5, x, x)?;
        p.mode = Mode::HalfDrift;
        Ok(p)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The coefficient of θ² in the SDE drift, β / x₀.
    pub fn crowding(&self) -> f64 {
        self.beta / self.x0
    }

    /// The generic process with the same μ and x₀ and SDE crowding `c`.
    pub fn with_crowding(&self, c: f64) -> Result<Self> {
        Self::new(self.mu, c * self.x0, self.x0)
    }

    pub(crate) fn require_start_one(&self, routine: &str) -> Result<()> {
        if self.x0 != 1.0 || self.mode != Mode::Generic {
            return Err(Error::invalid(format!(
                "{routine} is defined for the generic process started at 1"
            )));
        }
        Ok(())
    }
}

/// Uniform grid on [0, t_end].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_steps: usize) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::invalid(format!("t_end must be > 0, got {t_end}")));
        }
        if n_steps == 0 {
            return Err(Error::invalid("n_steps must be at least 1"));
        }
        Ok(TimeGrid { t_end, n_steps })
    }

    /// Grid on [0, t_end] with step at most `dt`.
    pub fn with_step(t_end: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::invalid(format!("dt must be > 0, got {dt}")));
        }
        Self::new(t_end, ((t_end / dt) - 1e-9).ceil().max(1.0) as usize)
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.n_steps as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i == self.n_steps {
            self.t_end
        } else {
            i as f64 * self.dt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, -1.0, 1.0).is_err());
        assert!(ModelParams::new(0.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0, 1.0).is_err());
        let p = ModelParams::half_drift(2.0).unwrap();
        assert_eq!(p.mu(), -0.5);
        assert_eq!(p.beta(), 2.0);
        assert_eq!(p.crowding(), 1.0);
        assert_eq!(p.mode(), Mode::HalfDrift);
        assert!(p.require_start_one("x").is_err());
    }

    #[test]
    fn grid() {
        let g = TimeGrid::with_step(1.0, 1e-3).unwrap();
        assert_eq!(g.n_steps(), 1000);
        assert_eq!(g.time(1000), 1.0);
        assert!(TimeGrid::new(1.0, 0).is_err());
        assert!(TimeGrid::new(-1.0, 3).is_err());
    }
}
