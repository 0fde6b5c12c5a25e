use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};

use super::TimeGrid;
use crate::{Error, Result};

/// Exact draw of a dimension-0 squared Bessel process at time `s` started
/// from `x_start`: Poisson(x/(2s)) mixed Gamma scaled by 2s, with an atom at 0.
pub fn sample_besq0<R: Rng + ?Sized>(x_start: f64, s: f64, rng: &mut R) -> Result<f64> {
    if !(x_start >= 0.0 && x_start.is_finite()) {
        return Err(Error::invalid(format!("start must be >= 0, got {x_start}")));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid(format!("time must be > 0, got {s}")));
    }
    if x_start == 0.0 {
        return Ok(0.0);
    }
    let rate = x_start / (2.0 * s);
    let n = Poisson::new(rate)
        .map_err(|e| Error::domain("sample_besq0", format!("Poisson({rate}): {e}")))?
        .sample(rng);
    if n == 0.0 {
        return Ok(0.0);
    }
    let g = Gamma::new(n, 1.0)
        .map_err(|e| Error::domain("sample_besq0", format!("Gamma({n}): {e}")))?
        .sample(rng);
    Ok(2.0 * s * g)
}

/// Exponential time of the given rate by inversion.
pub fn sample_exp_time<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> Result<f64> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::invalid(format!("rate must be > 0, got {rate}")));
    }
    // 1 - U lies in (0, 1], so the logarithm is finite.
    let u: f64 = 1.0 - rng.random::<f64>();
    Ok(-u.ln() / rate)
}

/// (a_T, A_T) along a Brownian bridge from 0 to `endpoint` over `grid`,
/// built forward node by node; trapezoid rule on the grid.
pub fn sample_bridge_integrals<R: Rng + ?Sized>(
    endpoint: f64,
    grid: &TimeGrid,
    rng: &mut R,
) -> (f64, f64) {
    let n = grid.n_steps();
    let dt = grid.dt();
    let half = 0.5 * dt;
    let t = grid.t_end();
    let (mut y, mut e) = (0.0f64, 1.0f64);
    let (mut a, mut big_a) = (0.0, 0.0);
    for i in 0..n {
        let left = t - i as f64 * dt;
        y = if i + 1 == n {
            endpoint
        } else {
            let frac = dt / left;
            let z: f64 = rng.sample(StandardNormal);
            y + (endpoint - y) * frac + (dt * (1.0 - frac)).sqrt() * z
        };
        let e_next = y.exp();
        a += half * (e + e_next);
        big_a += half * (e * e + e_next * e_next);
        e = e_next;
    }
    (a, big_a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parallel::replicate_rng;
    use crate::stats::McEstimate;

    #[test]
    fn besq0_zero_start_and_validation() {
        let mut rng = replicate_rng(1, 0);
        assert_eq!(sample_besq0(0.0, 0.5, &mut rng).unwrap(), 0.0);
        assert!(sample_besq0(-1.0, 0.5, &mut rng).is_err());
        assert!(sample_besq0(1.0, 0.0, &mut rng).is_err());
    }

    #[test]
    fn besq0_atom_and_mean() {
        let (x, s) = (1.3, 0.5);
        let n = 100_000u64;
        let draws: Vec<f64> = (0..n)
            .map(|i| sample_besq0(x, s, &mut replicate_rng(2, i)).unwrap())
            .collect();
        let zero: Vec<f64> = draws.iter().map(|&d| (d == 0.0) as u8 as f64).collect();
        let p0 = McEstimate::from_samples(&zero);
        assert!(p0.z_against_value((-x / (2.0 * s)).exp()) < 3.5, "{p0}");
        let m = McEstimate::from_samples(&draws);
        assert!(m.z_against_value(x) < 3.5, "{m}");
    }

    #[test]
    fn besq0_laplace_transform() {
        // E e^{-q R} = exp(-x q / (1 + 2 q s))
        let (x, s, q) = (2.0, 0.5, 0.7);
        let v: Vec<f64> = (0..50_000u64)
            .map(|i| (-q * sample_besq0(x, s, &mut replicate_rng(3, i)).unwrap()).exp())
            .collect();
        let m = McEstimate::from_samples(&v);
        assert!(
            m.z_against_value((-x * q / (1.0 + 2.0 * q * s)).exp()) < 3.5,
            "{m}"
        );
    }

    #[test]
    fn exp_time_mean_and_memorylessness() {
        let rate = 2.0;
        let d: Vec<f64> = (0..100_000u64)
            .map(|i| sample_exp_time(rate, &mut replicate_rng(4, i)).unwrap())
            .collect();
        assert!(McEstimate::from_samples(&d).z_against_value(0.5) < 3.5);
        let over: Vec<f64> = d.iter().filter(|&&x| x > 0.4).map(|x| x - 0.4).collect();
        assert!(McEstimate::from_samples(&over).z_against_value(0.5) < 3.5);
        assert!(sample_exp_time(0.0, &mut replicate_rng(0, 0)).is_err());
    }

    #[test]
    fn bridge_hits_endpoint_and_matches_free_path_mean() {
        // Averaging the bridge over a N(0, t) endpoint recovers E a_t = ∫ e^{s/2} ds.
        let g = TimeGrid::new(1.0, 200).unwrap();
        let v: Vec<f64> = (0..40_000u64)
            .map(|i| {
                let mut rng = replicate_rng(5, i);
                let w: f64 = rng.sample(StandardNormal);
                sample_bridge_integrals(w, &g, &mut rng).0
            })
            .collect();
        let m = McEstimate::from_samples(&v);
        assert!(m.z_against_value(2.0 * (0.5f64.exp() - 1.0)) < 3.5, "{m}");
    }
}
