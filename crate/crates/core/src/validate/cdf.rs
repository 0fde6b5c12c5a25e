use crate::parallel::map_slice;
use crate::quad::gl16;
use crate::{Error, Result};

/// Kolmogorov–Smirnov distance sup |F_n − F| between the empirical CDF of
/// sorted `samples` and `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("KS distance needs at least one sample"));
    }
    if samples.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::invalid("KS samples must be sorted and free of NaN"));
    }
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// CDF of a density on (0, ∞), tabulated on equal panels in u = ln w.
///
/// Panel masses come from 16-point Gauss–Legendre; between edges the CDF is
/// the cubic Hermite interpolant in u using dF/du = w·p(w). Below the first
/// edge it is 0, above the last it is the tabulated mass.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable {
    u: Vec<f64>,
    f: Vec<f64>,
    d: Vec<f64>,
}

impl CdfTable {
    /// Tabulates `density` on `[lo, hi]` with `panels` panels; points are
    /// evaluated in parallel.
    pub fn from_density<F>(density: F, lo: f64, hi: f64, panels: usize) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync + Send,
    {
        if !(lo > 0.0 && hi > lo) || panels == 0 {
            return Err(Error::invalid(format!(
                "CDF table needs 0 < lo < hi and panels > 0, got lo={lo}, hi={hi}, panels={panels}"
            )));
        }
        let rule = gl16();
        let m = rule.nodes.len();
        let (a, b) = (lo.ln(), hi.ln());
        let h = (b - a) / panels as f64;
        let u: Vec<f64> = (0..=panels).map(|k| a + h * k as f64).collect();
        // edges first, then panel nodes
        let mut pts = u.clone();
        for &uk in &u[..panels] {
            let mid = uk + 0.5 * h;
            pts.extend(rule.nodes.iter().map(|x| mid + 0.5 * h * x));
        }
        let vals: Vec<Result<f64>> = map_slice(&pts, |&v| {
            let w = v.exp();
            density(w).map(|p| p * w)
        });
        let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
        let d = vals[..=panels].to_vec();
        let mut f = Vec::with_capacity(panels + 1);
        f.push(0.0);
        for k in 0..panels {
            let chunk = &vals[panels + 1 + k * m..panels + 1 + (k + 1) * m];
            let s: f64 = chunk.iter().zip(&rule.weights).map(|(v, w)| v * w).sum();
            f.push(f[k] + 0.5 * h * s);
        }
        Ok(CdfTable { u, f, d })
    }

    /// Tabulated total mass on `[lo, hi]`.
    pub fn mass(&self) -> f64 {
        *self.f.last().unwrap()
    }

    pub fn cdf(&self, w: f64) -> f64 {
        if !(w > 0.0) {
            return 0.0;
        }
        let v = w.ln();
        let n = self.u.len();
        if v <= self.u[0] {
            return 0.0;
        }
        if v >= self.u[n - 1] {
            return self.f[n - 1];
        }
        let j = self.u.partition_point(|&a| a <= v).min(n - 1);
        let (u0, u1) = (self.u[j - 1], self.u[j]);
        let h = u1 - u0;
        let s = (v - u0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.f[j - 1] + h10 * h * self.d[j - 1] + h01 * self.f[j] + h11 * h * self.d[j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::lognormal_density;
    use crate::parallel::replicate_rng;
    use rand::Rng;

    #[test]
    fn ks_trivial_cases() {
        assert_eq!(ks_distance(&[0.0], |_| 0.5).unwrap(), 0.5);
        assert_eq!(ks_distance(&[0.1, 0.2, 0.3], |_| 0.0).unwrap(), 1.0);
        assert!(ks_distance(&[], |_| 0.0).is_err());
        assert!(ks_distance(&[2.0, 1.0], |_| 0.0).is_err());
    }

    #[test]
    fn ks_of_exact_samples_is_small() {
        let n = 10_000;
        let mut rng = replicate_rng(3, 0);
        let mut xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        xs.sort_by(f64::total_cmp);
        let d = ks_distance(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(d < 1.63 / (n as f64).sqrt(), "{d}");
    }

    #[test]
    fn table_reproduces_lognormal_cdf() {
        let t = CdfTable::from_density(
            |w| lognormal_density(0.0, 1.0, w),
            (-8f64).exp(),
            8f64.exp(),
            80,
        )
        .unwrap();
        assert!((t.mass() - 1.0).abs() < 1e-12);
        // Φ(0.5) at w = e^{0.5}
        let want = 0.691_462_461_274_013_1;
        assert!((t.cdf(0.5f64.exp()) - want).abs() < 1e-5);
        assert!((t.cdf(1.0) - 0.5).abs() < 1e-12);
        assert_eq!(t.cdf(1e-9), 0.0);
        assert_eq!(t.cdf(1e9), t.mass());
    }
}
