use std::io::{self, Write};

use crate::parallel::map_slice;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    ExactHalf,
    ExpTime,
    GeneralMc,
    Lognormal,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::ExactHalf => "exact_half",
            CurveKind::ExpTime => "exp_time",
            CurveKind::GeneralMc => "general_mc",
            CurveKind::Lognormal => "lognormal",
        }
    }
}

/// Density values on a strictly increasing grid of positive abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub kind: CurveKind,
    /// Free-form `key=value` description written into the CSV header.
    pub params: String,
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
    /// Trapezoid integral of the curve over its grid.
    pub total_mass: f64,
}

impl DensityCurve {
    pub fn new(
        kind: CurveKind,
        params: impl Into<String>,
        abscissae: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if abscissae.len() != values.len() || abscissae.is_empty() {
            return Err(Error::invalid(
                "abscissae and values must have equal nonzero length",
            ));
        }
        if !(abscissae[0] > 0.0) || abscissae.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(
                "abscissae must be positive and strictly increasing",
            ));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid("density values must be finite and >= 0"));
        }
        let total_mass = trapezoid(&abscissae, &values);
        Ok(DensityCurve {
            kind,
            params: params.into(),
            abscissae,
            values,
            total_mass,
        })
    }

    /// Evaluates `f` at every grid point (in parallel) and builds the curve.
    pub fn from_fn<F>(
        kind: CurveKind,
        params: impl Into<String>,
        grid: Vec<f64>,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync + Send,
    {
        let values: Result<Vec<f64>> = map_slice(&grid, |&x| f(x)).into_iter().collect();
        Self::new(kind, params, grid, values?)
    }

    /// Cumulative trapezoid integral at each abscissa (starting at 0).
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.values.len());
        out.push(0.0);
        for i in 1..self.values.len() {
            acc += 0.5
                * (self.values[i] + self.values[i - 1])
                * (self.abscissae[i] - self.abscissae[i - 1]);
            out.push(acc);
        }
        out
    }

    /// A CDF built from the cumulative integral: 0 below the grid, linear
    /// between grid points, and the total mass above the grid.
    pub fn cdf(&self) -> impl Fn(f64) -> f64 + '_ {
        let cum = self.cumulative();
        move |x| {
            let xs = &self.abscissae;
            if x <= xs[0] {
                return 0.0;
            }
            if x >= xs[xs.len() - 1] {
                return cum[cum.len() - 1];
            }
            let j = xs.partition_point(|&a| a <= x);
            let (x0, x1) = (xs[j - 1], xs[j]);
            cum[j - 1] + (cum[j] - cum[j - 1]) * (x - x0) / (x1 - x0)
        }
    }

    /// CSV `x,density` preceded by `# kind=... params=... mass=...`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "# kind={} params={} mass={}",
            self.kind.as_str(),
            self.params,
            self.total_mass
        )?;
        writeln!(w, "x,density")?;
        for (x, v) in self.abscissae.iter().zip(&self.values) {
            writeln!(w, "{x},{v}")?;
        }
        Ok(())
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(a, b)| 0.5 * (b[0] + b[1]) * (a[1] - a[0]))
        .sum()
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || n < 2 {
        return Err(Error::invalid(format!(
            "log grid needs 0 < lo < hi and n >= 2, got lo={lo}, hi={hi}, n={n}"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (a + step * i as f64).exp()
            }
        })
        .collect())
}

/// Log-spaced grid covering the lognormal envelope e^{μt ± 6√t}.
pub fn support_grid(mu: f64, t: f64, n: usize) -> Result<Vec<f64>> {
    let s = 6.0 * t.sqrt();
    log_grid((mu * t - s).exp(), (mu * t + s).exp(), n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_validation_and_mass() {
        let xs = vec![1.0, 2.0, 3.0];
        let c = DensityCurve::new(CurveKind::Lognormal, "a=1", xs.clone(), vec![0.0, 1.0, 0.0])
            .unwrap();
        assert_eq!(c.total_mass, 1.0);
        assert_eq!(c.cumulative(), vec![0.0, 0.5, 1.0]);
        let f = c.cdf();
        assert_eq!(f(0.5), 0.0);
        assert_eq!(f(1.5), 0.25);
        assert_eq!(f(9.0), 1.0);
        assert!(
            DensityCurve::new(CurveKind::Lognormal, "", vec![1.0, 1.0], vec![0.0, 0.0]).is_err()
        );
        assert!(
            DensityCurve::new(CurveKind::Lognormal, "", xs.clone(), vec![0.0, -1.0, 0.0]).is_err()
        );
        assert!(DensityCurve::new(CurveKind::Lognormal, "", xs, vec![0.0]).is_err());
    }

    #[test]
    fn csv_header() {
        let c = DensityCurve::new(
            CurveKind::ExpTime,
            "x=1 lambda=1",
            vec![1.0, 2.0],
            vec![0.5, 0.25],
        )
        .unwrap();
        let mut out = Vec::new();
        c.write_csv(&mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert_eq!(
            s,
            "# kind=exp_time params=x=1 lambda=1 mass=0.375\nx,density\n1,0.5\n2,0.25\n"
        );
    }

    #[test]
    fn grids() {
        let g = log_grid(0.1, 10.0, 3).unwrap();
        assert!((g[1] - 1.0).abs() < 1e-15);
        assert_eq!(g[2], 10.0);
        assert!(log_grid(1.0, 1.0, 5).is_err());
        let s = support_grid(0.0, 1.0, 200).unwrap();
        assert_eq!(s.len(), 200);
        assert!((s[0] - (-6f64).exp()).abs() < 1e-15);
    }
}
