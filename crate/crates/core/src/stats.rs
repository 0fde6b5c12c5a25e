use crate::parallel::Moments;

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

impl McEstimate {
    /// Estimate for channel `k` of accumulated moments. The standard error
    /// uses the unbiased sample variance and is zero when n < 2.
    pub fn from_moments(m: &Moments, k: usize) -> Self {
        let n = m.n as f64;
        let mean = m.sum[k] / n;
        let stderr = if m.n >= 2 {
            let var = ((m.sum_sq[k] - n * mean * mean) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        McEstimate {
            mean,
            stderr,
            n: m.n,
        }
    }

    /// Builds an estimate directly from a sample.
    pub fn from_samples(xs: &[f64]) -> Self {
        let mut m = Moments::new(1);
        m.n = xs.len() as u64;
        for x in xs {
            m.sum[0] += x;
            m.sum_sq[0] += x * x;
        }
        Self::from_moments(&m, 0)
    }

    /// Multiplies mean and standard error by a constant.
    pub fn scale(self, c: f64) -> Self {
        McEstimate {
            mean: self.mean * c,
            stderr: self.stderr * c.abs(),
            n: self.n,
        }
    }

    /// |self - other| in units of the combined standard error of two
    /// independent estimates.
    pub fn z_against(&self, other: &McEstimate) -> f64 {
        z_score(self.mean - other.mean, self.stderr.hypot(other.stderr))
    }

    /// |mean - value| in units of the standard error.
    pub fn z_against_value(&self, value: f64) -> f64 {
        z_score(self.mean - value, self.stderr)
    }
}

fn z_score(diff: f64, se: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else if se > 0.0 {
        diff.abs() / se
    } else {
        f64::INFINITY
    }
}

impl std::fmt::Display for McEstimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.6} ± {:.2e} (n={})", self.mean, self.stderr, self.n)
    }
}
