//! Small statistics helpers shared by campaigns and the test suites.

/// Running sum / sum-of-squares accumulator for sample spreads.
///
/// Partial accumulators can be merged, which keeps parallel campaigns
/// deterministic: each worker folds a fixed chunk of trials in index
/// order, and the chunk accumulators are merged in chunk order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.sum / self.count as f64
        }
    }

    /// Unbiased sample variance; `NaN` below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        let n = self.count as f64;
        let v = (self.sum_sq - self.sum * self.sum / n) / (n - 1.0);
        v.max(0.0)
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }
}

/// Sample mean and unbiased standard deviation of a slice.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let mut acc = Accumulator::default();
    for &x in xs {
        acc.push(x);
    }
    (acc.mean(), acc.std_dev())
}

/// Relative standard error of a sample standard deviation at `n` samples,
/// `sigma(s)/s ~ 1/sqrt(2(n-1))` for near-Gaussian data.
pub fn std_of_std_rel(n: u64) -> f64 {
    if n < 2 {
        f64::INFINITY
    } else {
        1.0 / (2.0 * (n as f64 - 1.0)).sqrt()
    }
}

/// Ordinary least-squares line fit.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (residual-based; zero for n = 2).
    pub slope_stderr: f64,
}

/// Least-squares fit of `y = slope * x + intercept`.
///
/// Returns `None` for fewer than two points or a degenerate abscissa.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<LineFit> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let slope_stderr = if n > 2 {
        let ss_res: f64 = points
            .iter()
            .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
            .sum();
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(LineFit {
        slope,
        intercept,
        slope_stderr,
    })
}

/// One-sample Kolmogorov-Smirnov statistic `D_n` against a reference CDF.
///
/// The samples need not be sorted; a sorted copy is made internally.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample"));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i as f64 + 1.0) / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Critical KS value at significance `alpha` (asymptotic, with the
/// standard small-sample correction in the denominator).
pub fn ks_critical(alpha: f64, n: usize) -> f64 {
    // c(alpha) = sqrt(-ln(alpha/2) / 2)
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let sq = (n as f64).sqrt();
    c / (sq + 0.12 + 0.11 / sq)
}
