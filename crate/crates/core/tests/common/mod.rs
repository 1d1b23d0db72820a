//! Shared oracle helpers for the integration tests: reference CDFs and an
//! independent numeric Fourier route to the arrival density, deliberately
//! not reusing the library's quadrature or closed forms.

#![allow(dead_code)]

/// Error function, Abramowitz-Stegun 7.1.26 (|error| < 1.5e-7).
pub fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.327_591_1 * x);
    let poly = t
        * (0.254_829_592
            + t * (-0.284_496_736 + t * (1.421_413_741 + t * (-1.453_152_027 + t * 1.061_405_429))));
    sign * (1.0 - poly * (-x * x).exp())
}

/// Standard normal CDF scaled to mean `mu`, std `sigma`.
pub fn normal_cdf(x: f64, mu: f64, sigma: f64) -> f64 {
    0.5 * (1.0 + erf((x - mu) / (sigma * std::f64::consts::SQRT_2)))
}

/// CDF of the two-sided exponential density `rate/2 * exp(-rate |x|)`.
pub fn laplace_cdf(x: f64, rate: f64) -> f64 {
    if x < 0.0 {
        0.5 * (rate * x).exp()
    } else {
        1.0 - 0.5 * (-rate * x).exp()
    }
}

/// Independent numeric route: evaluates `|g(t)|^2` by a plain Riemann
/// Fourier sum of the spectral amplitude over `[w_lo, w_hi]`.
pub struct NumericDensity {
    t_lo: f64,
    dt: f64,
    pub density: Vec<f64>,
}

impl NumericDensity {
    pub fn build<F: Fn(f64) -> f64>(
        spectral_power: F,
        w_lo: f64,
        w_hi: f64,
        n_w: usize,
        t_lo: f64,
        t_hi: f64,
        n_t: usize,
    ) -> Self {
        let dw = (w_hi - w_lo) / (n_w - 1) as f64;
        let amps: Vec<(f64, f64)> = (0..n_w)
            .map(|k| {
                let w = w_lo + k as f64 * dw;
                (w, spectral_power(w).max(0.0).sqrt())
            })
            .collect();
        let dt = (t_hi - t_lo) / (n_t - 1) as f64;
        let norm = dw / (2.0 * std::f64::consts::PI).sqrt();
        let density: Vec<f64> = (0..n_t)
            .map(|i| {
                let t = t_lo + i as f64 * dt;
                // Rotate the phase across the frequency grid instead of
                // calling sin_cos per sample.
                let (mut s, mut c) = (-w_lo * t).sin_cos();
                let (ds, dc) = (-dw * t).sin_cos();
                let mut re = 0.0;
                let mut im = 0.0;
                for &(_, a) in &amps {
                    re += a * c;
                    im += a * s;
                    let cn = c * dc - s * ds;
                    s = s * dc + c * ds;
                    c = cn;
                }
                (re * re + im * im) * norm * norm
            })
            .collect();
        NumericDensity { t_lo, dt, density }
    }

    /// Riemann mass, mean, and standard deviation of the tabulated density.
    pub fn moments(&self) -> (f64, f64, f64) {
        let mut mass = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (i, &p) in self.density.iter().enumerate() {
            let t = self.t_lo + i as f64 * self.dt;
            mass += p;
            m1 += t * p;
            m2 += t * t * p;
        }
        mass *= self.dt;
        m1 *= self.dt;
        m2 *= self.dt;
        let mean = m1 / mass;
        (mass, mean, (m2 / mass - mean * mean).sqrt())
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let x = ((t - self.t_lo) / self.dt).max(0.0);
        let k = (x.floor() as usize).min(self.density.len() - 2);
        let frac = x - k as f64;
        self.density[k] * (1.0 - frac) + self.density[k + 1] * frac
    }
}

/// Gaussian spectral power with unit std, centered at `w0`.
pub fn gaussian_power(w: f64, w0: f64, sigma: f64) -> f64 {
    let u = (w - w0) / sigma;
    (-0.5 * u * u).exp() / ((2.0 * std::f64::consts::PI).sqrt() * sigma)
}

/// Squared-Lorentzian spectral power (Lorentzian amplitude of half-width
/// `gamma`), normalized.
pub fn lorentzian_power(w: f64, w0: f64, gamma: f64) -> f64 {
    let u = w - w0;
    let g2 = gamma * gamma;
    2.0 * g2 * gamma / std::f64::consts::PI / (u * u + g2).powi(2)
}

/// Uniform tabulated Gaussian spectrum fixture.
pub fn gaussian_table(w0: f64, sigma: f64, half_width_sigmas: f64, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|k| {
            let w = w0 - half_width_sigmas * sigma
                + 2.0 * half_width_sigmas * sigma * k as f64 / (n - 1) as f64;
            (w, gaussian_power(w, w0, sigma))
        })
        .collect()
}
