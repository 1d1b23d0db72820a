//! Pulse spectra, their time-domain arrival densities, and sampling tables.
//!
//! A pulse is described by a spectral amplitude `phi(omega)` whose power
//! `|phi|^2` is normalized to unit mass. Its Fourier transform `g(t)` gives
//! the arrival-time density `|g(t)|^2` at an ideal time-resolving detector.
//! Three spectrum kinds are built in:
//!
//! - `Gaussian`: `|phi|^2` Gaussian with standard deviation `width`; the
//!   arrival density is Gaussian with `delta_tau = 1 / (2 width)`.
//! - `Lorentzian`: Lorentzian *amplitude* with half-width `width`, giving
//!   the two-sided exponential density `|g|^2 = width * exp(-2 width |t|)`
//!   and `delta_tau = 1 / (sqrt(2) width)`.
//! - `Tabulated`: a uniform grid of `(omega, power)` samples; `g(t)` is
//!   evaluated as a discrete Fourier sum.
//!
//! Widths are standard deviations throughout: `delta_omega` is the standard
//! deviation of `|phi|^2` and `delta_tau` that of `|g|^2`, so the
//! time-bandwidth product `delta_tau * delta_omega` is at least 1/2, with
//! equality for the Gaussian.
//!
//! Spectra with non-decaying time tails (for example a rectangular table,
//! whose density has `1/t^2` sinc tails) have no finite second moment; the
//! moment routines detect this and report a divergent-moment error instead
//! of silently truncating.

use crate::quadrature;
use crate::{Error, Result};

/// Relative normalization tolerance for closed-form spectra.
pub const NORM_TOL_CLOSED: f64 = 1e-9;
/// Relative normalization tolerance for tabulated spectra.
pub const NORM_TOL_TABULATED: f64 = 1e-6;
/// Target absolute CDF error of the inverse-CDF sampling table.
pub const CDF_TABLE_TOL: f64 = 1e-6;

const MIN_TABLE_POINTS: usize = 64;
const MIN_CDF_GRID: usize = 1024;
/// Relative moment convergence target between window doublings.
const MOMENT_REL_TOL: f64 = 1e-6;
/// Tighter target for the frequency side so the time-bandwidth product
/// is resolved well below `MOMENT_REL_TOL`.
const FREQ_REL_TOL: f64 = 1e-8;
const MAX_DOUBLINGS: u32 = 40;

/// Minimal complex value for spectral amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// First and second moments of the arrival density and the spectrum.
#[derive(Debug, Clone, Copy)]
pub struct TimeMoments {
    /// Mean of `|g(t)|^2`.
    pub tau_bar: f64,
    /// Standard deviation of `|g(t)|^2`.
    pub delta_tau: f64,
    /// Standard deviation of `|phi(omega)|^2`.
    pub delta_omega: f64,
}

/// A uniformly gridded tabulated spectrum.
///
/// Construct through [`Spectrum::from_table_points`] or
/// [`Spectrum::from_csv_file`]; the power column is renormalized on load.
#[derive(Debug, Clone)]
pub struct TabulatedSpectrum {
    omega_start: f64,
    step: f64,
    /// Normalized power samples: `step * sum(power) = 1`.
    power: Vec<f64>,
    /// `sqrt(power)`, cached for the Fourier sum.
    amplitude: Vec<f64>,
    mean_omega: f64,
}

impl TabulatedSpectrum {
    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Half of the alias period of the discrete Fourier sum; `|g|^2` is
    /// only meaningful for `|t - tau_bar|` below this.
    pub fn alias_half_period(&self) -> f64 {
        std::f64::consts::PI / self.step
    }

    fn power_at(&self, omega: f64) -> f64 {
        let x = (omega - self.omega_start) / self.step;
        if x < 0.0 {
            return 0.0;
        }
        let k = x.floor() as usize;
        if k + 1 >= self.power.len() {
            return if k + 1 == self.power.len() {
                self.power[k]
            } else {
                0.0
            };
        }
        let frac = x - k as f64;
        self.power[k] * (1.0 - frac) + self.power[k + 1] * frac
    }
}

/// Result of loading a tabulated spectrum: the spectrum plus how far the
/// supplied power column was from unit mass before renormalization.
#[derive(Debug, Clone)]
pub struct TableLoad {
    pub spectrum: Spectrum,
    /// `|mass - 1|` of the table as given.
    pub normalization_deviation: f64,
}

/// A pulse spectrum.
#[derive(Debug, Clone)]
pub enum Spectrum {
    /// Gaussian power spectrum: `center` is the carrier frequency, `width`
    /// the standard deviation of `|phi|^2`.
    Gaussian { center: f64, width: f64 },
    /// Lorentzian amplitude with half-width `width` at carrier `center`;
    /// the arrival density is `width * exp(-2 width |t|)`.
    Lorentzian { center: f64, width: f64 },
    /// Uniformly sampled `(omega, power)` table.
    Tabulated(TabulatedSpectrum),
}

impl Spectrum {
    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        check_width(center, width)?;
        Ok(Spectrum::Gaussian { center, width })
    }

    pub fn lorentzian(center: f64, width: f64) -> Result<Self> {
        check_width(center, width)?;
        Ok(Spectrum::Lorentzian { center, width })
    }

    /// Builds a tabulated spectrum from `(omega, power)` pairs.
    ///
    /// Requires at least 64 points on a strictly increasing uniform grid
    /// with non-negative power. The power column is renormalized to unit
    /// mass; the deviation of the original mass from 1 is reported so
    /// callers can warn when it exceeds `1e-3`.
    pub fn from_table_points(points: &[(f64, f64)]) -> Result<TableLoad> {
        if points.len() < MIN_TABLE_POINTS {
            return Err(Error::InvalidSpectrum(format!(
                "tabulated spectrum needs at least {MIN_TABLE_POINTS} points, got {}",
                points.len()
            )));
        }
        let step = points[1].0 - points[0].0;
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidSpectrum(
                "tabulated grid must be strictly increasing".into(),
            ));
        }
        for w in points.windows(2) {
            let d = w[1].0 - w[0].0;
            if d <= 0.0 {
                return Err(Error::InvalidSpectrum(
                    "tabulated grid must be strictly increasing".into(),
                ));
            }
            if ((d - step) / step).abs() > 1e-6 {
                return Err(Error::InvalidSpectrum(format!(
                    "tabulated grid must be uniform: spacing {d} differs from {step}"
                )));
            }
        }
        let mut power: Vec<f64> = Vec::with_capacity(points.len());
        for &(omega, p) in points {
            if !omega.is_finite() || !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidSpectrum(format!(
                    "tabulated power must be finite and non-negative, got ({omega}, {p})"
                )));
            }
            power.push(p);
        }
        let mass: f64 = power.iter().sum::<f64>() * step;
        if mass <= 0.0 {
            return Err(Error::InvalidSpectrum(
                "tabulated power sums to zero".into(),
            ));
        }
        let deviation = (mass - 1.0).abs();
        for p in &mut power {
            *p /= mass;
        }
        let amplitude: Vec<f64> = power.iter().map(|p| p.sqrt()).collect();
        let mean_omega = {
            let mut m = 0.0;
            for (k, p) in power.iter().enumerate() {
                m += (points[0].0 + k as f64 * step) * p;
            }
            m * step
        };
        let tab = TabulatedSpectrum {
            omega_start: points[0].0,
            step,
            power,
            amplitude,
            mean_omega,
        };
        let spectrum = Spectrum::Tabulated(tab);
        spectrum.check_time_resolution()?;
        Ok(TableLoad {
            spectrum,
            normalization_deviation: deviation,
        })
    }

    /// Loads a tabulated spectrum from a two-column CSV file with header
    /// line `omega,power`.
    pub fn from_csv_file(path: &std::path::Path) -> Result<TableLoad> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::TableIo(format!("{}: {e}", path.display())))?;
        let mut lines = text.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, l)) if l.trim().is_empty() => continue,
                Some((_, l)) => break l,
                None => return Err(Error::TableIo(format!("{}: empty file", path.display()))),
            }
        };
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols != ["omega", "power"] {
            return Err(Error::TableIo(format!(
                "{}: expected header 'omega,power', got '{}'",
                path.display(),
                header.trim()
            )));
        }
        let mut points = Vec::new();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',').map(str::trim);
            let parse = |s: Option<&str>| -> Result<f64> {
                s.ok_or_else(|| {
                    Error::TableIo(format!("{}:{}: missing column", path.display(), idx + 1))
                })?
                .parse::<f64>()
                .map_err(|e| Error::TableIo(format!("{}:{}: {e}", path.display(), idx + 1)))
            };
            let omega = parse(parts.next())?;
            let p = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::TableIo(format!(
                    "{}:{}: expected two columns",
                    path.display(),
                    idx + 1
                )));
            }
            points.push((omega, p));
        }
        Self::from_table_points(&points)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Spectrum::Gaussian { .. } => "gaussian",
            Spectrum::Lorentzian { .. } => "lorentzian",
            Spectrum::Tabulated(_) => "tabulated",
        }
    }

    /// Carrier (mean) frequency of the spectrum.
    pub fn center_frequency(&self) -> f64 {
        match self {
            Spectrum::Gaussian { center, .. } | Spectrum::Lorentzian { center, .. } => *center,
            Spectrum::Tabulated(t) => t.mean_omega,
        }
    }

    /// Spectral power `|phi(omega)|^2`.
    pub fn spectral_power(&self, omega: f64) -> f64 {
        match self {
            Spectrum::Gaussian { center, width } => {
                let u = (omega - center) / width;
                (-0.5 * u * u).exp() / ((2.0 * std::f64::consts::PI).sqrt() * width)
            }
            Spectrum::Lorentzian { center, width } => {
                let u = omega - center;
                let g2 = width * width;
                2.0 * g2 * width / std::f64::consts::PI / (u * u + g2).powi(2)
            }
            Spectrum::Tabulated(t) => t.power_at(omega),
        }
    }

    /// Time-domain amplitude `g(t)`, the Fourier transform of the spectral
    /// amplitude (unitary convention, so `|g|^2` has unit mass in time).
    pub fn amplitude_g(&self, t: f64) -> Complex {
        let (magnitude, phase_center) = match self {
            Spectrum::Gaussian { center, width } => {
                let mag = (2.0 * width * width / std::f64::consts::PI).powf(0.25)
                    * (-(width * width) * t * t).exp();
                (mag, *center)
            }
            Spectrum::Lorentzian { center, width } => {
                let mag = width.sqrt() * (-width * t.abs()).exp();
                (mag, *center)
            }
            Spectrum::Tabulated(tab) => {
                // Direct Fourier sum; accumulate the phase relative to the
                // grid start and rotate once at the end.
                let mut re = 0.0;
                let mut im = 0.0;
                let (sin_step, cos_step) = (-tab.step * t).sin_cos();
                let mut cos_k = 1.0;
                let mut sin_k = 0.0;
                for &a in &tab.amplitude {
                    re += a * cos_k;
                    im += a * sin_k;
                    let c = cos_k * cos_step - sin_k * sin_step;
                    sin_k = sin_k * cos_step + cos_k * sin_step;
                    cos_k = c;
                }
                let scale = tab.step / (2.0 * std::f64::consts::PI).sqrt();
                let (s0, c0) = (-tab.omega_start * t).sin_cos();
                return Complex::new(scale * (re * c0 - im * s0), scale * (re * s0 + im * c0));
            }
        };
        let (s, c) = (-phase_center * t).sin_cos();
        Complex::new(magnitude * c, magnitude * s)
    }

    /// Normalized arrival-time density `|g(t)|^2`.
    pub fn arrival_density(&self, t: f64) -> f64 {
        match self {
            Spectrum::Gaussian { width, .. } => {
                let w2 = width * width;
                (2.0 * w2 / std::f64::consts::PI).sqrt() * (-2.0 * w2 * t * t).exp()
            }
            Spectrum::Lorentzian { width, .. } => width * (-2.0 * width * t.abs()).exp(),
            Spectrum::Tabulated(_) => self.amplitude_g(t).norm_sqr(),
        }
    }

    /// Moments of the arrival density and the spectrum, computed by
    /// adaptive quadrature on a window that doubles until the moments
    /// converge. Heavy-tailed densities whose second moment keeps growing
    /// with the window produce [`Error::DivergentMoment`].
    pub fn moments(&self) -> Result<TimeMoments> {
        Ok(self.profile()?.moments)
    }

    /// Builds a monotone inverse-CDF lookup table for `|g(t)|^2`.
    ///
    /// `grid_size` is the minimum number of nodes (at least 1024); the
    /// grid is refined further if needed to keep the interpolated CDF
    /// within [`CDF_TABLE_TOL`] of the tabulated one.
    pub fn inverse_cdf_table(&self, grid_size: usize) -> Result<InverseCdfTable> {
        if grid_size < MIN_CDF_GRID {
            return Err(Error::InvalidArgument(format!(
                "inverse-CDF grid size must be at least {MIN_CDF_GRID}, got {grid_size}"
            )));
        }
        let profile = self.profile()?;
        InverseCdfTable::build(self, &profile, grid_size)
    }

    /// Rejects tabulated grids too coarse to resolve the pulse in time:
    /// the alias half-period of the Fourier sum must comfortably exceed
    /// the time-bandwidth-limited pulse extent.
    fn check_time_resolution(&self) -> Result<()> {
        if let Spectrum::Tabulated(tab) = self {
            let delta_omega = self.spectrum_std()?;
            let tau_floor = 1.0 / (2.0 * delta_omega);
            let alias_half = tab.alias_half_period();
            if alias_half < 8.0 * tau_floor {
                return Err(Error::Resolution(format!(
                    "grid spacing {} gives alias half-period {alias_half:.3e}, \
                     below 8x the pulse extent {tau_floor:.3e}",
                    tab.step
                )));
            }
        }
        Ok(())
    }

    /// Standard deviation of the spectral power.
    fn spectrum_std(&self) -> Result<f64> {
        match self {
            Spectrum::Tabulated(t) => {
                // The grid is the quadrature: the samples decay to the
                // table edge, so the Riemann sum is the natural rule and
                // matches the normalization convention exactly.
                let mut m1 = 0.0;
                let mut m2 = 0.0;
                for (k, p) in t.power.iter().enumerate() {
                    let w = t.omega_start + k as f64 * t.step;
                    m1 += w * p;
                    m2 += w * w * p;
                }
                m1 *= t.step;
                m2 *= t.step;
                let var = m2 - m1 * m1;
                if var <= 0.0 {
                    return Err(Error::InvalidSpectrum(
                        "tabulated spectrum has zero frequency spread".into(),
                    ));
                }
                Ok(var.sqrt())
            }
            _ => {
                let center = self.center_frequency();
                let scale = match self {
                    Spectrum::Gaussian { width, .. } | Spectrum::Lorentzian { width, .. } => *width,
                    Spectrum::Tabulated(_) => unreachable!(),
                };
                let f = |w: f64| self.spectral_power(w + center);
                let (_, var, _) = converged_moments(&f, 20.0 * scale, FREQ_REL_TOL, None)
                    .map_err(|d| Error::DivergentMoment(format!("spectrum second moment: {d}")))?;
                Ok(var.sqrt())
            }
        }
    }

    fn profile(&self) -> Result<TimeProfile> {
        let delta_omega = self.spectrum_std()?;
        let tau_floor = 1.0 / (2.0 * delta_omega);
        let cap = match self {
            Spectrum::Tabulated(t) => Some(0.98 * t.alias_half_period()),
            _ => None,
        };
        let f = |t: f64| self.arrival_density(t);
        // Window half-width starts at 20x the time-bandwidth-limited
        // extent and doubles until the moments settle.
        let (tau_bar, var, window_half) =
            converged_moments(&f, 20.0 * tau_floor, MOMENT_REL_TOL, cap)
                .map_err(|d| Error::DivergentMoment(format!("arrival density: {d}")))?;
        if var <= 0.0 {
            return Err(Error::DivergentMoment(
                "arrival density has zero variance".into(),
            ));
        }
        Ok(TimeProfile {
            moments: TimeMoments {
                tau_bar,
                delta_tau: var.sqrt(),
                delta_omega,
            },
            window_half,
        })
    }
}

fn check_width(center: f64, width: f64) -> Result<()> {
    if !center.is_finite() {
        return Err(Error::InvalidSpectrum(format!(
            "center frequency must be finite, got {center}"
        )));
    }
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidSpectrum(format!(
            "width must be positive and finite, got {width}"
        )));
    }
    Ok(())
}

/// Converged arrival-density profile: moments plus the window that was
/// sufficient to converge them.
struct TimeProfile {
    moments: TimeMoments,
    window_half: f64,
}

/// Doubles a centered window until mean and variance of the density
/// stabilize to `rel_tol`. Returns `(mean, variance, window_half)`.
///
/// The window starts at `w0 = 20 * (initial spread estimate)` and
/// recenters on the running mean. Divergence is reported when the
/// variance increments stop shrinking geometrically, or when the window
/// cap / doubling budget is exhausted before convergence.
fn converged_moments<F: Fn(f64) -> f64>(
    f: &F,
    w0: f64,
    rel_tol: f64,
    cap: Option<f64>,
) -> std::result::Result<(f64, f64, f64), String> {
    let mut center = 0.0;
    let mut w = w0;
    if let Some(c) = cap {
        w = w.min(c);
    }
    // Quadrature tolerances scale with the density's own variance, which
    // the window start encodes as (w0 / 20)^2.
    let mut var_scale = (w0 / 20.0).powi(2);
    let mut prev: Option<f64> = None;
    let mut prev_change: Option<f64> = None;
    for iter in 0..MAX_DOUBLINGS {
        let (mass, mean, var) = window_moments(f, center - w, center + w, var_scale);
        if mass <= 0.0 || mass.is_nan() {
            return Err("zero mass in window".into());
        }
        if let Some(pvar) = prev {
            let change = (var - pvar).abs() / var.abs().max(1e-300);
            if change < rel_tol {
                return Ok((mean, var, w));
            }
            // A second moment whose increments do not decay geometrically
            // is growing with the window: heavy tails.
            if let Some(pc) = prev_change {
                if iter > 6 && change > 0.75 * pc {
                    return Err(format!(
                        "second moment still growing at window half-width {w:.3e} \
                         (relative change {change:.3e})"
                    ));
                }
            }
            prev_change = Some(change);
        }
        prev = Some(var);
        if var > 0.0 {
            var_scale = var;
        }
        center = mean;
        if let Some(c) = cap {
            if w >= c {
                return Err(format!(
                    "moments not converged within the usable window {c:.3e}"
                ));
            }
            w = (2.0 * w).min(c);
        } else {
            w *= 2.0;
        }
    }
    Err("window doubling budget exhausted".into())
}

fn window_moments<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, var_scale: f64) -> (f64, f64, f64) {
    // Centered moments keep the integrand scales independent of the
    // window width, so absolute quadrature tolerances can be tied to the
    // density's spread. Panel edges ladder out geometrically from the
    // center at the feature scale: with a window many decades wider than
    // the density, uniform panels would hide the feature (and the zero of
    // the second-moment integrand at the peak) from the initial Simpson
    // nodes.
    let c = 0.5 * (lo + hi);
    let sigma = var_scale.sqrt().max(1e-300);
    let mut edges = vec![lo];
    let mut below = Vec::new();
    let mut s = sigma;
    while c - s > lo {
        below.push(c - s);
        edges.push(c + s);
        s *= 2.0;
    }
    edges.extend(below.into_iter().rev());
    edges.push(c);
    edges.push(hi);
    edges.sort_by(|a, b| a.partial_cmp(b).expect("finite edges"));
    edges.dedup();

    let mass = quadrature::integrate_partitioned(f, &edges, 1e-12);
    let m1c = quadrature::integrate_partitioned(&|x| (x - c) * f(x), &edges, 1e-11 * sigma);
    let m2c =
        quadrature::integrate_partitioned(&|x| (x - c) * (x - c) * f(x), &edges, 1e-11 * var_scale);
    let mean_c = m1c / mass;
    let var = m2c / mass - mean_c * mean_c;
    (mass, c + mean_c, var)
}

/// Monotone lookup table mapping `u` in `[0, 1]` to arrival times with
/// `CDF(t) = u`, built on a uniform time grid.
#[derive(Debug, Clone)]
pub struct InverseCdfTable {
    t0: f64,
    step: f64,
    cdf: Vec<f64>,
}

impl InverseCdfTable {
    fn build(spectrum: &Spectrum, profile: &TimeProfile, grid_size: usize) -> Result<Self> {
        let center = profile.moments.tau_bar;
        let half = profile.window_half;
        let (lo, hi) = (center - half, center + half);
        let mut n = grid_size.max(MIN_CDF_GRID);
        loop {
            let step = (hi - lo) / (n - 1) as f64;
            let density: Vec<f64> = (0..n)
                .map(|k| spectrum.arrival_density(lo + k as f64 * step))
                .collect();
            // Linear interpolation of the CDF is in error by at most
            // h^2/8 * |p'| per cell; estimate it from density increments.
            let mut max_err = 0.0f64;
            for w in density.windows(2) {
                max_err = max_err.max((w[1] - w[0]).abs() * step / 8.0);
            }
            if max_err > 0.5 * CDF_TABLE_TOL {
                if n >= (1 << 21) {
                    return Err(Error::Resolution(
                        "arrival density too sharp for the CDF table budget".into(),
                    ));
                }
                n *= 2;
                continue;
            }
            let mut cdf = Vec::with_capacity(n);
            cdf.push(0.0);
            let mut acc = 0.0;
            // Composite Simpson on node pairs, with the half-panel
            // Newton-Cotes rule for the odd nodes.
            let mut k = 0;
            while k + 2 < n {
                let (p0, p1, p2) = (density[k], density[k + 1], density[k + 2]);
                let odd = acc + step / 12.0 * (5.0 * p0 + 8.0 * p1 - p2);
                let even = acc + step / 3.0 * (p0 + 4.0 * p1 + p2);
                cdf.push(odd);
                cdf.push(even);
                acc = even;
                k += 2;
            }
            if k + 1 < n {
                acc += 0.5 * step * (density[k] + density[k + 1]);
                cdf.push(acc);
            }
            let mass = *cdf.last().expect("nonempty");
            if !(mass.is_finite() && mass > 0.0) {
                return Err(Error::NonMonotoneCdf(format!(
                    "window mass {mass} is unusable"
                )));
            }
            for c in &mut cdf {
                *c /= mass;
            }
            // Quadrature noise must never produce a decreasing CDF.
            let mut prev = 0.0;
            for (i, c) in cdf.iter_mut().enumerate() {
                if *c < prev {
                    if prev - *c > 1e-9 {
                        return Err(Error::NonMonotoneCdf(format!(
                            "CDF decreases by {:.3e} at node {i}",
                            prev - *c
                        )));
                    }
                    *c = prev;
                }
                prev = *c;
            }
            return Ok(InverseCdfTable { t0: lo, step, cdf });
        }
    }

    /// Number of grid nodes.
    pub fn len(&self) -> usize {
        self.cdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cdf.is_empty()
    }

    /// Maps `u` in `[0, 1]` to the time with `CDF(t) = u`.
    pub fn sample(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let n = self.cdf.len();
        // First node with cdf >= u.
        let idx = self.cdf.partition_point(|&c| c < u);
        if idx == 0 {
            return self.t0;
        }
        if idx >= n {
            return self.t0 + (n - 1) as f64 * self.step;
        }
        let c0 = self.cdf[idx - 1];
        let c1 = self.cdf[idx];
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        self.t0 + ((idx - 1) as f64 + frac) * self.step
    }

    /// Tabulated CDF at time `t` (linear interpolation).
    pub fn cdf(&self, t: f64) -> f64 {
        let x = (t - self.t0) / self.step;
        if x <= 0.0 {
            return 0.0;
        }
        let n = self.cdf.len();
        if x >= (n - 1) as f64 {
            return 1.0;
        }
        let k = x.floor() as usize;
        let frac = x - k as f64;
        self.cdf[k] * (1.0 - frac) + self.cdf[k + 1] * frac
    }
}
