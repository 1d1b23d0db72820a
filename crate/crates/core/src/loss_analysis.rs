//! Strategy-crossover efficiency thresholds and the (detector count,
//! efficiency) region classification.
//!
//! Three strategies compete for a given detector count `M` under photon
//! loss: fully entangled ensembles (best accuracy, all-or-nothing under
//! loss), independent maximally entangled pairs (half-way), and
//! unentangled singles (shot-noise accuracy, loss-tolerant). Comparing
//! their variance per *attempted* trial — emitted pulses are the resource
//! — gives closed-form crossover efficiencies:
//!
//! - entangled vs unentangled: `eta* = M^(-1/(M-1))`, rising toward 1;
//! - pairs vs unentangled: `eta* = 1/2`, independent of `M`.
//!
//! The closed forms are double-checked two ways: a bisection on the
//! analytic effective variances, and a Monte Carlo crossover search that
//! measures the effective spreads by simulation.

use crate::estimators;
use crate::sampler::{Sampler, SamplerConfig};
use crate::spectra::Spectrum;
use crate::states::{accuracy_from_delta_tau, StateModel, StateVariant};
use crate::stats::Accumulator;
use crate::{Error, Result};

/// Which strategy achieves the smallest effective variance in a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Winner {
    UnentangledWins,
    PartialPairsWins,
    EntangledWins,
}

impl Winner {
    pub fn name(&self) -> &'static str {
        match self {
            Winner::UnentangledWins => "unentangled",
            Winner::PartialPairsWins => "partial_pairs",
            Winner::EntangledWins => "entangled",
        }
    }
}

/// Grid classification over detector counts and efficiencies.
#[derive(Debug, Clone)]
pub struct RegionMap {
    pub m_values: Vec<u32>,
    pub eta_grid: Vec<f64>,
    /// Row-major over `m_values`, then `eta_grid`.
    pub cells: Vec<Winner>,
}

impl RegionMap {
    pub fn winner(&self, m_index: usize, eta_index: usize) -> Winner {
        self.cells[m_index * self.eta_grid.len() + eta_index]
    }

    /// The winners along one detector-count row, in `eta_grid` order.
    pub fn row(&self, m_index: usize) -> &[Winner] {
        let n = self.eta_grid.len();
        &self.cells[m_index * n..(m_index + 1) * n]
    }
}

/// Efficiency above which the fully entangled ensemble beats unentangled
/// singles, per attempted trial: `M^(-1/(M-1))`.
pub fn threshold_entangled(m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("detector count must be >= 1".into()));
    }
    if m == 1 {
        return Err(Error::UndefinedThreshold(
            "entangled and unentangled ensembles coincide at M = 1".into(),
        ));
    }
    let mf = m as f64;
    Ok((-mf.ln() / (mf - 1.0)).exp())
}

/// Same threshold solved numerically from the analytic effective
/// variances, as a guard against formula drift.
pub fn threshold_entangled_bisected(m: u32) -> Result<f64> {
    if m == 1 {
        return Err(Error::UndefinedThreshold(
            "entangled and unentangled ensembles coincide at M = 1".into(),
        ));
    }
    bisect_analytic(
        StateVariant::EntangledSingles { detectors: m },
        StateVariant::UnentangledSingles { detectors: m },
    )
}

/// Efficiency above which independent entangled pairs beat unentangled
/// singles: 1/2, independent of the detector count.
pub fn threshold_partial_pairs() -> f64 {
    0.5
}

/// The pair threshold solved numerically for a concrete (even) detector
/// count.
pub fn threshold_partial_pairs_bisected(m: u32) -> Result<f64> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "pair threshold needs an even detector count >= 2, got {m}"
        )));
    }
    bisect_analytic(
        StateVariant::PartialPairs { detectors: m },
        StateVariant::UnentangledSingles { detectors: m },
    )
}

/// Finds the efficiency where `quantum` starts beating `reference` on
/// analytic effective variance; `delta_tau` cancels out of the equality.
fn bisect_analytic(quantum: StateVariant, reference: StateVariant) -> Result<f64> {
    let diff = |eta: f64| {
        let q = accuracy_from_delta_tau(&quantum, 1.0, eta).effective_delta_t;
        let r = accuracy_from_delta_tau(&reference, 1.0, eta).effective_delta_t;
        r - q
    };
    let mut lo = 1e-6;
    let mut hi = 1.0;
    if !(diff(lo) < 0.0 && diff(hi) > 0.0) {
        return Err(Error::UndefinedThreshold(format!(
            "no crossover between {} and {} in (0, 1]",
            quantum.name(),
            reference.name()
        )));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if diff(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Classifies each `(M, eta)` cell by the strategy with the smallest
/// analytic effective variance. Ties go to the less entangled strategy;
/// pair ensembles compete only at even detector counts.
pub fn region_map(m_values: &[u32], eta_grid: &[f64]) -> Result<RegionMap> {
    if m_values.is_empty() || eta_grid.is_empty() {
        return Err(Error::InvalidArgument(
            "region map needs non-empty M and eta grids".into(),
        ));
    }
    for &eta in eta_grid {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "eta grid values must lie in (0, 1], got {eta}"
            )));
        }
    }
    let mut cells = Vec::with_capacity(m_values.len() * eta_grid.len());
    for &m in m_values {
        if m < 1 {
            return Err(Error::InvalidArgument("detector counts must be >= 1".into()));
        }
        for &eta in eta_grid {
            cells.push(classify_cell(m, eta));
        }
    }
    Ok(RegionMap {
        m_values: m_values.to_vec(),
        eta_grid: eta_grid.to_vec(),
        cells,
    })
}

fn classify_cell(m: u32, eta: f64) -> Winner {
    // Candidates in increasing order of entangledness, so a strict
    // improvement is required to move toward more entanglement.
    let mut best = Winner::UnentangledWins;
    let mut best_eff =
        accuracy_from_delta_tau(&StateVariant::UnentangledSingles { detectors: m }, 1.0, eta)
            .effective_delta_t;
    if m >= 2 && m.is_multiple_of(2) {
        let eff =
            accuracy_from_delta_tau(&StateVariant::PartialPairs { detectors: m }, 1.0, eta)
                .effective_delta_t;
        if eff < best_eff * (1.0 - 1e-9) {
            best = Winner::PartialPairsWins;
            best_eff = eff;
        }
    }
    if m >= 2 {
        let eff =
            accuracy_from_delta_tau(&StateVariant::EntangledSingles { detectors: m }, 1.0, eta)
                .effective_delta_t;
        if eff < best_eff * (1.0 - 1e-9) {
            best = Winner::EntangledWins;
        }
    }
    best
}

/// Monte Carlo estimate of the effective spread per attempted trial:
/// the sample spread of the model's information units scaled by
/// `sqrt(attempts / units)`. This estimates
/// [`crate::states::AccuracyPrediction::effective_delta_t`] for every
/// ensemble family.
pub fn empirical_effective_std(
    model: &StateModel,
    eta: f64,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    let sampler = Sampler::new(model, &SamplerConfig::default())?;
    let acc = sampler.fold_campaign(
        eta,
        trials,
        seed,
        |rec, acc: &mut Accumulator| {
            estimators::push_information_units(rec, &mut |x| acc.push(x));
        },
        |a, b| a.merge(&b),
    );
    if acc.count < 50 {
        return Err(Error::InsufficientStatistics {
            kept: acc.count,
            attempted: trials,
            keep_rate: acc.count as f64 / trials as f64,
        });
    }
    Ok(acc.std_dev() * (trials as f64 / acc.count as f64).sqrt())
}

/// Which strategy pair a Monte Carlo crossover search compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossoverStrategy {
    EntangledVsUnentangled,
    PartialPairsVsUnentangled,
}

/// Options for the Monte Carlo crossover search.
#[derive(Debug, Clone)]
pub struct CrossoverOptions {
    pub trials_per_point: u64,
    /// Bisection stops when the bracket is narrower than this.
    pub eta_tolerance: f64,
    pub seed: u64,
    pub spectrum: Spectrum,
}

impl Default for CrossoverOptions {
    fn default() -> Self {
        CrossoverOptions {
            trials_per_point: 200_000,
            eta_tolerance: 0.005,
            seed: 0x51ab_17e5,
            spectrum: Spectrum::gaussian(100.0, 1.0).expect("valid builtin spectrum"),
        }
    }
}

/// Finds the efficiency where the quantum strategy's measured effective
/// spread crosses the unentangled one, by bisection on eta.
///
/// Every eta point runs two fresh campaigns of `trials_per_point`
/// attempts; the search is deterministic for fixed options.
pub fn mc_crossover(m: u32, strategy: CrossoverStrategy, opts: &CrossoverOptions) -> Result<f64> {
    let quantum = match strategy {
        CrossoverStrategy::EntangledVsUnentangled => {
            if m < 2 {
                return Err(Error::UndefinedThreshold(
                    "entangled crossover needs M >= 2".into(),
                ));
            }
            StateVariant::EntangledSingles { detectors: m }
        }
        CrossoverStrategy::PartialPairsVsUnentangled => {
            if m < 2 || !m.is_multiple_of(2) {
                return Err(Error::InvalidArgument(format!(
                    "pair crossover needs an even detector count >= 2, got {m}"
                )));
            }
            StateVariant::PartialPairs { detectors: m }
        }
    };
    let reference = StateVariant::UnentangledSingles { detectors: m };
    let q_model = StateModel::new(quantum, opts.spectrum.clone())?;
    let r_model = StateModel::new(reference, opts.spectrum.clone())?;

    // Positive once the quantum strategy wins. Each (eta, side) pair gets
    // its own derived seed so bisection points stay independent.
    let mut point = 0u64;
    let mut gap = |eta: f64| -> Result<f64> {
        let sq = opts.seed.wrapping_add(point.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let sr = sq.wrapping_add(0x6a09_e667_f3bc_c909);
        point += 1;
        let q = empirical_effective_std(&q_model, eta, opts.trials_per_point, sq)?;
        let r = empirical_effective_std(&r_model, eta, opts.trials_per_point, sr)?;
        Ok(r - q)
    };

    let mut lo = 0.35;
    let mut hi = 0.995;
    let g_lo = gap(lo)?;
    let g_hi = gap(hi)?;
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(Error::UndefinedThreshold(format!(
            "no measured crossover in [{lo}, {hi}] (gap {g_lo:.3e} .. {g_hi:.3e})"
        )));
    }
    while hi - lo > opts.eta_tolerance {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
