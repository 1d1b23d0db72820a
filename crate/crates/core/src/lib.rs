//! Simulation of pulse time-of-arrival measurement with classical and
//! quantum-correlated light.
//!
//! The crate models an ensemble of light pulses sent to an array of
//! time-resolving detectors and asks how well the average arrival time can
//! be estimated. Several ensemble kinds are supported: classical coherent
//! pulses, independent single photons, frequency-entangled photons (whose
//! arrival times bunch around a common average), single-mode Fock pulses,
//! entangled Fock pulses, independently entangled photon pairs, and twin
//! beams optimized for arrival-time differences.
//!
//! The main pieces:
//!
//! - [`spectra`]: pulse spectra, their time-domain arrival densities,
//!   moments, and inverse-CDF sampling tables.
//! - [`states`]: the ensemble models and their analytic accuracy
//!   predictions, including survival probabilities under photon loss.
//! - [`sampler`]: seeded, reproducible Monte Carlo generation of trial
//!   records, with a binomial photon-loss channel.
//! - [`estimators`]: arrival-time estimators, accuracy campaigns, and
//!   log-log scaling fits.
//! - [`loss_analysis`]: strategy-crossover efficiency thresholds and the
//!   (detector count, efficiency) region classification.
//! - [`bounds`]: quantum speed-limit lower bounds on timing accuracy and
//!   a checker that flags any campaign result beating them.
//!
//! Everything works in natural units (`hbar = c = 1`); time and frequency
//! are reciprocal. All sampling is driven by [`sampler::RngStream`] values
//! derived from a master seed and a trial index, so campaigns are
//! bit-reproducible regardless of how trials are scheduled across threads.

pub mod bounds;
pub mod estimators;
pub mod loss_analysis;
pub mod sampler;
pub mod spectra;
pub mod states;
pub mod stats;

mod quadrature;

use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Spectrum parameters violate an invariant (width, grid shape, ...).
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    /// A tabulated grid is too coarse to resolve the pulse in time.
    #[error("tabulated grid too coarse: {0}")]
    Resolution(String),
    /// Time-density moments failed to converge as the window grew.
    #[error("divergent moment: {0}")]
    DivergentMoment(String),
    /// The numeric CDF lost monotonicity during table construction.
    #[error("inverse-CDF construction failed: {0}")]
    NonMonotoneCdf(String),
    /// State-model parameters violate an invariant.
    #[error("invalid state model: {0}")]
    InvalidModel(String),
    /// Efficiency eta = 0 makes the requested prediction degenerate.
    #[error("degenerate efficiency: eta must be in (0, 1], got {0}")]
    DegenerateEfficiency(f64),
    /// Sampler configuration is unusable (window, grid size, ...).
    #[error("sampler configuration: {0}")]
    SamplerConfig(String),
    /// A campaign retained too few trials to estimate a spread.
    #[error("insufficient statistics: kept {kept} of {attempted} trials (keep rate {keep_rate:.3e})")]
    InsufficientStatistics {
        kept: u64,
        attempted: u64,
        keep_rate: f64,
    },
    /// A campaign or fit was asked for with unusable arguments.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Scaling fit could not be performed on the given reports.
    #[error("scaling fit failed: {0}")]
    FitError(String),
    /// Crossover threshold is undefined for the requested parameters.
    #[error("undefined threshold: {0}")]
    UndefinedThreshold(String),
    /// Reading a tabulated spectrum file failed.
    #[error("spectrum table I/O: {0}")]
    TableIo(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
