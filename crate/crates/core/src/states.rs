//! Light-state models and their analytic accuracy predictions.
//!
//! Each [`StateModel`] pairs an ensemble variant with a pulse spectrum and
//! is the single source of truth for which joint arrival density applies
//! and what timing accuracy it buys:
//!
//! | variant              | per-trial spread        | trial survival at eta |
//! |----------------------|-------------------------|-----------------------|
//! | `ClassicalCoherent`  | `dt / sqrt(M N eta)`    | 1 (photons pooled)    |
//! | `UnentangledSingles` | `dt / sqrt(M eta)`      | 1 (photons pooled)    |
//! | `EntangledSingles`   | `dt / M`                | `eta^M`               |
//! | `FockPulse`          | `dt / N`                | `eta^N`               |
//! | `EntangledFock`      | `dt / (M N)`            | `eta^(M N)`           |
//! | `PartialPairs`       | `dt / (2 sqrt(M / 2))`  | `eta^2` per pair      |
//! | `TwinBeam`           | `dt` (difference)       | `eta^2`               |
//!
//! with `dt` the arrival-density spread `delta_tau` of the spectrum.
//! Entangled ensembles lose everything when any photon is dropped (a
//! surviving subset carries no timing information), so their trials are
//! discarded on loss; unentangled and coherent ensembles keep reduced
//! trials, which shows up as an efficiency factor inside the spread
//! rather than a survival probability.

use crate::spectra::Spectrum;
use crate::{Error, Result};

/// Ensemble variant: how the photons are distributed and correlated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateVariant {
    /// `detectors` coherent pulses with `mean_photons` photons each
    /// (Poisson counts).
    ClassicalCoherent { detectors: u32, mean_photons: u32 },
    /// One independent single photon per detector.
    UnentangledSingles { detectors: u32 },
    /// `detectors` photons sharing one common frequency; arrival times
    /// bunch around their average.
    EntangledSingles { detectors: u32 },
    /// A single pulse of exactly `photons` quanta in one mode.
    FockPulse { photons: u32 },
    /// `detectors` entangled pulses of exactly `photons` quanta each.
    EntangledFock { detectors: u32, photons: u32 },
    /// Independent maximally entangled pairs; `detectors` must be even.
    PartialPairs { detectors: u32 },
    /// Two-photon state with a sharp arrival-time difference.
    TwinBeam,
}

impl StateVariant {
    pub fn name(&self) -> &'static str {
        match self {
            StateVariant::ClassicalCoherent { .. } => "classical_coherent",
            StateVariant::UnentangledSingles { .. } => "unentangled_singles",
            StateVariant::EntangledSingles { .. } => "entangled_singles",
            StateVariant::FockPulse { .. } => "fock",
            StateVariant::EntangledFock { .. } => "entangled_fock",
            StateVariant::PartialPairs { .. } => "partial_pairs",
            StateVariant::TwinBeam => "twin_beam",
        }
    }

    /// Detector count of the arrangement.
    pub fn detectors(&self) -> u32 {
        match self {
            StateVariant::ClassicalCoherent { detectors, .. }
            | StateVariant::UnentangledSingles { detectors }
            | StateVariant::EntangledSingles { detectors }
            | StateVariant::EntangledFock { detectors, .. }
            | StateVariant::PartialPairs { detectors } => *detectors,
            StateVariant::FockPulse { .. } => 1,
            StateVariant::TwinBeam => 2,
        }
    }

    /// Photons per pulse (1 for single-photon ensembles).
    pub fn photons_per_pulse(&self) -> u32 {
        match self {
            StateVariant::ClassicalCoherent { mean_photons, .. } => *mean_photons,
            StateVariant::FockPulse { photons } => *photons,
            StateVariant::EntangledFock { photons, .. } => *photons,
            _ => 1,
        }
    }

    /// Total photons generated per trial (mean value for coherent pulses).
    pub fn photons_per_trial(&self) -> u64 {
        self.detectors() as u64 * self.photons_per_pulse() as u64
    }
}

/// A light-state model: ensemble variant plus pulse spectrum.
#[derive(Debug, Clone)]
pub struct StateModel {
    pub variant: StateVariant,
    pub spectrum: Spectrum,
}

impl StateModel {
    pub fn new(variant: StateVariant, spectrum: Spectrum) -> Result<Self> {
        validate_variant(&variant)?;
        Ok(StateModel { variant, spectrum })
    }

    /// Analytic accuracy of the trial estimator at detector efficiency
    /// `eta`, together with the trial survival probability under the
    /// discard-on-loss policy.
    pub fn analytic_accuracy(&self, eta: f64) -> Result<AccuracyPrediction> {
        validate_variant(&self.variant)?;
        check_eta(eta)?;
        let delta_tau = self.spectrum.moments()?.delta_tau;
        Ok(accuracy_from_delta_tau(&self.variant, delta_tau, eta))
    }

    /// Structural tag of the joint arrival density the sampler dispatches
    /// on.
    pub fn joint_density_kind(&self) -> DensityKind {
        density_kind(&self.variant)
    }
}

/// Analytic accuracy prediction for one model at one efficiency.
#[derive(Debug, Clone, Copy)]
pub struct AccuracyPrediction {
    /// Spread of the estimator on a surviving trial.
    pub delta_t: f64,
    /// Probability a trial survives the discard-on-loss policy (for pair
    /// ensembles: per-pair survival, with partial trials still usable).
    pub keep_probability: f64,
    /// Spread per attempted trial, `delta_t / sqrt(keep_probability)`.
    pub effective_delta_t: f64,
}

/// Computes the prediction from an already-known `delta_tau`; used by the
/// threshold analysis where the spectrum factors out.
pub(crate) fn accuracy_from_delta_tau(
    variant: &StateVariant,
    delta_tau: f64,
    eta: f64,
) -> AccuracyPrediction {
    let (delta_t, keep) = match *variant {
        StateVariant::ClassicalCoherent {
            detectors,
            mean_photons,
        } => (
            delta_tau / (detectors as f64 * mean_photons as f64 * eta).sqrt(),
            1.0,
        ),
        StateVariant::UnentangledSingles { detectors } => {
            (delta_tau / (detectors as f64 * eta).sqrt(), 1.0)
        }
        StateVariant::EntangledSingles { detectors } => {
            (delta_tau / detectors as f64, eta.powf(detectors as f64))
        }
        StateVariant::FockPulse { photons } => {
            (delta_tau / photons as f64, eta.powf(photons as f64))
        }
        StateVariant::EntangledFock { detectors, photons } => {
            let k = detectors as f64 * photons as f64;
            (delta_tau / k, eta.powf(k))
        }
        StateVariant::PartialPairs { detectors } => {
            let pairs = detectors as f64 / 2.0;
            (delta_tau / (2.0 * pairs.sqrt()), eta * eta)
        }
        StateVariant::TwinBeam => (delta_tau, eta * eta),
    };
    AccuracyPrediction {
        delta_t,
        keep_probability: keep,
        effective_delta_t: delta_t / keep.sqrt(),
    }
}

/// Structural tag the sampler dispatches on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    /// Independent draws from `|g(t)|^2` per detector; `poisson_counts`
    /// marks coherent pulses whose per-detector photon number is Poisson.
    Iid { detectors: u32, poisson_counts: bool },
    /// All `photons` times bunch: their average is drawn from the
    /// rescaled density `|g(K t)|^2`.
    SumCorrelated { photons: u32 },
    /// Two photons with the arrival-time difference drawn from `|g|^2`.
    DifferenceCorrelated,
    /// Independent `SumCorrelated(group_size)` groups.
    GroupedSum { group_size: u32, group_count: u32 },
}

fn density_kind(variant: &StateVariant) -> DensityKind {
    match *variant {
        StateVariant::ClassicalCoherent { detectors, .. } => DensityKind::Iid {
            detectors,
            poisson_counts: true,
        },
        StateVariant::UnentangledSingles { detectors } => DensityKind::Iid {
            detectors,
            poisson_counts: false,
        },
        StateVariant::EntangledSingles { detectors } => DensityKind::SumCorrelated {
            photons: detectors,
        },
        StateVariant::FockPulse { photons } => DensityKind::SumCorrelated { photons },
        StateVariant::EntangledFock { detectors, photons } => DensityKind::SumCorrelated {
            photons: detectors * photons,
        },
        StateVariant::PartialPairs { detectors } => DensityKind::GroupedSum {
            group_size: 2,
            group_count: detectors / 2,
        },
        StateVariant::TwinBeam => DensityKind::DifferenceCorrelated,
    }
}

pub(crate) fn validate_variant(variant: &StateVariant) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidModel(msg));
    match *variant {
        StateVariant::ClassicalCoherent {
            detectors,
            mean_photons,
        } => {
            if detectors < 1 || mean_photons < 1 {
                return bad(format!(
                    "classical_coherent needs detectors >= 1 and photons >= 1, got ({detectors}, {mean_photons})"
                ));
            }
            if detectors.checked_mul(mean_photons).is_none() {
                return bad(format!(
                    "classical_coherent photon total {detectors} x {mean_photons} overflows"
                ));
            }
        }
        StateVariant::UnentangledSingles { detectors }
        | StateVariant::EntangledSingles { detectors } => {
            if detectors < 1 {
                return bad(format!("detector count must be >= 1, got {detectors}"));
            }
        }
        StateVariant::FockPulse { photons } => {
            if photons < 1 {
                return bad(format!("fock photon number must be >= 1, got {photons}"));
            }
        }
        StateVariant::EntangledFock { detectors, photons } => {
            if detectors < 1 || photons < 1 {
                return bad(format!(
                    "entangled_fock needs detectors >= 1 and photons >= 1, got ({detectors}, {photons})"
                ));
            }
            if detectors.checked_mul(photons).is_none() {
                return bad(format!(
                    "entangled_fock photon total {detectors} x {photons} overflows"
                ));
            }
        }
        StateVariant::PartialPairs { detectors } => {
            if detectors < 2 || !detectors.is_multiple_of(2) {
                return bad(format!(
                    "partial_pairs needs an even detector count >= 2, got {detectors}"
                ));
            }
        }
        StateVariant::TwinBeam => {}
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if eta == 0.0 {
        return Err(Error::DegenerateEfficiency(eta));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "eta must be in (0, 1], got {eta}"
        )));
    }
    Ok(())
}
