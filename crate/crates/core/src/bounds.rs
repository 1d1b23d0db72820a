//! Quantum speed-limit lower bounds on timing accuracy.
//!
//! Two bounds are evaluated per ensemble, both in natural units:
//!
//! - the orthogonality time `pi / (2 dE)`: a system with energy spread
//!   `dE` needs at least this long to evolve into an orthogonal state;
//! - the mean-energy limit `2 / (pi E)` with `E` measured from the ground
//!   state.
//!
//! Energy spreads combine according to how the ensemble is correlated:
//! classically combined systems add in quadrature (`sqrt(n) dE`), while
//! entangled or number-squeezed ensembles reach spreads proportional to
//! the photon number (`n dE`). The single-photon spread is identified
//! with the spectrum's `delta_omega` and the single-photon energy with
//! the carrier frequency.
//!
//! The checker asserts the one-sided inequality that no simulated
//! campaign beats these limits. For that comparison the orthogonality
//! time is converted to its estimation form `1 / (2 dE)`: orthogonality
//! is the stronger requirement of full distinguishability, and a
//! single-shot unbiased estimator can reach (but not beat) a spread of
//! `1 / (2 dE)` — the Gaussian pulse saturates it exactly, sitting a
//! factor `pi` below the orthogonality time itself. A small allowance for
//! the sampling noise of the measured spread keeps the check one-sided.

use std::f64::consts::PI;

use crate::estimators::AccuracyReport;
use crate::states::{StateModel, StateVariant};
use crate::stats::std_of_std_rel;
use crate::Result;

/// How an ensemble's energy spread was combined from single photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyDerivation {
    /// `sqrt(photons) * dE_single`: uncorrelated photons.
    Classical { photons: u32 },
    /// `photons * dE_single`: one shared frequency variable.
    Entangled { photons: u32 },
    /// `photons * dE_single`: number-squeezed single pulse.
    Squeezed { photons: u32 },
    /// `pulses * photons * dE_single`.
    EntangledSqueezed { pulses: u32, photons: u32 },
    /// `sqrt(pairs) * 2 dE_single`: independently entangled pairs.
    PairsClassical { pairs: u32 },
    /// Twin beam, difference estimation: the anticorrelated frequencies
    /// leave the difference generator with the single-photon spread.
    TwinBeamDifference,
}

/// Mean energy and energy spread of one ensemble (natural units: both in
/// angular frequency).
#[derive(Debug, Clone, Copy)]
pub struct EnergyProfile {
    pub mean_energy: f64,
    pub energy_spread: f64,
    pub derivation: EnergyDerivation,
}

impl EnergyProfile {
    pub fn new(mean_energy: f64, energy_spread: f64, derivation: EnergyDerivation) -> Self {
        EnergyProfile {
            mean_energy,
            energy_spread,
            derivation,
        }
    }

    /// Profile of a state model, with `dE_single = delta_omega` of the
    /// spectrum and `E_single = ` carrier frequency.
    ///
    /// The carrier must be positive: with zero ground-state energy a
    /// photon's mean energy is its frequency, so a spectrum centered at
    /// or below zero has no physical energy accounting to bound.
    pub fn for_model(model: &StateModel) -> Result<Self> {
        let moments = model.spectrum.moments()?;
        let de = moments.delta_omega;
        let e = model.spectrum.center_frequency();
        if e <= 0.0 || e.is_nan() {
            return Err(crate::Error::InvalidModel(format!(
                "energy bounds need a positive carrier frequency, got {e}"
            )));
        }
        let profile = match model.variant {
            StateVariant::ClassicalCoherent {
                detectors,
                mean_photons,
            } => {
                let photons = detectors * mean_photons;
                EnergyProfile::new(
                    photons as f64 * e,
                    (photons as f64).sqrt() * de,
                    EnergyDerivation::Classical { photons },
                )
            }
            StateVariant::UnentangledSingles { detectors } => EnergyProfile::new(
                detectors as f64 * e,
                (detectors as f64).sqrt() * de,
                EnergyDerivation::Classical { photons: detectors },
            ),
            StateVariant::EntangledSingles { detectors } => EnergyProfile::new(
                detectors as f64 * e,
                detectors as f64 * de,
                EnergyDerivation::Entangled { photons: detectors },
            ),
            StateVariant::FockPulse { photons } => EnergyProfile::new(
                photons as f64 * e,
                photons as f64 * de,
                EnergyDerivation::Squeezed { photons },
            ),
            StateVariant::EntangledFock { detectors, photons } => EnergyProfile::new(
                (detectors * photons) as f64 * e,
                (detectors * photons) as f64 * de,
                EnergyDerivation::EntangledSqueezed {
                    pulses: detectors,
                    photons,
                },
            ),
            StateVariant::PartialPairs { detectors } => {
                let pairs = detectors / 2;
                EnergyProfile::new(
                    detectors as f64 * e,
                    (pairs as f64).sqrt() * 2.0 * de,
                    EnergyDerivation::PairsClassical { pairs },
                )
            }
            StateVariant::TwinBeam => {
                EnergyProfile::new(2.0 * e, de, EnergyDerivation::TwinBeamDifference)
            }
        };
        Ok(profile)
    }
}

/// Orthogonality time of the ensemble: `pi / (2 dE)`.
pub fn orthogonality_bound(profile: &EnergyProfile) -> f64 {
    PI / (2.0 * profile.energy_spread)
}

/// Mean-energy limit on the time to reach an orthogonal state:
/// `2 / (pi E)`, with the ground-state energy taken as zero.
pub fn ml_bound(profile: &EnergyProfile) -> f64 {
    2.0 / (PI * profile.mean_energy)
}

/// Estimation form of the orthogonality limit: the smallest spread an
/// unbiased single-trial estimator can reach, `1 / (2 dE)` (the
/// orthogonality time divided by `pi`).
pub fn estimation_floor(profile: &EnergyProfile) -> f64 {
    1.0 / (2.0 * profile.energy_spread)
}

/// One report that fell below the quantum limits.
#[derive(Debug, Clone)]
pub struct BoundViolation {
    pub report_index: usize,
    pub empirical_std: f64,
    /// The limit that was beaten.
    pub bound: f64,
}

/// The limit a single report is checked against: the larger of the
/// energy-spread estimation floor and the mean-energy bound, reduced by a
/// five-sigma allowance for the sampling noise of the measured spread.
pub fn violation_threshold(report: &AccuracyReport, profile: &EnergyProfile) -> f64 {
    let floor = estimation_floor(profile).max(ml_bound(profile));
    let slack = (5.0 * std_of_std_rel(report.spread_samples)).min(0.5);
    floor * (1.0 - slack)
}

/// Whether a report respects the quantum limits.
pub fn bound_ok(report: &AccuracyReport) -> Result<bool> {
    let profile = EnergyProfile::for_model(&report.model)?;
    Ok(report.empirical_std >= violation_threshold(report, &profile))
}

/// Scans campaign reports for accuracies beating the quantum limits.
/// A correct sampler never produces one; the expected result is empty.
pub fn check_reports(reports: &[AccuracyReport]) -> Result<Vec<BoundViolation>> {
    let mut violations = Vec::new();
    for (i, report) in reports.iter().enumerate() {
        let profile = EnergyProfile::for_model(&report.model)?;
        let threshold = violation_threshold(report, &profile);
        if report.empirical_std < threshold {
            violations.push(BoundViolation {
                report_index: i,
                empirical_std: report.empirical_std,
                bound: threshold,
            });
        }
    }
    Ok(violations)
}
