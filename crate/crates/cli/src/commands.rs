//! Subcommand implementations and CSV emission.
//!
//! All file output goes through string buffers assembled in trial order
//! with plain `Display` formatting, so identical configuration and seed
//! produce byte-identical files regardless of thread count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qtoa_core::bounds;
use qtoa_core::estimators::{self, AccuracyReport, ScalingAxis};
use qtoa_core::loss_analysis;
use qtoa_core::sampler::{Sampler, SamplerConfig};
use qtoa_core::spectra::Spectrum;
use qtoa_core::states::{StateModel, StateVariant};
use qtoa_core::Error as CoreError;

use crate::config::{ScenarioConfig, SpectrumConfig, VariantName};

/// CLI failure modes, mapped to exit codes by `main`.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: configuration or environment problems.
    Config(String),
    /// Exit 3: a campaign retained too few trials.
    Statistics(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Statistics(m) => write!(f, "{m}"),
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn core_err(e: CoreError) -> CliError {
    match e {
        CoreError::InsufficientStatistics { .. } => CliError::Statistics(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

pub const REPORT_HEADER: &str =
    "model,M,N,eta,trials,kept,empirical_std,analytic_std,ratio,bound_ok";
pub const FIT_HEADER: &str = "axis,exponent,stderr,intercept";
pub const MAP_HEADER: &str = "M,eta,winner";
pub const TRIALS_HEADER: &str = "trial,detector,photon,time,retained";

pub fn build_spectrum(cfg: &ScenarioConfig) -> Result<Spectrum, CliError> {
    match &cfg.spectrum {
        SpectrumConfig::Gaussian {
            center_frequency,
            width,
        } => Spectrum::gaussian(*center_frequency, *width).map_err(core_err),
        SpectrumConfig::Lorentzian {
            center_frequency,
            width,
        } => Spectrum::lorentzian(*center_frequency, *width).map_err(core_err),
        SpectrumConfig::Tabulated { table_path } => {
            let load = Spectrum::from_csv_file(table_path).map_err(core_err)?;
            if load.normalization_deviation > 1e-3 {
                eprintln!(
                    "warning: table {} mass was off by {:.3e}; renormalized",
                    table_path.display(),
                    load.normalization_deviation
                );
            }
            Ok(load.spectrum)
        }
    }
}

/// Builds the state model, optionally overriding the swept parameter.
pub fn build_model(
    cfg: &ScenarioConfig,
    spectrum: &Spectrum,
    m_override: Option<u32>,
    n_override: Option<u32>,
) -> Result<StateModel, CliError> {
    let variant = cfg.model.variant;
    let need_m = || -> Result<u32, CliError> {
        m_override
            .or(cfg.model.detectors)
            .ok_or_else(|| config_err(format!("model.m: required for `{}`", variant.as_str())))
    };
    let need_n = || -> Result<u32, CliError> {
        n_override
            .or(cfg.model.photons)
            .ok_or_else(|| config_err(format!("model.n: required for `{}`", variant.as_str())))
    };
    let v = match variant {
        VariantName::ClassicalCoherent => StateVariant::ClassicalCoherent {
            detectors: need_m()?,
            mean_photons: need_n()?,
        },
        VariantName::UnentangledSingles => StateVariant::UnentangledSingles {
            detectors: need_m()?,
        },
        VariantName::EntangledSingles => StateVariant::EntangledSingles {
            detectors: need_m()?,
        },
        VariantName::Fock => StateVariant::FockPulse { photons: need_n()? },
        VariantName::EntangledFock => StateVariant::EntangledFock {
            detectors: need_m()?,
            photons: need_n()?,
        },
        VariantName::PartialPairs => StateVariant::PartialPairs {
            detectors: need_m()?,
        },
        VariantName::TwinBeam => StateVariant::TwinBeam,
    };
    StateModel::new(v, spectrum.clone()).map_err(core_err)
}

fn sampler_config(cfg: &ScenarioConfig) -> SamplerConfig {
    SamplerConfig {
        window_half_width: cfg.window_half_width,
        grid_size: cfg.grid_size,
    }
}

fn report_row(report: &AccuracyReport, time_scale: f64) -> Result<String, CliError> {
    let ok = bounds::bound_ok(report).map_err(core_err)?;
    Ok(format!(
        "{},{},{},{},{},{},{},{},{},{}",
        report.model.variant.name(),
        report.model.variant.detectors(),
        report.model.variant.photons_per_pulse(),
        report.eta,
        report.trials_attempted,
        report.trials_kept,
        report.empirical_std * time_scale,
        report.analytic.delta_t * time_scale,
        report.ratio,
        ok
    ))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| config_err(format!("cannot write {}: {e}", path.display())))
}

/// On an insufficient-statistics failure the partial CSV is still
/// written, with a trailing `status` column naming the failed point.
fn write_partial(
    path: &Path,
    rows: &[String],
    failed_label: &str,
    error: &CoreError,
) -> Result<(), CliError> {
    let mut out = String::new();
    out.push_str(REPORT_HEADER);
    out.push_str(",status\n");
    for row in rows {
        out.push_str(row);
        out.push_str(",ok\n");
    }
    let _ = writeln!(out, "{failed_label},{error}");
    write_file(path, &out)
}

/// Blank numeric fields for a point that produced no statistics.
fn failed_row_label(model: &StateModel, eta: f64, trials: u64) -> String {
    format!(
        "{},{},{},{},{},,,,,",
        model.variant.name(),
        model.variant.detectors(),
        model.variant.photons_per_pulse(),
        eta,
        trials
    )
}

pub fn simulate(cfg: &ScenarioConfig, dump_trials: bool) -> Result<(), CliError> {
    let spectrum = build_spectrum(cfg)?;
    let model = build_model(cfg, &spectrum, None, None)?;
    let sc = sampler_config(cfg);
    match estimators::run_campaign_with(&model, cfg.eta, cfg.trials, cfg.seed, &sc) {
        Ok(report) => {
            let mut out = String::new();
            out.push_str(REPORT_HEADER);
            out.push('\n');
            out.push_str(&report_row(&report, cfg.time_scale)?);
            out.push('\n');
            write_file(&cfg.output_path, &out)?;
            if dump_trials {
                write_trial_dump(cfg, &model, &sc)?;
            }
            Ok(())
        }
        Err(e @ CoreError::InsufficientStatistics { .. }) => {
            write_partial(
                &cfg.output_path,
                &[],
                &failed_row_label(&model, cfg.eta, cfg.trials),
                &e,
            )?;
            Err(core_err(e))
        }
        Err(e) => Err(core_err(e)),
    }
}

fn write_trial_dump(
    cfg: &ScenarioConfig,
    model: &StateModel,
    sc: &SamplerConfig,
) -> Result<(), CliError> {
    let sampler = Sampler::new(model, sc).map_err(core_err)?;
    let records = sampler.sample_campaign(cfg.eta, cfg.trials, cfg.seed);
    let mut out = String::with_capacity(records.len() * 24);
    out.push_str(TRIALS_HEADER);
    out.push('\n');
    for (trial, rec) in records.iter().enumerate() {
        for (d, det) in rec.per_detector.iter().enumerate() {
            for (p, (&t, &kept)) in det.times.iter().zip(&det.retained).enumerate() {
                let _ = writeln!(out, "{trial},{d},{p},{},{}", t * cfg.time_scale, kept);
            }
        }
    }
    write_file(&dump_path(&cfg.output_path), &out)
}

pub fn dump_path(out: &Path) -> PathBuf {
    out.with_extension("trials.csv")
}

pub fn fit_path(out: &Path) -> PathBuf {
    out.with_extension("fit.csv")
}

/// A sweep over `m_list` or `n_list`: per-point report rows plus a
/// scaling-fit summary row in a sibling `.fit.csv` file.
pub fn scaling(cfg: &ScenarioConfig) -> Result<(), CliError> {
    let (axis, values) = match (&cfg.m_list, &cfg.n_list) {
        (Some(m), None) => (ScalingAxis::DetectorCount, m.clone()),
        (None, Some(n)) => (ScalingAxis::PhotonNumber, n.clone()),
        (Some(_), Some(_)) => {
            return Err(config_err(
                "run.m_list / run.n_list: scaling sweeps exactly one of them",
            ))
        }
        (None, None) => {
            return Err(config_err(
                "run.m_list: scaling needs m_list or n_list in [run]",
            ))
        }
    };
    if values.len() < 4 {
        return Err(config_err(format!(
            "run.{}: scaling fits need at least 4 points, got {}",
            if axis == ScalingAxis::DetectorCount {
                "m_list"
            } else {
                "n_list"
            },
            values.len()
        )));
    }
    let reports = run_sweep(cfg, axis, &values)?;
    let mut out = String::new();
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for r in &reports {
        out.push_str(&report_row(r, cfg.time_scale)?);
        out.push('\n');
    }
    write_file(&cfg.output_path, &out)?;

    let fit = estimators::fit_scaling(&reports, axis).map_err(core_err)?;
    // Time scaling shifts the fit intercept; the exponent is scale-free.
    let intercept = fit.intercept + cfg.time_scale.ln();
    let mut fout = String::new();
    fout.push_str(FIT_HEADER);
    fout.push('\n');
    let _ = writeln!(
        fout,
        "{},{},{},{}",
        fit.axis.name(),
        fit.exponent,
        fit.stderr,
        intercept
    );
    write_file(&fit_path(&cfg.output_path), &fout)
}

fn run_sweep(
    cfg: &ScenarioConfig,
    axis: ScalingAxis,
    values: &[u32],
) -> Result<Vec<AccuracyReport>, CliError> {
    let spectrum = build_spectrum(cfg)?;
    let sc = sampler_config(cfg);
    let mut reports = Vec::with_capacity(values.len());
    let mut rows = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let (m_override, n_override) = match axis {
            ScalingAxis::DetectorCount => (Some(v), None),
            ScalingAxis::PhotonNumber => (None, Some(v)),
        };
        let model = build_model(cfg, &spectrum, m_override, n_override)?;
        let seed = cfg.seed.wrapping_add(i as u64);
        match estimators::run_campaign_with(&model, cfg.eta, cfg.trials, seed, &sc) {
            Ok(r) => {
                rows.push(report_row(&r, cfg.time_scale)?);
                reports.push(r);
            }
            Err(e @ CoreError::InsufficientStatistics { .. }) => {
                write_partial(
                    &cfg.output_path,
                    &rows,
                    &failed_row_label(&model, cfg.eta, cfg.trials),
                    &e,
                )?;
                return Err(core_err(e));
            }
            Err(e) => return Err(core_err(e)),
        }
    }
    Ok(reports)
}

/// Region-map CSV over the configured detector counts and efficiencies.
pub fn loss_map(cfg: &ScenarioConfig) -> Result<(), CliError> {
    let m_values = cfg
        .m_list
        .as_ref()
        .ok_or_else(|| config_err("run.m_list: loss-map needs a detector grid"))?;
    let eta_grid = cfg
        .eta_list
        .as_ref()
        .ok_or_else(|| config_err("run.eta_list: loss-map needs an efficiency grid"))?;
    let map = loss_analysis::region_map(m_values, eta_grid).map_err(core_err)?;
    let mut out = String::new();
    out.push_str(MAP_HEADER);
    out.push('\n');
    for (i, &m) in map.m_values.iter().enumerate() {
        for (j, &eta) in map.eta_grid.iter().enumerate() {
            let _ = writeln!(out, "{m},{eta},{}", map.winner(i, j).name());
        }
    }
    write_file(&cfg.output_path, &out)
}

/// Re-runs the configured campaign (or sweep) and reports with the
/// `bound_ok` column; prints a violation summary.
pub fn bounds_check(cfg: &ScenarioConfig) -> Result<(), CliError> {
    let reports = if cfg.m_list.is_some() || cfg.n_list.is_some() {
        let (axis, values) = match (&cfg.m_list, &cfg.n_list) {
            (Some(m), None) => (ScalingAxis::DetectorCount, m.clone()),
            (None, Some(n)) => (ScalingAxis::PhotonNumber, n.clone()),
            _ => {
                return Err(config_err(
                    "run.m_list / run.n_list: bounds-check sweeps at most one of them",
                ))
            }
        };
        run_sweep(cfg, axis, &values)?
    } else {
        let spectrum = build_spectrum(cfg)?;
        let model = build_model(cfg, &spectrum, None, None)?;
        match estimators::run_campaign_with(&model, cfg.eta, cfg.trials, cfg.seed, &sampler_config(cfg))
        {
            Ok(r) => vec![r],
            Err(e @ CoreError::InsufficientStatistics { .. }) => {
                write_partial(
                    &cfg.output_path,
                    &[],
                    &failed_row_label(&model, cfg.eta, cfg.trials),
                    &e,
                )?;
                return Err(core_err(e));
            }
            Err(e) => return Err(core_err(e)),
        }
    };
    let mut out = String::new();
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for r in &reports {
        out.push_str(&report_row(r, cfg.time_scale)?);
        out.push('\n');
    }
    write_file(&cfg.output_path, &out)?;
    let violations = bounds::check_reports(&reports).map_err(core_err)?;
    println!(
        "bound violations: {} of {} campaigns",
        violations.len(),
        reports.len()
    );
    Ok(())
}
