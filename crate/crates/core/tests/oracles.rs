//! Independent-oracle checks: the library's closed forms and quadrature
//! are confirmed against a plain Riemann Fourier route, reference CDFs,
//! and direct Monte Carlo statistics.

mod common;

use common::{gaussian_power, laplace_cdf, lorentzian_power, normal_cdf, NumericDensity};
use qtoa_core::estimators::run_campaign;
use qtoa_core::sampler::{Sampler, SamplerConfig};
use qtoa_core::spectra::Spectrum;
use qtoa_core::states::{StateModel, StateVariant};
use qtoa_core::stats::{ks_critical, ks_statistic};

/// Numeric Fourier + Riemann-moment oracle for the Gaussian: the time
/// density has std exactly half the inverse spectral std.
#[test]
fn oracle_gaussian_time_bandwidth() {
    let oracle = NumericDensity::build(
        |w| gaussian_power(w, 0.0, 1.0),
        -12.0,
        12.0,
        3001,
        -6.0,
        6.0,
        1201,
    );
    let (mass, mean, std) = oracle.moments();
    assert!((mass - 1.0).abs() < 1e-6, "oracle mass {mass}");
    assert!(mean.abs() < 1e-9);
    assert!((std - 0.5).abs() < 1e-6, "oracle std {std}");

    let lib = Spectrum::gaussian(0.0, 1.0).unwrap().moments().unwrap();
    assert!((lib.delta_tau - std).abs() < 1e-5);
    assert!((lib.delta_tau * lib.delta_omega - 0.5).abs() < 1e-6);
}

/// Same oracle for the Lorentzian: `|g|^2` is the two-sided exponential
/// `G exp(-2 G |t|)` with std `1/(sqrt(2) G)`.
#[test]
fn oracle_lorentzian_density_and_std() {
    let gamma = 1.0;
    // The amplitude decays only as 1/w^2, so the truncation window must
    // be wide for the Riemann route to settle.
    let oracle = NumericDensity::build(
        |w| lorentzian_power(w, 0.0, gamma),
        -1200.0,
        1200.0,
        240_001,
        -9.0,
        9.0,
        901,
    );
    let (mass, _, std) = oracle.moments();
    assert!((mass - 1.0).abs() < 2e-3, "oracle mass {mass}");
    let expect = 1.0 / (2.0f64.sqrt() * gamma);
    assert!((std - expect).abs() < 2e-3, "oracle std {std} vs {expect}");

    let spec = Spectrum::lorentzian(0.0, gamma).unwrap();
    let lib = spec.moments().unwrap();
    assert!((lib.delta_tau - expect).abs() < 1e-6, "{}", lib.delta_tau);

    // Pointwise shape against the numeric route and the exponential law.
    for t in [-2.0, -1.0, -0.3, 0.0, 0.4, 1.5] {
        let d = spec.arrival_density(t);
        let law = gamma * (-2.0 * gamma * t.abs()).exp();
        assert!((d - law).abs() < 1e-12);
        assert!((oracle.value_at(t) - law).abs() < 2e-3, "t = {t}");
    }
}

/// Spectrum-to-time consistency for tabulated data: the library's Fourier
/// sum agrees with the independent numeric route in RMS.
#[test]
fn oracle_tabulated_parseval_consistency() {
    let pts = common::gaussian_table(0.0, 1.0, 8.0, 513);
    let spec = Spectrum::from_table_points(&pts).unwrap().spectrum;
    let oracle = NumericDensity::build(
        |w| gaussian_power(w, 0.0, 1.0),
        -8.0,
        8.0,
        513,
        -4.0,
        4.0,
        801,
    );
    let mut rms = 0.0;
    let n = 801;
    for i in 0..n {
        let t = -4.0 + 8.0 * i as f64 / (n - 1) as f64;
        let d = spec.arrival_density(t) - oracle.value_at(t);
        rms += d * d;
    }
    rms = (rms / n as f64).sqrt();
    assert!(rms < 1e-4, "rms {rms}");
}

/// Inverse-CDF tables reproduce the reference quantiles of both closed
/// forms.
#[test]
fn oracle_quantiles_from_reference_cdfs() {
    let gauss = Spectrum::gaussian(0.0, 1.0).unwrap();
    let table = gauss.inverse_cdf_table(4096).unwrap();
    for u in [0.05, 0.2, 0.5, 0.75, 0.9, 0.99] {
        let t = table.sample(u);
        assert!((normal_cdf(t, 0.0, 0.5) - u).abs() < 1e-5, "u {u}");
    }

    let lor = Spectrum::lorentzian(0.0, 1.0).unwrap();
    let table = lor.inverse_cdf_table(4096).unwrap();
    for u in [0.05, 0.2, 0.5, 0.75, 0.9, 0.99] {
        let t = table.sample(u);
        assert!((laplace_cdf(t, 2.0) - u).abs() < 1e-5, "u {u}");
    }
}

fn ks_of_sampled_averages<F: Fn(f64) -> f64>(
    spectrum: Spectrum,
    detectors: u32,
    cdf: F,
    seed: u64,
) -> f64 {
    let model = StateModel::new(StateVariant::EntangledSingles { detectors }, spectrum).unwrap();
    let sampler = Sampler::new(&model, &SamplerConfig::default()).unwrap();
    let averages: Vec<f64> = sampler
        .sample_campaign(1.0, 10_000, seed)
        .iter()
        .map(|rec| {
            let times: Vec<f64> = rec
                .per_detector
                .iter()
                .flat_map(|d| d.times.iter().copied())
                .collect();
            times.iter().sum::<f64>() / times.len() as f64
        })
        .collect();
    ks_statistic(&averages, cdf)
}

/// KS test of the bunched averages against the rescaled analytic density
/// for every built-in spectrum kind and K in {1, 2, 4, 8}.
#[test]
fn oracle_ks_bunched_averages() {
    let crit = ks_critical(0.01, 10_000);
    for (i, &m) in [1u32, 2, 4, 8].iter().enumerate() {
        let k = m as f64;
        let d = ks_of_sampled_averages(
            Spectrum::gaussian(0.0, 1.0).unwrap(),
            m,
            move |t| normal_cdf(t, 0.0, 0.5 / k),
            1000 + i as u64,
        );
        assert!(d < crit, "gaussian M {m}: D {d} vs {crit}");

        let d = ks_of_sampled_averages(
            Spectrum::lorentzian(0.0, 1.0).unwrap(),
            m,
            move |t| laplace_cdf(t * k, 2.0),
            2000 + i as u64,
        );
        assert!(d < crit, "lorentzian M {m}: D {d} vs {crit}");

        let tab = Spectrum::from_table_points(&common::gaussian_table(0.0, 1.0, 8.0, 513))
            .unwrap()
            .spectrum;
        let d = ks_of_sampled_averages(tab, m, move |t| normal_cdf(t, 0.0, 0.5 / k), 3000 + i as u64);
        assert!(d < crit, "tabulated M {m}: D {d} vs {crit}");
    }
}

/// Loss commutes with sampling: the retained-photon arrival marginal of
/// an independent-photon ensemble is unchanged by the channel.
#[test]
fn oracle_loss_preserves_retained_marginal() {
    let model = StateModel::new(
        StateVariant::UnentangledSingles { detectors: 4 },
        Spectrum::gaussian(0.0, 1.0).unwrap(),
    )
    .unwrap();
    let sampler = Sampler::new(&model, &SamplerConfig::default()).unwrap();
    let mut retained = Vec::new();
    for rec in sampler.sample_campaign(0.6, 5_000, 77) {
        for det in &rec.per_detector {
            retained.extend(det.retained_times());
        }
    }
    let d = ks_statistic(&retained, |t| normal_cdf(t, 0.0, 0.5));
    assert!(d < ks_critical(0.01, retained.len()), "D {d}");
}

/// Monte Carlo campaign oracle for the classical single-pulse baseline:
/// the measured spread matches `delta_tau = 0.5` per attempted trial.
#[test]
fn oracle_classical_single_pulse_campaign() {
    let model = StateModel::new(
        StateVariant::ClassicalCoherent {
            detectors: 1,
            mean_photons: 1,
        },
        Spectrum::gaussian(100.0, 1.0).unwrap(),
    )
    .unwrap();
    let report = run_campaign(&model, 1.0, 100_000, 4).unwrap();
    assert!((report.analytic.delta_t - 0.5).abs() < 1e-7);
    assert!(
        (report.empirical_std - 0.5).abs() < 0.5 * report.ratio_band(3.0),
        "std {}",
        report.empirical_std
    );
}

/// Seed independence: campaigns under neighboring seeds agree within
/// statistical error.
#[test]
fn oracle_neighboring_seed_statistics() {
    let model = StateModel::new(
        StateVariant::EntangledSingles { detectors: 4 },
        Spectrum::gaussian(100.0, 1.0).unwrap(),
    )
    .unwrap();
    let a = run_campaign(&model, 1.0, 50_000, 500).unwrap();
    let b = run_campaign(&model, 1.0, 50_000, 501).unwrap();
    let band = a.ratio_band(4.0) + b.ratio_band(4.0);
    assert!(
        (a.empirical_std - b.empirical_std).abs() / a.empirical_std < band,
        "{} vs {}",
        a.empirical_std,
        b.empirical_std
    );
}
