//! Seeded Monte Carlo generation of arrival-time trial records.
//!
//! Sampling is inverse-CDF throughout (a deterministic draw count per
//! value), and every trial owns an [`RngStream`] derived from the master
//! seed and the trial index. Campaigns may therefore fan trials across
//! threads freely: trial `k` produces bit-identical draws no matter where
//! or when it runs, and aggregation preserves trial order.
//!
//! For the bunched ensembles the joint density constrains only the sum of
//! the arrival times. The trial average is drawn exactly from its proper
//! density `|g(K t)|^2`; the individual times are then laid out as
//! zero-mean uniform offsets on a finite acquisition window (default
//! half-width `10 * delta_tau * K`). The offsets are recentered so they
//! sum to zero exactly, which keeps the estimator distribution exact; the
//! individual marginals are acquisition-window plumbing and carry no
//! timing information on their own.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::spectra::{InverseCdfTable, TimeMoments};
use crate::states::{DensityKind, StateModel, StateVariant};
use crate::{Error, Result};

/// One independent random stream, keyed by `(master_seed, stream_index)`.
///
/// Streams with distinct keys are statistically independent; the same key
/// always reproduces the same draws.
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        RngStream { rng }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}

/// Photon arrivals at one detector. `times` and `retained` are parallel:
/// `retained[k]` says whether photon `k` survived the loss channel.
#[derive(Debug, Clone, Default)]
pub struct DetectorRecord {
    pub times: Vec<f64>,
    pub retained: Vec<bool>,
}

impl DetectorRecord {
    fn push(&mut self, t: f64) {
        self.times.push(t);
        self.retained.push(true);
    }

    fn clear(&mut self) {
        self.times.clear();
        self.retained.clear();
    }

    /// Number of photons kept by the loss channel.
    pub fn detected_count(&self) -> usize {
        self.retained.iter().filter(|&&r| r).count()
    }

    /// Arrival times of the retained photons.
    pub fn retained_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.times
            .iter()
            .zip(&self.retained)
            .filter_map(|(&t, &r)| r.then_some(t))
    }
}

/// One Monte Carlo trial: per-detector arrivals, the loss flag, and the
/// density descriptor the sampler used.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub per_detector: Vec<DetectorRecord>,
    pub lost_any: bool,
    pub kind: DensityKind,
}

impl Default for TrialRecord {
    fn default() -> Self {
        TrialRecord {
            per_detector: Vec::new(),
            lost_any: false,
            kind: DensityKind::Iid {
                detectors: 0,
                poisson_counts: false,
            },
        }
    }
}

impl TrialRecord {
    /// Total photons generated in the trial (before loss).
    pub fn photons_generated(&self) -> usize {
        self.per_detector.iter().map(|d| d.times.len()).sum()
    }

    /// Resets for reuse, keeping inner buffers allocated.
    fn reset(&mut self, detectors: usize, kind: DensityKind) {
        for d in &mut self.per_detector {
            d.clear();
        }
        if self.per_detector.len() < detectors {
            self.per_detector.resize_with(detectors, Default::default);
        } else {
            self.per_detector.truncate(detectors);
        }
        self.lost_any = false;
        self.kind = kind;
    }
}

/// Sampler configuration knobs.
#[derive(Debug, Clone)]
pub struct SamplerConfig {
    /// Half-width of the acquisition window for the offset / midpoint
    /// draws; `None` picks `10 * delta_tau * K`.
    pub window_half_width: Option<f64>,
    /// Minimum inverse-CDF table resolution.
    pub grid_size: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            window_half_width: None,
            grid_size: 4096,
        }
    }
}

/// Trial generator for one state model: owns the inverse-CDF table, the
/// spectrum moments, and the acquisition window.
pub struct Sampler {
    variant: StateVariant,
    kind: DensityKind,
    table: InverseCdfTable,
    moments: TimeMoments,
    offset_half_width: f64,
    poisson: Option<Poisson<f64>>,
}

impl Sampler {
    pub fn new(model: &StateModel, config: &SamplerConfig) -> Result<Self> {
        crate::states::validate_variant(&model.variant)?;
        let kind = model.joint_density_kind();
        let moments = model.spectrum.moments()?;
        let table = model.spectrum.inverse_cdf_table(config.grid_size)?;
        let correlated = match kind {
            DensityKind::SumCorrelated { photons } => photons,
            DensityKind::GroupedSum { group_size, .. } => group_size,
            DensityKind::DifferenceCorrelated => 2,
            DensityKind::Iid { .. } => 1,
        };
        let offset_half_width = match config.window_half_width {
            Some(w) => {
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::SamplerConfig(format!(
                        "acquisition window half-width must be positive, got {w}"
                    )));
                }
                w
            }
            None => 10.0 * moments.delta_tau * correlated as f64,
        };
        let poisson = match model.variant {
            StateVariant::ClassicalCoherent { mean_photons, .. } => Some(
                Poisson::new(mean_photons as f64)
                    .map_err(|e| Error::SamplerConfig(format!("poisson counts: {e}")))?,
            ),
            _ => None,
        };
        Ok(Sampler {
            variant: model.variant,
            kind,
            table,
            moments,
            offset_half_width,
            poisson,
        })
    }

    pub fn moments(&self) -> &TimeMoments {
        &self.moments
    }

    pub fn density_kind(&self) -> DensityKind {
        self.kind
    }

    pub fn variant(&self) -> StateVariant {
        self.variant
    }

    /// Draws one trial (no loss applied).
    pub fn sample_trial(&self, rng: &mut RngStream) -> TrialRecord {
        let mut rec = TrialRecord::default();
        self.sample_trial_into(rng, &mut rec);
        rec
    }

    /// Draws one trial into a reusable record.
    pub fn sample_trial_into(&self, rng: &mut RngStream, rec: &mut TrialRecord) {
        let detectors = self.variant.detectors() as usize;
        rec.reset(detectors, self.kind);
        match self.kind {
            DensityKind::Iid { poisson_counts, .. } => {
                for d in 0..detectors {
                    let count = if poisson_counts {
                        self.poisson
                            .as_ref()
                            .expect("poisson sampler present for coherent pulses")
                            .sample(&mut rng.rng) as usize
                    } else {
                        1
                    };
                    for _ in 0..count {
                        let t = self.draw_time(rng);
                        rec.per_detector[d].push(t);
                    }
                }
            }
            DensityKind::SumCorrelated { photons } => {
                let per_detector = photons as usize / detectors;
                let t_bar = self.draw_sum_average(photons, rng);
                self.place_bunched(rec, 0, detectors, per_detector, t_bar, rng);
            }
            DensityKind::GroupedSum {
                group_size,
                group_count,
            } => {
                for g in 0..group_count as usize {
                    let t_bar = self.draw_sum_average(group_size, rng);
                    self.place_bunched(rec, g * group_size as usize, group_size as usize, 1, t_bar, rng);
                }
            }
            DensityKind::DifferenceCorrelated => {
                let diff = self.draw_time(rng);
                let mid = self.draw_offset(rng);
                rec.per_detector[0].push(mid + 0.5 * diff);
                rec.per_detector[1].push(mid - 0.5 * diff);
            }
        }
    }

    /// One inverse-CDF draw from `|g(t)|^2`.
    fn draw_time(&self, rng: &mut RngStream) -> f64 {
        self.table.sample(rng.rng.random::<f64>())
    }

    /// Average of `k` bunched photons: density `|g(k t)|^2`, i.e. the
    /// base draw rescaled to spread `delta_tau / k`.
    fn draw_sum_average(&self, k: u32, rng: &mut RngStream) -> f64 {
        self.draw_time(rng) / k as f64
    }

    fn draw_offset(&self, rng: &mut RngStream) -> f64 {
        rng.rng
            .random_range(-self.offset_half_width..=self.offset_half_width)
    }

    /// Places `detectors * per_detector` bunched photons starting at
    /// detector `first`, with zero-sum uniform offsets around `t_bar`.
    fn place_bunched(
        &self,
        rec: &mut TrialRecord,
        first: usize,
        detectors: usize,
        per_detector: usize,
        t_bar: f64,
        rng: &mut RngStream,
    ) {
        let total = detectors * per_detector;
        if total == 1 {
            rec.per_detector[first].push(t_bar);
            return;
        }
        // Two passes over the same offsets: deterministic count of draws,
        // and the recentering makes the mean exactly t_bar.
        let mut sum = 0.0;
        for d in 0..detectors {
            let det = &mut rec.per_detector[first + d];
            for _ in 0..per_detector {
                let off = rng.rng.random_range(-1.0..=1.0) * self.offset_half_width;
                det.push(off);
                sum += off;
            }
        }
        let mean = sum / total as f64;
        for d in 0..detectors {
            for t in &mut rec.per_detector[first + d].times {
                *t += t_bar - mean;
            }
        }
    }

    /// Materialized campaign: trial `k` uses `RngStream(master_seed, k)`
    /// and the loss channel at `eta`; output order is by trial index.
    pub fn sample_campaign(&self, eta: f64, trials: u64, master_seed: u64) -> Vec<TrialRecord> {
        (0..trials)
            .into_par_iter()
            .map(|k| {
                let mut rng = RngStream::new(master_seed, k);
                let mut rec = self.sample_trial(&mut rng);
                apply_loss(&mut rec, eta, &mut rng);
                rec
            })
            .collect()
    }

    /// Streaming campaign fold: like [`Sampler::sample_campaign`] but
    /// without materializing records. Each worker folds a contiguous
    /// chunk of trial indices into an accumulator; chunk accumulators are
    /// merged in index order, so the result does not depend on the thread
    /// count.
    pub fn fold_campaign<A, F, M>(
        &self,
        eta: f64,
        trials: u64,
        master_seed: u64,
        fold: F,
        merge: M,
    ) -> A
    where
        A: Default + Send,
        F: Fn(&TrialRecord, &mut A) + Sync,
        M: Fn(&mut A, A),
    {
        const CHUNK: u64 = 8192;
        let chunks = trials.div_ceil(CHUNK);
        let partials: Vec<A> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = A::default();
                let mut rec = TrialRecord::default();
                let lo = c * CHUNK;
                let hi = ((c + 1) * CHUNK).min(trials);
                for k in lo..hi {
                    let mut rng = RngStream::new(master_seed, k);
                    self.sample_trial_into(&mut rng, &mut rec);
                    apply_loss(&mut rec, eta, &mut rng);
                    fold(&rec, &mut acc);
                }
                acc
            })
            .collect();
        let mut total = A::default();
        for p in partials {
            merge(&mut total, p);
        }
        total
    }
}

/// Binomial loss channel: each photon is independently retained with
/// probability `eta`; arrival times of retained photons are unchanged and
/// `lost_any` records whether anything was dropped.
pub fn apply_loss(rec: &mut TrialRecord, eta: f64, rng: &mut RngStream) {
    debug_assert!((0.0..=1.0).contains(&eta));
    if eta >= 1.0 {
        return;
    }
    for det in &mut rec.per_detector {
        for r in &mut det.retained {
            if *r && rng.rng.random::<f64>() >= eta {
                *r = false;
                rec.lost_any = true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::Spectrum;
    use crate::stats::{mean_std, std_of_std_rel, Accumulator};

    fn gaussian_model(variant: StateVariant) -> StateModel {
        StateModel::new(variant, Spectrum::gaussian(100.0, 1.0).unwrap()).unwrap()
    }

    fn sampler(variant: StateVariant) -> Sampler {
        Sampler::new(&gaussian_model(variant), &SamplerConfig::default()).unwrap()
    }

    #[test]
    fn same_seed_reproduces_records() {
        let s = sampler(StateVariant::EntangledSingles { detectors: 3 });
        let a = s.sample_campaign(0.8, 50, 42);
        let b = s.sample_campaign(0.8, 50, 42);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.lost_any, y.lost_any);
            for (dx, dy) in x.per_detector.iter().zip(&y.per_detector) {
                assert_eq!(dx.times, dy.times);
                assert_eq!(dx.retained, dy.retained);
            }
        }
    }

    #[test]
    fn neighboring_seeds_differ() {
        let s = sampler(StateVariant::UnentangledSingles { detectors: 2 });
        let a = s.sample_campaign(1.0, 20, 7);
        let b = s.sample_campaign(1.0, 20, 8);
        let differs = a
            .iter()
            .zip(&b)
            .any(|(x, y)| x.per_detector[0].times != y.per_detector[0].times);
        assert!(differs);
    }

    #[test]
    fn sum_correlated_one_is_a_plain_draw() {
        // K = 1 collapses to a single draw from |g|^2: the one time equals
        // the drawn average with no offset noise.
        let s = sampler(StateVariant::EntangledSingles { detectors: 1 });
        let mut rng = RngStream::new(1, 0);
        let rec = s.sample_trial(&mut rng);
        assert_eq!(rec.per_detector.len(), 1);
        assert_eq!(rec.per_detector[0].times.len(), 1);

        // Same draw from the bare table under an identical stream.
        let mut rng2 = RngStream::new(1, 0);
        let direct = s.table.sample(rng2.rng.random::<f64>());
        assert_eq!(rec.per_detector[0].times[0], direct);
    }

    #[test]
    fn bunched_times_average_to_the_drawn_mean() {
        let s = sampler(StateVariant::EntangledFock {
            detectors: 2,
            photons: 3,
        });
        let mut rng = RngStream::new(3, 5);
        let rec = s.sample_trial(&mut rng);
        let times: Vec<f64> = rec
            .per_detector
            .iter()
            .flat_map(|d| d.times.iter().copied())
            .collect();
        assert_eq!(times.len(), 6);
        let mean = times.iter().sum::<f64>() / 6.0;
        // The mean must match the rescaled table draw bit-for-bit up to
        // the recentering roundoff.
        let mut rng2 = RngStream::new(3, 5);
        let t_bar = s.table.sample(rng2.rng.random::<f64>()) / 6.0;
        assert!((mean - t_bar).abs() < 1e-12, "{mean} vs {t_bar}");
    }

    #[test]
    fn entangled_average_spread_is_delta_tau_over_m() {
        let m = 4;
        let s = sampler(StateVariant::EntangledSingles { detectors: m });
        let trials = 100_000u64;
        let mut acc = Accumulator::default();
        for rec in s.sample_campaign(1.0, trials, 11) {
            let times: Vec<f64> = rec
                .per_detector
                .iter()
                .flat_map(|d| d.times.iter().copied())
                .collect();
            acc.push(times.iter().sum::<f64>() / times.len() as f64);
        }
        let expect = 0.5 / m as f64;
        let tol = 3.0 * std_of_std_rel(trials) * expect;
        assert!(
            (acc.std_dev() - expect).abs() < tol,
            "std {} vs {expect}",
            acc.std_dev()
        );
    }

    #[test]
    fn poisson_counts_have_the_right_mean() {
        let s = sampler(StateVariant::ClassicalCoherent {
            detectors: 1,
            mean_photons: 4,
        });
        let trials = 100_000u64;
        let counts: Vec<f64> = s
            .sample_campaign(1.0, trials, 21)
            .iter()
            .map(|r| r.per_detector[0].times.len() as f64)
            .collect();
        let (mean, _) = mean_std(&counts);
        assert!((mean - 4.0).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn twin_beam_difference_spread_is_delta_tau() {
        let s = sampler(StateVariant::TwinBeam);
        let trials = 100_000u64;
        let diffs: Vec<f64> = s
            .sample_campaign(1.0, trials, 31)
            .iter()
            .map(|r| r.per_detector[0].times[0] - r.per_detector[1].times[0])
            .collect();
        let (_, std) = mean_std(&diffs);
        let tol = 3.0 * std_of_std_rel(trials) * 0.5;
        assert!((std - 0.5).abs() < tol, "std {std}");
    }

    #[test]
    fn lossless_channel_is_identity() {
        let s = sampler(StateVariant::EntangledSingles { detectors: 2 });
        let mut rng = RngStream::new(5, 0);
        let mut rec = s.sample_trial(&mut rng);
        let before = rec.per_detector[0].times.clone();
        apply_loss(&mut rec, 1.0, &mut rng);
        assert!(!rec.lost_any);
        assert_eq!(rec.per_detector[0].times, before);
        assert!(rec.per_detector.iter().all(|d| d.retained.iter().all(|&r| r)));
    }

    #[test]
    fn opaque_channel_drops_everything() {
        let s = sampler(StateVariant::UnentangledSingles { detectors: 3 });
        let mut rng = RngStream::new(5, 1);
        let mut rec = s.sample_trial(&mut rng);
        apply_loss(&mut rec, 0.0, &mut rng);
        assert!(rec.lost_any);
        assert_eq!(
            rec.per_detector.iter().map(|d| d.detected_count()).sum::<usize>(),
            0
        );
        // Times stay in place even when flagged lost.
        assert_eq!(rec.per_detector[0].times.len(), 1);
    }

    #[test]
    fn survival_fraction_matches_eta_to_the_m() {
        let s = sampler(StateVariant::EntangledSingles { detectors: 3 });
        let trials = 100_000u64;
        let kept = s
            .sample_campaign(0.9, trials, 77)
            .iter()
            .filter(|r| !r.lost_any)
            .count();
        let frac = kept as f64 / trials as f64;
        assert!((frac - 0.729).abs() < 0.005, "fraction {frac}");
    }

    #[test]
    fn fold_campaign_matches_materialized_campaign() {
        let s = sampler(StateVariant::EntangledSingles { detectors: 2 });
        let trials = 20_000u64;
        let fold = |rec: &TrialRecord, a: &mut Accumulator| {
            if !rec.lost_any {
                let sum: f64 = rec
                    .per_detector
                    .iter()
                    .flat_map(|d| d.times.iter().copied())
                    .sum();
                a.push(sum / 2.0);
            }
        };
        let mut acc = Accumulator::default();
        for rec in s.sample_campaign(0.7, trials, 9) {
            fold(&rec, &mut acc);
        }
        let folded = s.fold_campaign(0.7, trials, 9, fold, |a, b| a.merge(&b));
        // Chunked merging reorders float additions, so sums agree to
        // rounding; counts and repeat runs are exact.
        assert_eq!(folded.count, acc.count);
        assert!((folded.sum - acc.sum).abs() <= 1e-9 * acc.sum.abs().max(1.0));
        assert!((folded.sum_sq - acc.sum_sq).abs() <= 1e-9 * acc.sum_sq.max(1.0));
        let again = s.fold_campaign(0.7, trials, 9, fold, |a, b| a.merge(&b));
        assert_eq!(folded.sum.to_bits(), again.sum.to_bits());
        assert_eq!(folded.sum_sq.to_bits(), again.sum_sq.to_bits());
    }

    #[test]
    fn campaign_speed_budget() {
        // 1e5 trials at 8 detectors in well under 10 s on one core.
        let s = sampler(StateVariant::EntangledSingles { detectors: 8 });
        let start = std::time::Instant::now();
        let n = s.fold_campaign(
            1.0,
            100_000,
            13,
            |_, a: &mut u64| *a += 1,
            |a, b| *a += b,
        );
        assert_eq!(n, 100_000);
        assert!(start.elapsed().as_secs_f64() < 10.0);
    }
}
