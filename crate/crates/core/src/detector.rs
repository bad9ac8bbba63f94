//! Pseudo-photon-number-resolving detection: each path terminates in a bank
//! of `k` on/off detectors, so an n-photon bunch is only resolved when all n
//! photons land on distinct detectors. Includes the Monte Carlo sampler and
//! the multiplicative correction that undoes the resulting bias.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Distribution, FockState};

/// Detector bank parameters. `k` is the number of on/off detectors per path,
/// `eta` the per-photon survival probability, `seed` the sampler seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PnrConfig {
    pub k: u32,
    pub eta: f64,
    pub seed: u64,
}

impl Default for PnrConfig {
    fn default() -> Self {
        PnrConfig { k: 8, eta: 0.886, seed: 0 }
    }
}

impl PnrConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("detector count k must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidParameter(format!("eta {} outside [0, 1]", self.eta)));
        }
        Ok(())
    }
}

/// Probability that `n` photons entering a bank of `k` on/off detectors all
/// hit distinct detectors: k! / ((k-n)! k^n), zero when n > k.
pub fn p_resolve(n: u32, k: u32) -> f64 {
    if n > k {
        return 0.0;
    }
    (0..n).map(|j| (k - j) as f64 / k as f64).product()
}

/// Product of per-path resolution probabilities for one detection pattern.
pub fn ppnr_factor(pattern: &FockState, k: u32) -> f64 {
    pattern.counts().iter().map(|&n| p_resolve(n as u32, k)).product()
}

/// Raw tally of observed (post-loss, post-splitting) detection patterns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRecord {
    pub raw: BTreeMap<FockState, u64>,
    pub shots: u64,
    /// Shots whose observed photon total matched the expected total.
    pub post_selected: u64,
}

/// Shots per random stream. Streams advance with the shot counter, so the
/// record is a pure function of (distribution, config, shots) regardless of
/// thread scheduling, and a longer run extends a shorter one.
const STREAM_BLOCK: u64 = 1024;

/// Simulates `shots` runs: draw a true pattern from `ideal`, lose each photon
/// with probability 1 - eta, scatter survivors uniformly over each path's
/// `k` detectors, and count distinct detectors that fired. A shot is kept
/// only when the observed total equals the (uniform) photon total of `ideal`.
pub fn sample(ideal: &Distribution, cfg: &PnrConfig, shots: u64) -> Result<CountRecord> {
    cfg.validate()?;
    if ideal.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let expected_total = uniform_total(ideal)?;
    let mass: f64 = ideal.values().sum();
    if mass <= 0.0 {
        return Err(Error::EmptyDistribution);
    }
    let width = ideal.keys().next().map(FockState::len).unwrap_or(0);
    let patterns: Vec<(&FockState, f64)> = {
        let mut acc = 0.0;
        ideal
            .iter()
            .map(|(key, p)| {
                acc += p / mass;
                (key, acc)
            })
            .collect()
    };
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let blocks = shots.div_ceil(STREAM_BLOCK);
    let (raw, post_selected) = (0..blocks)
        .into_par_iter()
        .fold(
            || (BTreeMap::<FockState, u64>::new(), 0u64),
            |(mut counts, mut kept), block| {
                let mut rng = base.clone();
                rng.set_stream(block);
                let mut observed = vec![0u8; width];
                let first = block * STREAM_BLOCK;
                let last = (first + STREAM_BLOCK).min(shots);
                for _ in first..last {
                    let pick: f64 = rng.random();
                    let truth = patterns
                        .iter()
                        .find(|(_, cum)| pick < *cum)
                        .map(|(key, _)| *key)
                        .unwrap_or(patterns[patterns.len() - 1].0);
                    observe_into(truth, cfg, &mut rng, &mut observed);
                    let total: u32 = observed.iter().map(|&c| u32::from(c)).sum();
                    if total == expected_total {
                        if let Some(n) = counts.get_mut(observed.as_slice()) {
                            *n += 1;
                        } else {
                            counts.insert(FockState::from_slice(&observed), 1);
                        }
                        kept += 1;
                    }
                }
                (counts, kept)
            },
        )
        .reduce(
            || (BTreeMap::new(), 0u64),
            |(mut a, ka), (b, kb)| {
                for (key, n) in b {
                    *a.entry(key).or_insert(0) += n;
                }
                (a, ka + kb)
            },
        );
    Ok(CountRecord { raw, shots, post_selected })
}

fn observe_into(truth: &FockState, cfg: &PnrConfig, rng: &mut ChaCha8Rng, out: &mut [u8]) {
    let wide = cfg.k > 128;
    // Fallback for banks too wide for the bitmask; never allocates otherwise.
    let mut hits: Vec<u32> = Vec::new();
    for (slot, &n) in out.iter_mut().zip(truth.counts()) {
        let mut fired = 0u128;
        hits.clear();
        let mut distinct = 0u8;
        for _ in 0..n {
            let alive: f64 = rng.random();
            if alive < cfg.eta {
                let detector = rng.random_range(0..cfg.k);
                if wide {
                    if !hits.contains(&detector) {
                        hits.push(detector);
                        distinct += 1;
                    }
                } else {
                    let bit = 1u128 << detector;
                    if fired & bit == 0 {
                        fired |= bit;
                        distinct += 1;
                    }
                }
            }
        }
        *slot = distinct;
    }
}

fn uniform_total(dist: &Distribution) -> Result<u32> {
    let mut totals = dist.keys().map(|k| k.total());
    let first = totals.next().ok_or(Error::EmptyDistribution)?;
    for t in totals {
        if t != first {
            return Err(Error::MixedTotals(first, t));
        }
    }
    Ok(first)
}

/// Reweights raw counts by 1 / ppnr_factor and renormalizes, undoing the
/// bunching bias of the detector banks. Errors when a counted pattern has
/// zero resolution probability or the record is empty.
pub fn correct_counts(record: &CountRecord, k: u32) -> Result<Distribution> {
    if record.raw.is_empty() || record.post_selected == 0 {
        return Err(Error::EmptyDistribution);
    }
    let mut weights = Vec::with_capacity(record.raw.len());
    let mut total = 0.0;
    for (pattern, &count) in &record.raw {
        if count == 0 {
            continue;
        }
        let factor = ppnr_factor(pattern, k);
        if factor <= 0.0 {
            return Err(Error::UncorrectablePattern(pattern.to_string()));
        }
        let w = count as f64 / factor;
        weights.push((pattern.clone(), w));
        total += w;
    }
    Ok(weights.into_iter().map(|(pattern, w)| (pattern, w / total)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point_mass(pattern: &[u8]) -> Distribution {
        let mut d = Distribution::new();
        d.insert(FockState::from_slice(pattern), 1.0);
        d
    }

    #[test]
    fn resolve_probability_known_values() {
        assert_eq!(p_resolve(0, 8), 1.0);
        assert_eq!(p_resolve(1, 8), 1.0);
        assert_eq!(p_resolve(2, 8), 0.875);
        assert_eq!(p_resolve(4, 8), 1680.0 / 4096.0);
        assert_eq!(p_resolve(9, 8), 0.0);
    }

    #[test]
    fn resolve_probability_increases_with_bank_size() {
        let mut last = 0.0;
        for k in [4u32, 8, 16, 64, 1024] {
            let p = p_resolve(3, k);
            assert!(p > last);
            last = p;
        }
        assert!((p_resolve(3, 1_000_000_000) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn pattern_factor_multiplies_per_path() {
        assert_eq!(ppnr_factor(&FockState::from_slice(&[1, 1, 1, 1]), 8), 1.0);
        assert_eq!(ppnr_factor(&FockState::from_slice(&[2, 2, 0, 0]), 8), 0.875 * 0.875);
        assert_eq!(ppnr_factor(&FockState::from_slice(&[9, 0]), 8), 0.0);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let mut dist = Distribution::new();
        dist.insert(FockState::from_slice(&[1, 1]), 0.5);
        dist.insert(FockState::from_slice(&[2, 0]), 0.5);
        let cfg = PnrConfig { k: 8, eta: 0.9, seed: 11 };
        let a = sample(&dist, &cfg, 20_000).unwrap();
        let b = sample(&dist, &cfg, 20_000).unwrap();
        assert_eq!(a, b);
        let c = sample(&dist, &PnrConfig { seed: 12, ..cfg }, 20_000).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_efficiency_keeps_nothing() {
        let cfg = PnrConfig { k: 8, eta: 0.0, seed: 3 };
        let rec = sample(&point_mass(&[1, 1]), &cfg, 5_000).unwrap();
        assert_eq!(rec.post_selected, 0);
        assert!(rec.raw.is_empty());
        assert!(correct_counts(&rec, 8).is_err());
    }

    #[test]
    fn sampler_rejects_bad_inputs() {
        let cfg = PnrConfig::default();
        assert!(matches!(sample(&Distribution::new(), &cfg, 10), Err(Error::EmptyDistribution)));
        let mut mixed = Distribution::new();
        mixed.insert(FockState::from_slice(&[1, 0]), 0.5);
        mixed.insert(FockState::from_slice(&[1, 1]), 0.5);
        assert!(matches!(sample(&mixed, &cfg, 10), Err(Error::MixedTotals(1, 2))));
        assert!(sample(&point_mass(&[1]), &PnrConfig { k: 0, ..cfg }, 10).is_err());
        assert!(sample(&point_mass(&[1]), &PnrConfig { eta: 1.2, ..cfg }, 10).is_err());
    }

    #[test]
    fn correction_recovers_known_weights_exactly() {
        let mut raw = BTreeMap::new();
        raw.insert(FockState::from_slice(&[2, 0, 0, 0]), 875u64);
        raw.insert(FockState::from_slice(&[1, 1, 0, 0]), 1000u64);
        let rec = CountRecord { raw, shots: 2000, post_selected: 1875 };
        let corrected = correct_counts(&rec, 8).unwrap();
        assert!((corrected[&FockState::from_slice(&[2, 0, 0, 0])] - 0.5).abs() < 1e-12);
        assert!((corrected[&FockState::from_slice(&[1, 1, 0, 0])] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_pattern_record_corrects_to_certainty() {
        let mut raw = BTreeMap::new();
        raw.insert(FockState::from_slice(&[2, 2, 0, 0]), 123u64);
        let rec = CountRecord { raw, shots: 400, post_selected: 123 };
        let corrected = correct_counts(&rec, 8).unwrap();
        assert_eq!(corrected.len(), 1);
        assert_eq!(corrected[&FockState::from_slice(&[2, 2, 0, 0])], 1.0);
    }

    #[test]
    fn unresolvable_pattern_cannot_be_corrected() {
        let mut raw = BTreeMap::new();
        raw.insert(FockState::from_slice(&[3, 0]), 5u64);
        let rec = CountRecord { raw, shots: 5, post_selected: 5 };
        assert!(matches!(correct_counts(&rec, 2), Err(Error::UncorrectablePattern(_))));
    }

    #[test]
    fn all_singles_pattern_needs_no_correction() {
        let cfg = PnrConfig { k: 8, eta: 1.0, seed: 5 };
        let rec = sample(&point_mass(&[1, 1, 1, 1]), &cfg, 10_000).unwrap();
        assert_eq!(rec.post_selected, 10_000);
        let corrected = correct_counts(&rec, cfg.k).unwrap();
        assert_eq!(corrected[&FockState::from_slice(&[1, 1, 1, 1])], 1.0);
    }

    #[test]
    fn acceptance_fraction_tracks_resolve_probability() {
        // Four photons on one path, ideal efficiency: the kept fraction is a
        // binomial draw with success probability p_resolve(4, 8).
        let cfg = PnrConfig { k: 8, eta: 1.0, seed: 7 };
        let shots = 200_000u64;
        let rec = sample(&point_mass(&[4, 0, 0, 0, 0, 0]), &cfg, shots).unwrap();
        let p = 1680.0 / 4096.0;
        let se = (p * (1.0 - p) / shots as f64).sqrt();
        let got = rec.post_selected as f64 / shots as f64;
        assert!((got - p).abs() < 4.0 * se, "got {got}, want {p} +- {se}");
    }
}
