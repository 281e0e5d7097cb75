//! Independent checks of the closed-form results.
//!
//! The Monte-Carlo routines sample electrons one at a time with a PCG64
//! generator (`Lcg128Xsl64`, seeded through `seed_from_u64`), so the
//! statistics can be compared against the analytic partition-noise formulas
//! without touching the scattering-matrix code paths. The brute scan is a
//! plain tabulation; runs of equal samples are merged and features counted
//! by strict neighbour comparisons, with no refinement.

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sweep::KappaRange;

/// `N` electrons, each transmitted independently with probability `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionTrial {
    transmission_probability: f64,
    electron_count: u64,
    seed: u64,
}

impl PartitionTrial {
    pub fn new(transmission_probability: f64, electron_count: u64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmission_probability) {
            return Err(Error::InvalidTrial(format!(
                "transmission probability {transmission_probability} outside [0, 1]"
            )));
        }
        if electron_count == 0 {
            return Err(Error::InvalidTrial("electron count must be positive".into()));
        }
        Ok(PartitionTrial {
            transmission_probability,
            electron_count,
            seed,
        })
    }

    pub fn transmission_probability(&self) -> f64 {
        self.transmission_probability
    }

    pub fn electron_count(&self) -> u64 {
        self.electron_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub standard_error: f64,
}

impl Estimate {
    /// Distance from `expected` in standard errors; zero spread only matches exactly.
    pub fn sigmas_from(&self, expected: f64) -> f64 {
        let diff = (self.value - expected).abs();
        if diff == 0.0 {
            0.0
        } else if self.standard_error == 0.0 {
            f64::INFINITY
        } else {
            diff / self.standard_error
        }
    }
}

/// Sample variance of the per-electron transmission indicator.
///
/// The standard error uses the exact finite-sample variance of the unbiased
/// sample variance, `mu4/N - sigma^4 (N-3)/(N(N-1))`, with the Bernoulli moments
/// evaluated at the observed transmitted fraction. The leading term vanishes at
/// `T = 1/2`, where the error falls off as `1/N` instead of `1/sqrt(N)`.
pub fn mc_partition_noise(trial: &PartitionTrial) -> Estimate {
    let n = trial.electron_count;
    let mut rng = Pcg64::seed_from_u64(trial.seed);
    let coin = Bernoulli::new(trial.transmission_probability).expect("probability in [0, 1]");
    let transmitted = (0..n).filter(|_| coin.sample(&mut rng)).count() as f64;
    let n = n as f64;
    if n < 2.0 {
        return Estimate {
            value: 0.0,
            standard_error: 0.0,
        };
    }
    let p = transmitted / n;
    let q = 1.0 - p;
    let variance = transmitted * (n - transmitted) / (n * (n - 1.0));
    let sigma2 = p * q;
    let mu4 = p * q * (1.0 - 3.0 * p * q);
    let var_of_var = (mu4 / n - sigma2 * sigma2 * (n - 3.0) / (n * (n - 1.0))).max(0.0);
    Estimate {
        value: variance,
        standard_error: var_of_var.sqrt(),
    }
}

/// SplitMix64 finalizer applied to `base ^ index`, used to give each trial in a
/// batch its own stream.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs one partition trial per probability, in parallel, with seeds derived
/// from `base_seed` and the trial index.
pub fn mc_partition_batch(
    probabilities: &[f64],
    electron_count: u64,
    base_seed: u64,
) -> Result<Vec<Estimate>> {
    let trials = probabilities
        .iter()
        .enumerate()
        .map(|(i, &t)| PartitionTrial::new(t, electron_count, derive_seed(base_seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(trials.par_iter().map(mc_partition_noise).collect())
}

/// Sample covariance of the exit indicators of two leads when every electron
/// leaves through exactly one of four leads with the given probabilities.
///
/// The indicators are mutually exclusive, so the expectation is `-P_i P_j`.
pub fn mc_exit_covariance(
    probabilities: [f64; 4],
    first: usize,
    second: usize,
    electron_count: u64,
    seed: u64,
) -> Result<Estimate> {
    if first == second || first > 3 || second > 3 {
        return Err(Error::InvalidTrial(format!(
            "covariance needs two distinct lead indices, got {first} and {second}"
        )));
    }
    if electron_count < 2 {
        return Err(Error::InvalidTrial("need at least two electrons".into()));
    }
    if probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidTrial("probabilities must be non-negative".into()));
    }
    let total: f64 = probabilities.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidTrial("probabilities sum to zero".into()));
    }
    let mut cumulative = [0.0; 4];
    let mut acc = 0.0;
    for (c, p) in cumulative.iter_mut().zip(probabilities) {
        acc += p / total;
        *c = acc;
    }
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut counts = [0u64; 4];
    for _ in 0..electron_count {
        let u: f64 = rng.random();
        let lead = cumulative.iter().position(|&c| u < c).unwrap_or(3);
        counts[lead] += 1;
    }
    let n = electron_count as f64;
    let (ni, nj) = (counts[first] as f64, counts[second] as f64);
    let (pi, pj) = (ni / n, nj / n);
    let covariance = -n * pi * pj / (n - 1.0);

    // Exact finite-sample variance of the sample covariance with plug-in moments:
    // (mu22 - (n-2)/(n-1) cov^2) / n + var_i var_j / (n (n-1)).
    let mu22 = pi * (1.0 - pi).powi(2) * pj * pj
        + pj * pi * pi * (1.0 - pj).powi(2)
        + (1.0 - pi - pj).max(0.0) * pi * pi * pj * pj;
    let cov = pi * pj;
    let var_i = pi * (1.0 - pi);
    let var_j = pj * (1.0 - pj);
    let var_of_cov =
        ((mu22 - (n - 2.0) / (n - 1.0) * cov * cov) / n + var_i * var_j / (n * (n - 1.0))).max(0.0);
    Ok(Estimate {
        value: covariance,
        standard_error: var_of_cov.sqrt(),
    })
}

/// A dense tabulation of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub kappas: Vec<f64>,
    pub values: Vec<f64>,
}

pub const MIN_BRUTE_POINTS: usize = 100_000;

pub fn brute_scan<F>(curve: F, range: KappaRange, points: usize) -> Result<ScanTable>
where
    F: Fn(f64) -> f64 + Sync,
{
    if points < MIN_BRUTE_POINTS {
        return Err(Error::InvalidRange {
            min: range.min,
            max: range.max,
            points,
        });
    }
    let step = (range.max - range.min) / (points - 1) as f64;
    let kappas: Vec<f64> = (0..points).map(|i| range.min + step * i as f64).collect();
    let values = kappas.par_iter().map(|&k| curve(k)).collect();
    Ok(ScanTable { kappas, values })
}

impl ScanTable {
    /// Strict sign changes of `value - target` between neighbouring samples,
    /// plus samples landing exactly on the target.
    pub fn count_sign_changes(&self, target: f64) -> usize {
        let g: Vec<f64> = self.values.iter().map(|v| v - target).collect();
        let exact = g.iter().filter(|&&x| x == 0.0).count();
        let changes = g
            .windows(2)
            .filter(|w| (w[0] < 0.0 && w[1] > 0.0) || (w[0] > 0.0 && w[1] < 0.0))
            .count();
        exact + changes
    }

    /// Strict local maxima after merging runs of equal samples.
    pub fn count_local_maxima(&self) -> usize {
        let mut v = self.values.clone();
        v.dedup();
        v.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2]).count()
    }

    pub fn count_local_minima(&self) -> usize {
        let mut v = self.values.clone();
        v.dedup();
        v.windows(3).filter(|w| w[1] < w[0] && w[1] < w[2]).count()
    }

    /// Sample with the largest value.
    pub fn argmax(&self) -> (f64, f64) {
        let (i, v) = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty scan");
        (self.kappas[i], *v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trial_validation() {
        assert!(PartitionTrial::new(-0.1, 10, 0).is_err());
        assert!(PartitionTrial::new(1.1, 10, 0).is_err());
        assert!(PartitionTrial::new(0.5, 0, 0).is_err());
        assert!(PartitionTrial::new(1.0, 1, 0).is_ok());
    }

    #[test]
    fn certain_outcomes_have_no_spread() {
        for t in [0.0, 1.0] {
            let e = mc_partition_noise(&PartitionTrial::new(t, 10_000, 9).unwrap());
            assert_eq!(e.value, 0.0);
            assert_eq!(e.standard_error, 0.0);
        }
    }

    #[test]
    fn half_transmission_matches_quarter() {
        let e = mc_partition_noise(&PartitionTrial::new(0.5, 1_000_000, 42).unwrap());
        assert!(e.sigmas_from(0.25) <= 3.0, "{e:?}");
    }

    #[test]
    fn same_seed_same_result() {
        let trial = PartitionTrial::new(0.3, 50_000, 7).unwrap();
        assert_eq!(mc_partition_noise(&trial), mc_partition_noise(&trial));
        let other = PartitionTrial::new(0.3, 50_000, 8).unwrap();
        assert_ne!(mc_partition_noise(&trial), mc_partition_noise(&other));
    }

    #[test]
    fn standard_error_scales_as_inverse_root_n() {
        let t = 0.3;
        let se: Vec<f64> = [10_000u64, 100_000, 1_000_000]
            .iter()
            .map(|&n| mc_partition_noise(&PartitionTrial::new(t, n, 11).unwrap()).standard_error)
            .collect();
        for w in se.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio / 10f64.sqrt() - 1.0).abs() < 0.1, "ratio {ratio}");
        }
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: Vec<u64> = (0..100).map(|i| derive_seed(42, i)).collect();
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), seeds.len());
    }

    #[test]
    fn exit_covariance_is_negative_product() {
        let p = [0.1, 0.2, 0.3, 0.4];
        let e = mc_exit_covariance(p, 2, 3, 1_000_000, 5).unwrap();
        assert!(e.sigmas_from(-0.12) <= 3.0, "{e:?}");
        assert!(mc_exit_covariance(p, 2, 2, 10, 5).is_err());
        // Two equally likely exits: the leading error term vanishes but the spread does not.
        let e = mc_exit_covariance([0.0, 0.0, 0.5, 0.5], 2, 3, 1_000_000, 5).unwrap();
        assert!(e.standard_error > 0.0);
        assert!(e.sigmas_from(-0.25) <= 3.0, "{e:?}");
    }

    #[test]
    fn brute_scan_counts() {
        let range = KappaRange::new(-1.0, 1.0).unwrap();
        assert!(brute_scan(|x| x, range, 10).is_err());
        let c = brute_scan(|_| 0.3, range, MIN_BRUTE_POINTS).unwrap();
        assert_eq!(c.count_local_maxima() + c.count_local_minima(), 0);
        assert_eq!(c.count_sign_changes(0.5), 0);
        let wave = brute_scan(|x| (10.0 * x).sin(), range, MIN_BRUTE_POINTS).unwrap();
        // sin(10x) on [-1, 1]: zeros at k*pi/10 for |k| <= 3
        assert_eq!(wave.count_sign_changes(0.0), 7);
        assert_eq!(wave.count_local_maxima(), 3);
        let peak = brute_scan(|x: f64| -x * x, range, MIN_BRUTE_POINTS).unwrap();
        assert_eq!(peak.count_local_maxima(), 1, "even peak straddling two samples");
    }
}
