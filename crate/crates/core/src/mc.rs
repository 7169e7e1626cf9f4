//! Monte Carlo estimate of the joint sub-region outage.
//!
//! Each trial draws fresh shadowing for every node and runs the full SIC
//! chain; nothing is approximated. Trial `t` of a sub-region always uses
//! ChaCha stream `t` of that sub-region's key, and slot `j` always consumes
//! the `j`-th normal of the stream, so runs are reproducible, independent of
//! thread scheduling, and share random numbers across thresholds, ζ schemes
//! and altitudes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::link::{sic_succeeds, SubregionLinks};
use crate::network::Deployment;
use crate::outage::DB_TO_LN;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.576;

const BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub outage_hat: f64,
    pub trials: u64,
    pub stderr: f64,
    pub ci99: f64,
}

impl McEstimate {
    pub fn from_counts(failures: u64, trials: u64) -> Self {
        let p = failures as f64 / trials as f64;
        let stderr = (p * (1.0 - p) / trials as f64).sqrt();
        McEstimate {
            outage_hat: p,
            trials,
            stderr,
            ci99: Z99 * stderr,
        }
    }
}

/// SplitMix64 finalizer over `(seed, key)`.
pub fn stream_seed(seed: u64, key: u64) -> u64 {
    let mut z = seed ^ key.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Failure counts for several thresholds on the same draws.
fn count_failures(links: &SubregionLinks, gammas: &[f64], trials: u64, seed: u64) -> Vec<u64> {
    if links.is_empty() {
        return vec![0; gammas.len()];
    }
    let base = links.mean_free_powers();
    let noise = links.channel.noise;
    // h² = 10^(2g/10) = exp(2 a σ z)
    let scale = 2.0 * DB_TO_LN * links.channel.sigma_db;
    let root = ChaCha8Rng::seed_from_u64(seed);
    let blocks = trials.div_ceil(BLOCK);

    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = root.clone();
            let mut powers = vec![0.0; base.len()];
            let mut fails = vec![0u64; gammas.len()];
            for t in b * BLOCK..((b + 1) * BLOCK).min(trials) {
                rng.set_stream(t);
                rng.set_word_pos(0);
                for (p, b0) in powers.iter_mut().zip(&base) {
                    let z: f64 = rng.sample(StandardNormal);
                    *p = b0 * (scale * z).exp();
                }
                for (f, &g) in fails.iter_mut().zip(gammas) {
                    if !sic_succeeds(&powers, noise, g) {
                        *f += 1;
                    }
                }
            }
            fails
        })
        .reduce(
            || vec![0; gammas.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Monte Carlo outage of one sub-region; `seed` keys the random streams.
pub fn mc_subregion_outage(links: &SubregionLinks, gamma: f64, trials: u64, seed: u64) -> McEstimate {
    mc_subregion_outage_many(links, &[gamma], trials, seed)[0]
}

/// One estimate per threshold, all on common random numbers.
pub fn mc_subregion_outage_many(
    links: &SubregionLinks,
    gammas: &[f64],
    trials: u64,
    seed: u64,
) -> Vec<McEstimate> {
    assert!(trials >= 1, "at least one trial");
    count_failures(links, gammas, trials, seed)
        .into_iter()
        .map(|f| McEstimate::from_counts(f, trials))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputEstimate {
    /// Bits per second.
    pub throughput: f64,
    pub stderr: f64,
    pub outages: Vec<McEstimate>,
}

/// `Σ_l N_l R (1 - p̂_l) / W` with the standard error of the independent
/// per-sub-region estimates. Sub-region `l` uses stream key `l`.
pub fn mc_throughput(
    dep: &Deployment,
    gamma: f64,
    rate_bps: f64,
    trials: u64,
    seed: u64,
) -> ThroughputEstimate {
    let w = dep.subregions() as f64;
    let outages: Vec<McEstimate> = dep
        .links
        .iter()
        .enumerate()
        .map(|(l, links)| mc_subregion_outage(links, gamma, trials, stream_seed(seed, l as u64)))
        .collect();
    let mut throughput = 0.0;
    let mut var = 0.0;
    for (links, est) in dep.links.iter().zip(&outages) {
        let k = links.len() as f64 * rate_bps / w;
        throughput += k * (1.0 - est.outage_hat);
        var += (k * est.stderr).powi(2);
    }
    ThroughputEstimate {
        throughput,
        stderr: var.sqrt(),
        outages,
    }
}
