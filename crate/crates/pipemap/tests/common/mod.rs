//! Shared helpers for the integration suites: deterministic random
//! instances whose numbers are exactly representable (integer weights and
//! volumes, power-of-two speeds and bandwidths, failure probabilities with
//! a 2^7 denominator), so mathematically equal objective values compare
//! bit-for-bit.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pipemap::model::{Interval, LinkEnd, Mapping, PipelineSpec, PlatformSpec, Processor};

/// The odd primes below 128; `prime / 128` failure probabilities are exact
/// dyadics and products of distinct subsets are pairwise distinct, so
/// reliability optima are unique.
pub const ODD_PRIMES: [u32; 30] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127,
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn power_of_two(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> f64 {
    2f64.powi(rng.random_range(lo..=hi))
}

pub fn small_int(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> f64 {
    rng.random_range(lo..=hi) as f64
}

pub fn random_pipeline(rng: &mut ChaCha8Rng, n: usize) -> PipelineSpec {
    let w = (0..n).map(|_| small_int(rng, 1, 8)).collect();
    let delta = (0..=n).map(|_| small_int(rng, 0, 8)).collect();
    PipelineSpec::new(w, delta).unwrap()
}

pub fn distinct_prime_failures(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    assert!(m <= ODD_PRIMES.len());
    let mut primes = ODD_PRIMES;
    let (chosen, _) = primes.partial_shuffle(rng, m);
    chosen.iter().map(|&p| p as f64 / 128.0).collect()
}

fn named(prefix: &str, speeds: &[f64], failures: &[f64]) -> Vec<Processor> {
    speeds
        .iter()
        .zip(failures)
        .enumerate()
        .map(|(i, (&speed, &failure_prob))| Processor {
            id: format!("{prefix}{i}"),
            speed,
            failure_prob,
        })
        .collect()
}

/// Uniform links and speeds; failure probabilities pairwise distinct.
pub fn fully_hom_platform(rng: &mut ChaCha8Rng, m: usize) -> PlatformSpec {
    let speed = power_of_two(rng, -1, 3);
    let speeds = vec![speed; m];
    let failures = distinct_prime_failures(rng, m);
    let bandwidth = power_of_two(rng, -1, 3);
    PlatformSpec::with_uniform_bandwidth(named("p", &speeds, &failures), bandwidth).unwrap()
}

/// Uniform links, per-processor speeds, one shared failure probability.
pub fn comm_hom_failure_hom_platform(rng: &mut ChaCha8Rng, m: usize) -> PlatformSpec {
    let speeds: Vec<f64> = (0..m).map(|_| power_of_two(rng, -1, 3)).collect();
    let f = distinct_prime_failures(rng, 1)[0];
    let failures = vec![f; m];
    let bandwidth = power_of_two(rng, -1, 3);
    PlatformSpec::with_uniform_bandwidth(named("p", &speeds, &failures), bandwidth).unwrap()
}

/// Complete link graph with per-link bandwidths; everything heterogeneous.
pub fn fully_het_platform(rng: &mut ChaCha8Rng, m: usize) -> PlatformSpec {
    let speeds: Vec<f64> = (0..m).map(|_| power_of_two(rng, -1, 3)).collect();
    let failures = distinct_prime_failures(rng, m);
    let mut links = Vec::new();
    for u in 0..m {
        links.push((LinkEnd::In, LinkEnd::Proc(u), power_of_two(rng, -3, 3)));
        links.push((LinkEnd::Proc(u), LinkEnd::Out, power_of_two(rng, -3, 3)));
        for v in 0..m {
            if u != v {
                links.push((LinkEnd::Proc(u), LinkEnd::Proc(v), power_of_two(rng, -3, 3)));
            }
        }
    }
    PlatformSpec::new(named("p", &speeds, &failures), links).unwrap()
}

/// A uniformly sampled valid interval mapping: random interval count,
/// random boundaries, disjoint non-empty replication sets.
pub fn random_mapping(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Mapping {
    let p = rng.random_range(1..=n.min(m));
    // p - 1 distinct inner boundaries out of 1..n.
    let mut cuts: Vec<usize> = (1..n).collect();
    let (chosen, _) = cuts.partial_shuffle(rng, p - 1);
    let mut bounds = chosen.to_vec();
    bounds.sort_unstable();
    bounds.insert(0, 0);
    bounds.push(n);

    let mut procs: Vec<usize> = (0..m).collect();
    procs.shuffle(rng);
    let mut spare = m - p; // every interval gets one processor first
    let mut next = 0;
    let mut intervals = Vec::with_capacity(p);
    for j in 0..p {
        let extra = if spare > 0 { rng.random_range(0..=spare) } else { 0 };
        spare -= extra;
        let take = 1 + extra;
        let mut set: Vec<usize> = procs[next..next + take].to_vec();
        next += take;
        set.sort_unstable();
        intervals.push(Interval {
            first: bounds[j] + 1,
            last: bounds[j + 1],
            procs: set,
        });
    }
    Mapping { intervals }
}

pub fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}
