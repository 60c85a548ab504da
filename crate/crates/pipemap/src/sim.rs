//! Monte Carlo cross-check of the analytic failure probability.
//!
//! Each trial draws one failure outcome per allocated processor and asks
//! whether some interval lost every replica. Trials use splittable
//! ChaCha8 streams — one stream per trial index off a single seed — so the
//! estimate is a pure function of `(mapping, platform, trials, seed)`,
//! independent of execution order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::model::{Mapping, PlatformSpec};

/// A Monte Carlo estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureEstimate {
    /// Fraction of trials in which the application failed.
    pub estimate: f64,
    /// `sqrt(p * (1 - p) / trials)` for the estimated `p`.
    pub std_error: f64,
    pub trials: u64,
}

fn trial_fails(mapping: &Mapping, platform: &PlatformSpec, base: &ChaCha8Rng, trial: u64) -> bool {
    let mut rng = base.clone();
    rng.set_stream(trial);
    // Every allocated processor is drawn at most once per trial (sets are
    // disjoint); a draw below the failure probability is a failure, which
    // handles probabilities 0 and 1 exactly since draws fall in [0, 1).
    mapping.intervals.iter().any(|iv| {
        iv.procs
            .iter()
            .all(|&u| rng.random::<f64>() < platform.processors()[u].failure_prob)
    })
}

fn finish(failures: u64, trials: u64) -> FailureEstimate {
    let estimate = failures as f64 / trials as f64;
    FailureEstimate {
        estimate,
        std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        trials,
    }
}

/// Estimates the mapping's failure probability over `trials` independent
/// trials (parallel when the `parallel` feature is on; same result either
/// way).
pub fn simulate_failure_probability(
    mapping: &Mapping,
    platform: &PlatformSpec,
    trials: u64,
    seed: u64,
) -> FailureEstimate {
    assert!(trials > 0, "at least one trial");
    let base = ChaCha8Rng::seed_from_u64(seed);

    #[cfg(feature = "parallel")]
    let failures: u64 = (0..trials)
        .into_par_iter()
        .map(|t| trial_fails(mapping, platform, &base, t) as u64)
        .sum();
    #[cfg(not(feature = "parallel"))]
    let failures: u64 = (0..trials)
        .map(|t| trial_fails(mapping, platform, &base, t) as u64)
        .sum();

    finish(failures, trials)
}

/// Sequential variant of [`simulate_failure_probability`]; always available
/// and bit-identical to the parallel one.
pub fn simulate_failure_probability_seq(
    mapping: &Mapping,
    platform: &PlatformSpec,
    trials: u64,
    seed: u64,
) -> FailureEstimate {
    assert!(trials > 0, "at least one trial");
    let base = ChaCha8Rng::seed_from_u64(seed);
    let failures: u64 = (0..trials)
        .map(|t| trial_fails(mapping, platform, &base, t) as u64)
        .sum();
    finish(failures, trials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::failure_probability;
    use crate::model::{Interval, Processor};

    fn platform(failures: &[f64]) -> PlatformSpec {
        let procs = failures
            .iter()
            .enumerate()
            .map(|(i, &f)| Processor {
                id: format!("p{i}"),
                speed: 1.0,
                failure_prob: f,
            })
            .collect();
        PlatformSpec::with_uniform_bandwidth(procs, 1.0).unwrap()
    }

    #[test]
    fn extreme_probabilities_are_exact() {
        let sure = platform(&[0.0, 0.0]);
        let est = simulate_failure_probability(
            &Mapping::single_interval(1, vec![0, 1]),
            &sure,
            1_000,
            7,
        );
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.std_error, 0.0);

        let doomed = platform(&[1.0]);
        let est = simulate_failure_probability(
            &Mapping::single_interval(1, vec![0]),
            &doomed,
            1_000,
            7,
        );
        assert_eq!(est.estimate, 1.0);
    }

    #[test]
    fn same_seed_reproduces_and_seeds_differ() {
        let platform = platform(&[0.3, 0.6, 0.5]);
        let mapping = Mapping {
            intervals: vec![
                Interval { first: 1, last: 1, procs: vec![0, 2] },
                Interval { first: 2, last: 2, procs: vec![1] },
            ],
        };
        let a = simulate_failure_probability(&mapping, &platform, 10_000, 42);
        let b = simulate_failure_probability(&mapping, &platform, 10_000, 42);
        assert_eq!(a, b);
        let c = simulate_failure_probability(&mapping, &platform, 10_000, 43);
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let platform = platform(&[0.3, 0.6, 0.5]);
        let mapping = Mapping::single_interval(2, vec![0, 1, 2]);
        let par = simulate_failure_probability(&mapping, &platform, 50_000, 11);
        let seq = simulate_failure_probability_seq(&mapping, &platform, 50_000, 11);
        assert_eq!(par, seq);
    }

    #[test]
    fn estimate_tracks_the_analytic_value() {
        let platform = platform(&[0.3, 0.6, 0.5, 0.9]);
        let mapping = Mapping {
            intervals: vec![
                Interval { first: 1, last: 1, procs: vec![0, 3] },
                Interval { first: 2, last: 2, procs: vec![1, 2] },
            ],
        };
        let analytic = failure_probability(&mapping, &platform);
        let est = simulate_failure_probability(&mapping, &platform, 100_000, 2024);
        assert!(
            (est.estimate - analytic).abs() <= 4.0 * est.std_error,
            "estimate {} vs analytic {analytic} (std error {})",
            est.estimate,
            est.std_error
        );
    }

    #[test]
    fn coverage_over_many_seeds() {
        // The four-standard-error window should cover the analytic value for
        // essentially every seed.
        let platform = platform(&[0.25, 0.5, 0.75]);
        let mapping = Mapping {
            intervals: vec![
                Interval { first: 1, last: 1, procs: vec![1] },
                Interval { first: 2, last: 3, procs: vec![0, 2] },
            ],
        };
        let analytic = failure_probability(&mapping, &platform);
        let mut covered = 0;
        for seed in 0..100 {
            let est = simulate_failure_probability(&mapping, &platform, 100_000, seed);
            if (est.estimate - analytic).abs() <= 4.0 * est.std_error {
                covered += 1;
            }
        }
        assert!(covered >= 99, "only {covered}/100 seeds within 4 standard errors");
    }
}
