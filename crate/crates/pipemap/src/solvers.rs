//! Polynomial-time single-interval solvers.
//!
//! On platforms with homogeneous links, mapping the whole pipeline as one
//! interval replicated on a well-chosen processor set is optimal for both
//! criteria, so the bounded optimization problems reduce to picking the
//! replica count and the set:
//!
//! - fully homogeneous platforms: replicate on the most reliable processors,
//!   with the count driven by the latency bound (replicas cost input
//!   serialization) or the failure bound;
//! - communication-homogeneous platforms with *uniform* failure
//!   probabilities: replicate on the fastest processors. With heterogeneous
//!   failures on such platforms the speed/reliability trade-off makes the
//!   problem NP-hard, and these solvers refuse it.
//!
//! Feasibility of every candidate is checked by evaluating the candidate
//! mapping through [`crate::metrics`], the same code path the exhaustive
//! oracle uses, so solver and oracle agree bit-for-bit on boundaries.

use thiserror::Error;

use crate::metrics::{failure_probability, latency_homogeneous_links};
use crate::model::{
    classify_platform, Mapping, PipelineSpec, PlatformKind, PlatformSpec, Uniformity,
};
use crate::within_threshold;

/// Errors from the polynomial solvers.
#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    /// No mapping satisfies the bound; the message names the binding
    /// constraint with the best achievable value.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// The platform is outside the class this solver is valid for.
    #[error("solver not applicable: requires {required}, platform is {actual}")]
    WrongPlatformClass {
        required: &'static str,
        actual: String,
    },
}

fn describe_class(platform: &PlatformSpec) -> String {
    let class = classify_platform(platform);
    format!(
        "{} with {} failure probabilities",
        class.kind(),
        class.failures
    )
}

/// Processor indices sorted most reliable first (ties: declaration order).
fn most_reliable_first(platform: &PlatformSpec) -> Vec<usize> {
    let mut order: Vec<usize> = (0..platform.processor_count()).collect();
    order.sort_by(|&a, &b| {
        let procs = platform.processors();
        procs[a]
            .failure_prob
            .partial_cmp(&procs[b].failure_prob)
            .expect("failure probabilities are finite")
            .then(a.cmp(&b))
    });
    order
}

/// Processor indices sorted fastest first (ties: declaration order).
fn fastest_first(platform: &PlatformSpec) -> Vec<usize> {
    let mut order: Vec<usize> = (0..platform.processor_count()).collect();
    order.sort_by(|&a, &b| {
        let procs = platform.processors();
        procs[b]
            .speed
            .partial_cmp(&procs[a].speed)
            .expect("speeds are finite")
            .then(a.cmp(&b))
    });
    order
}

/// Single interval over the given prefix of an ordering, processor indices
/// ascending so reports are canonical.
fn prefix_mapping(pipeline: &PipelineSpec, order: &[usize], k: usize) -> Mapping {
    let mut procs = order[..k].to_vec();
    procs.sort_unstable();
    Mapping::single_interval(pipeline.stage_count(), procs)
}

/// The mapping with the smallest achievable failure probability on any
/// platform: one interval replicated on *every* processor. (More replicas
/// never hurt reliability; merging intervals never hurts it either.)
pub fn min_fp_unconstrained(pipeline: &PipelineSpec, platform: &PlatformSpec) -> Mapping {
    Mapping::single_interval(
        pipeline.stage_count(),
        (0..platform.processor_count()).collect(),
    )
}

/// The latency-optimal mapping on platforms with homogeneous links: the
/// whole pipeline on one fastest processor (smallest index among ties).
/// Replication and splitting only add serialized input transfers.
pub fn min_latency_comm_hom(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
) -> Result<Mapping, SolveError> {
    if classify_platform(platform).links != Uniformity::Homogeneous {
        return Err(SolveError::WrongPlatformClass {
            required: "homogeneous links",
            actual: describe_class(platform),
        });
    }
    let order = fastest_first(platform);
    Ok(prefix_mapping(pipeline, &order, 1))
}

fn require_fully_homogeneous(platform: &PlatformSpec) -> Result<(), SolveError> {
    if classify_platform(platform).kind() != PlatformKind::FullyHomogeneous {
        return Err(SolveError::WrongPlatformClass {
            required: "fully homogeneous platform (uniform links and speeds)",
            actual: describe_class(platform),
        });
    }
    Ok(())
}

fn require_comm_hom_failure_hom(platform: &PlatformSpec) -> Result<(), SolveError> {
    let class = classify_platform(platform);
    if class.links != Uniformity::Homogeneous || class.failures != Uniformity::Homogeneous {
        return Err(SolveError::WrongPlatformClass {
            required: "homogeneous links and uniform failure probabilities",
            actual: describe_class(platform),
        });
    }
    Ok(())
}

/// Minimizes failure probability under a latency bound on a fully
/// homogeneous platform. Valid for arbitrary (also non-uniform) failure
/// probabilities: latency depends only on the replica count, so the best
/// feasible mapping replicates on the most reliable processors at the
/// largest count whose latency fits the bound.
pub fn min_fp_bounded_latency_fully_hom(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    max_latency: f64,
) -> Result<Mapping, SolveError> {
    require_fully_homogeneous(platform)?;
    let order = most_reliable_first(platform);
    // Latency is non-decreasing in the replica count; take the largest
    // feasible one.
    for k in (1..=order.len()).rev() {
        let mapping = prefix_mapping(pipeline, &order, k);
        let latency = latency_homogeneous_links(pipeline, platform, &mapping)
            .expect("links are homogeneous");
        if within_threshold(latency, max_latency) {
            return Ok(mapping);
        }
    }
    let floor = latency_homogeneous_links(pipeline, platform, &prefix_mapping(pipeline, &order, 1))
        .expect("links are homogeneous");
    Err(SolveError::Infeasible(format!(
        "latency bound {max_latency} is below the single-processor latency {floor}"
    )))
}

/// Minimizes latency under a failure-probability bound on a fully
/// homogeneous platform (valid for non-uniform failure probabilities too):
/// smallest replica count whose most-reliable set meets the bound.
pub fn min_latency_bounded_fp_fully_hom(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    max_failure_prob: f64,
) -> Result<Mapping, SolveError> {
    require_fully_homogeneous(platform)?;
    let order = most_reliable_first(platform);
    for k in 1..=order.len() {
        let mapping = prefix_mapping(pipeline, &order, k);
        if within_threshold(failure_probability(&mapping, platform), max_failure_prob) {
            return Ok(mapping);
        }
    }
    let order_len = order.len();
    let floor = failure_probability(&prefix_mapping(pipeline, &order, order_len), platform);
    Err(SolveError::Infeasible(format!(
        "failure bound {max_failure_prob} is below the all-processors failure probability {floor}"
    )))
}

/// Minimizes failure probability under a latency bound on a
/// communication-homogeneous platform with uniform failure probabilities.
/// With equal failure probabilities, more replicas are always at least as
/// reliable, so the fastest-first prefixes are scanned and the largest
/// feasible one wins.
pub fn min_fp_bounded_latency_comm_hom(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    max_latency: f64,
) -> Result<Mapping, SolveError> {
    require_comm_hom_failure_hom(platform)?;
    let order = fastest_first(platform);
    let mut best: Option<Mapping> = None;
    let mut floor = f64::INFINITY;
    // Feasibility is scanned over every count (not assumed contiguous):
    // adding a replica both serializes more input and may lower the
    // interval's compute speed.
    for k in 1..=order.len() {
        let mapping = prefix_mapping(pipeline, &order, k);
        let latency = latency_homogeneous_links(pipeline, platform, &mapping)
            .expect("links are homogeneous");
        floor = floor.min(latency);
        if within_threshold(latency, max_latency) {
            best = Some(mapping);
        }
    }
    best.ok_or_else(|| {
        SolveError::Infeasible(format!(
            "latency bound {max_latency} is below the best single-interval latency {floor}"
        ))
    })
}

/// Minimizes latency under a failure-probability bound on a
/// communication-homogeneous platform with uniform failure probabilities:
/// smallest fastest-first replica count meeting the bound (its latency is
/// minimal among feasible counts because replicas are taken fastest-first
/// and fewer replicas mean less input serialization).
pub fn min_latency_bounded_fp_comm_hom(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    max_failure_prob: f64,
) -> Result<Mapping, SolveError> {
    require_comm_hom_failure_hom(platform)?;
    let order = fastest_first(platform);
    for k in 1..=order.len() {
        let mapping = prefix_mapping(pipeline, &order, k);
        if within_threshold(failure_probability(&mapping, platform), max_failure_prob) {
            return Ok(mapping);
        }
    }
    let order_len = order.len();
    let floor = failure_probability(&prefix_mapping(pipeline, &order, order_len), platform);
    Err(SolveError::Infeasible(format!(
        "failure bound {max_failure_prob} is below the all-processors failure probability {floor}"
    )))
}
