//! Evaluation of an interval mapping: global failure probability and
//! worst-case latency under the one-port, non-overlapping execution model.
//!
//! All functions take mappings that already passed
//! [`validate_mapping`](crate::model::validate_mapping); indices are used
//! unchecked and sums run in stored order so results are reproducible
//! bit-for-bit.

use thiserror::Error;

use crate::model::{classify_platform, Evaluation, LinkEnd, Mapping, PipelineSpec, PlatformSpec, Uniformity};

/// Errors from latency evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("platform links are heterogeneous; the single-bandwidth latency model does not apply")]
    HeterogeneousLinks,
    #[error("mapping uses unusable link {from} -> {to}")]
    MissingLink { from: String, to: String },
}

/// Failure product of one replication set: the probability that *all* its
/// processors fail. Computed in log domain to survive very many factors;
/// any fail-proof processor (probability 0) short-circuits to exactly 0.
fn interval_failure_product(procs: &[usize], platform: &PlatformSpec) -> f64 {
    let mut log_sum = 0.0;
    for &u in procs {
        let f = platform.processors()[u].failure_prob;
        if f == 0.0 {
            return 0.0;
        }
        log_sum += f.ln();
    }
    log_sum.exp()
}

/// Probability that the application fails: some interval loses all of its
/// replicas. Intervals fail independently because replication sets are
/// disjoint. The result is clamped to `[0, 1]`.
pub fn failure_probability(mapping: &Mapping, platform: &PlatformSpec) -> f64 {
    let mut success = 1.0;
    for iv in &mapping.intervals {
        success *= 1.0 - interval_failure_product(&iv.procs, platform);
    }
    (1.0 - success).clamp(0.0, 1.0)
}

fn min_speed(procs: &[usize], platform: &PlatformSpec) -> f64 {
    procs
        .iter()
        .map(|&u| platform.processors()[u].speed)
        .fold(f64::INFINITY, f64::min)
}

/// Worst-case latency when every link has the same bandwidth `b`.
///
/// Per interval, the one-port input gateway of the interval serializes one
/// copy of the interval's input to each of its `k` replicas, then the
/// slowest replica computes the interval's whole work; the final interval's
/// output transfer to the output gateway is charged once at the end.
///
/// Errors with [`EvalError::HeterogeneousLinks`] if the platform has no
/// common bandwidth.
pub fn latency_homogeneous_links(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    mapping: &Mapping,
) -> Result<f64, EvalError> {
    let b = platform
        .common_bandwidth()
        .ok_or(EvalError::HeterogeneousLinks)?;
    let mut t = 0.0;
    for iv in &mapping.intervals {
        t += iv.procs.len() as f64 * pipeline.input_volume(iv.first) / b;
        t += pipeline.work(iv.first, iv.last) / min_speed(&iv.procs, platform);
    }
    t += pipeline.output_volume(pipeline.stage_count()) / b;
    Ok(t)
}

/// Worst-case latency with per-link bandwidths.
///
/// The input gateway serializes the pipeline input to every replica of the
/// first interval. Then, for each interval, the worst replica bounds the
/// step: its compute time plus the serialized transfers of the interval's
/// output to every replica of the next interval (to the output gateway for
/// the last interval). A replica never pays to send to itself; with
/// disjoint replication sets that only matters defensively.
///
/// Errors with [`EvalError::MissingLink`] if a consulted link is unusable.
pub fn latency_heterogeneous(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    mapping: &Mapping,
) -> Result<f64, EvalError> {
    let link = |from: LinkEnd, to: LinkEnd| {
        platform.link(from, to).ok_or_else(|| EvalError::MissingLink {
            from: platform.end_name(from),
            to: platform.end_name(to),
        })
    };

    let mut t = 0.0;
    let delta_in = pipeline.input_volume(1);
    for &u in &mapping.intervals[0].procs {
        t += delta_in / link(LinkEnd::In, LinkEnd::Proc(u))?;
    }
    for (pos, iv) in mapping.intervals.iter().enumerate() {
        let work = pipeline.work(iv.first, iv.last);
        let out_volume = pipeline.output_volume(iv.last);
        let next: &[usize] = mapping
            .intervals
            .get(pos + 1)
            .map(|nx| nx.procs.as_slice())
            .unwrap_or(&[]);
        let mut worst = f64::NEG_INFINITY;
        for &u in &iv.procs {
            let mut cost = work / platform.processors()[u].speed;
            if next.is_empty() {
                cost += out_volume / link(LinkEnd::Proc(u), LinkEnd::Out)?;
            } else {
                for &v in next {
                    if v != u {
                        cost += out_volume / link(LinkEnd::Proc(u), LinkEnd::Proc(v))?;
                    }
                }
            }
            worst = worst.max(cost);
        }
        t += worst;
    }
    Ok(t)
}

/// Evaluates both criteria, dispatching the latency model on link
/// uniformity alone: homogeneous links use the single-bandwidth model,
/// heterogeneous links the per-link one.
pub fn evaluate(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    mapping: &Mapping,
) -> Result<Evaluation, EvalError> {
    let latency = match classify_platform(platform).links {
        Uniformity::Homogeneous => latency_homogeneous_links(pipeline, platform, mapping)?,
        Uniformity::Heterogeneous => latency_heterogeneous(pipeline, platform, mapping)?,
    };
    Ok(Evaluation {
        latency,
        failure_prob: failure_probability(mapping, platform),
    })
}
