//! Core domain types: pipelines, platforms, interval mappings, and their
//! validation and classification.
//!
//! Conventions used throughout the crate:
//! - stages are numbered `1..=n`; `delta[k]` is the volume of data flowing
//!   between stage `k` and stage `k+1` (`delta[0]` enters the pipeline from
//!   the input gateway, `delta[n]` leaves to the output gateway);
//! - processors are referred to by their index in platform declaration
//!   order; the string `id` is only for display and scenario files;
//! - bandwidths are defined per ordered endpoint pair, and an *absent* entry
//!   means the link is unusable, not infinitely fast.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// A linear pipeline: `n` stages with computation weights `w[0..n]` (stage
/// `k` has weight `w[k-1]`) and `n+1` inter-stage data volumes.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSpec {
    w: Vec<f64>,
    delta: Vec<f64>,
}

/// Errors constructing [`PipelineSpec`] or [`PlatformSpec`].
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("pipeline needs at least one stage")]
    NoStages,
    #[error("expected {expected} data volumes for {stages} stages, got {got}")]
    VolumeCount {
        stages: usize,
        expected: usize,
        got: usize,
    },
    #[error("stage {stage} has non-positive or non-finite weight {weight}")]
    BadWeight { stage: usize, weight: f64 },
    #[error("data volume delta[{index}] is negative or non-finite: {volume}")]
    BadVolume { index: usize, volume: f64 },
    #[error("platform needs at least one processor")]
    NoProcessors,
    #[error("processor {id:?} has non-positive or non-finite speed {speed}")]
    BadSpeed { id: String, speed: f64 },
    #[error("processor {id:?} has failure probability {prob} outside [0, 1]")]
    BadFailureProb { id: String, prob: f64 },
    #[error("processor id {id:?} is reserved or malformed (must be non-empty, not \"in\"/\"out\", and must not contain \"->\")")]
    ReservedId { id: String },
    #[error("duplicate processor id {id:?}")]
    DuplicateId { id: String },
    #[error("link {from} -> {to} has non-positive or non-finite bandwidth {bandwidth}")]
    BadBandwidth {
        from: String,
        to: String,
        bandwidth: f64,
    },
    #[error("link {from} -> {to} is not allowed (input gateway only sends, output gateway only receives, no self links)")]
    BadLinkDirection { from: String, to: String },
    #[error("link {from} -> {to} defined twice")]
    DuplicateLink { from: String, to: String },
    #[error("no link from the input gateway to any processor")]
    NoInputLink,
    #[error("no link from any processor to the output gateway")]
    NoOutputLink,
}

impl PipelineSpec {
    /// Builds a pipeline from stage weights and the `n+1` data volumes.
    pub fn new(w: Vec<f64>, delta: Vec<f64>) -> Result<Self, ModelError> {
        if w.is_empty() {
            return Err(ModelError::NoStages);
        }
        if delta.len() != w.len() + 1 {
            return Err(ModelError::VolumeCount {
                stages: w.len(),
                expected: w.len() + 1,
                got: delta.len(),
            });
        }
        for (i, &weight) in w.iter().enumerate() {
            if !(weight.is_finite() && weight > 0.0) {
                return Err(ModelError::BadWeight {
                    stage: i + 1,
                    weight,
                });
            }
        }
        for (i, &volume) in delta.iter().enumerate() {
            if !(volume.is_finite() && volume >= 0.0) {
                return Err(ModelError::BadVolume { index: i, volume });
            }
        }
        Ok(PipelineSpec { w, delta })
    }

    /// Number of stages `n`.
    pub fn stage_count(&self) -> usize {
        self.w.len()
    }

    /// Stage weights; stage `k` (1-based) is `weights()[k-1]`.
    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Data volumes `delta[0..=n]`.
    pub fn volumes(&self) -> &[f64] {
        &self.delta
    }

    /// Total computation of stages `first..=last` (1-based, inclusive).
    /// Summed in ascending stage order so the result is reproducible.
    pub fn work(&self, first: usize, last: usize) -> f64 {
        self.w[first - 1..last].iter().sum()
    }

    /// Volume read by an interval starting at stage `first`.
    pub fn input_volume(&self, first: usize) -> f64 {
        self.delta[first - 1]
    }

    /// Volume emitted by an interval ending at stage `last`.
    pub fn output_volume(&self, last: usize) -> f64 {
        self.delta[last]
    }
}

/// One processor of the target platform.
#[derive(Debug, Clone, PartialEq)]
pub struct Processor {
    /// Display / scenario-file identifier; unique within a platform.
    pub id: String,
    /// Speed in computation units per time unit (> 0).
    pub speed: f64,
    /// Probability that this processor fails during the whole execution.
    pub failure_prob: f64,
}

/// Endpoint of a communication link: the input gateway, a processor (by
/// declaration index), or the output gateway.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkEnd {
    In,
    Proc(usize),
    Out,
}

/// The target platform: processors plus a (possibly partial) directed
/// bandwidth matrix over processors and the two gateways.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatformSpec {
    processors: Vec<Processor>,
    /// Dense `(m+2) x (m+2)` matrix, row-major; `None` = unusable link.
    /// Encoding: 0 = input gateway, `1..=m` = processors, `m+1` = output.
    bandwidth: Vec<Option<f64>>,
}

impl PlatformSpec {
    /// Builds a platform from processors and an explicit link list.
    ///
    /// Links not listed are unusable. The input gateway may only appear as a
    /// source, the output gateway only as a target, and self links are not
    /// allowed. At least one link out of the input gateway and one into the
    /// output gateway must exist.
    pub fn new(
        processors: Vec<Processor>,
        links: impl IntoIterator<Item = (LinkEnd, LinkEnd, f64)>,
    ) -> Result<Self, ModelError> {
        if processors.is_empty() {
            return Err(ModelError::NoProcessors);
        }
        let mut seen = HashSet::new();
        for p in &processors {
            if !(p.speed.is_finite() && p.speed > 0.0) {
                return Err(ModelError::BadSpeed {
                    id: p.id.clone(),
                    speed: p.speed,
                });
            }
            if !(p.failure_prob >= 0.0 && p.failure_prob <= 1.0) {
                return Err(ModelError::BadFailureProb {
                    id: p.id.clone(),
                    prob: p.failure_prob,
                });
            }
            if p.id.is_empty() || p.id == "in" || p.id == "out" || p.id.contains("->") {
                return Err(ModelError::ReservedId { id: p.id.clone() });
            }
            if !seen.insert(p.id.clone()) {
                return Err(ModelError::DuplicateId { id: p.id.clone() });
            }
        }

        let m = processors.len();
        let side = m + 2;
        let mut matrix = vec![None; side * side];
        let mut platform = PlatformSpec {
            processors,
            bandwidth: Vec::new(),
        };
        for (from, to, bw) in links {
            let bad_direction = matches!(to, LinkEnd::In) || matches!(from, LinkEnd::Out) || from == to;
            if bad_direction {
                return Err(ModelError::BadLinkDirection {
                    from: platform.end_name(from),
                    to: platform.end_name(to),
                });
            }
            if !(bw.is_finite() && bw > 0.0) {
                return Err(ModelError::BadBandwidth {
                    from: platform.end_name(from),
                    to: platform.end_name(to),
                    bandwidth: bw,
                });
            }
            let slot = &mut matrix[Self::encode(from, m) * side + Self::encode(to, m)];
            if slot.is_some() {
                return Err(ModelError::DuplicateLink {
                    from: platform.end_name(from),
                    to: platform.end_name(to),
                });
            }
            *slot = Some(bw);
        }
        if !(0..m).any(|u| matrix[Self::encode(LinkEnd::Proc(u), m)].is_some()) {
            return Err(ModelError::NoInputLink);
        }
        let out_col = Self::encode(LinkEnd::Out, m);
        if !(0..m).any(|u| matrix[Self::encode(LinkEnd::Proc(u), m) * side + out_col].is_some()) {
            return Err(ModelError::NoOutputLink);
        }
        platform.bandwidth = matrix;
        Ok(platform)
    }

    /// Builds a platform where every link (full directed clique between
    /// processors, plus every gateway link) has the same bandwidth.
    pub fn with_uniform_bandwidth(
        processors: Vec<Processor>,
        bandwidth: f64,
    ) -> Result<Self, ModelError> {
        let m = processors.len();
        let mut links = Vec::new();
        for u in 0..m {
            links.push((LinkEnd::In, LinkEnd::Proc(u), bandwidth));
            links.push((LinkEnd::Proc(u), LinkEnd::Out, bandwidth));
            for v in 0..m {
                if u != v {
                    links.push((LinkEnd::Proc(u), LinkEnd::Proc(v), bandwidth));
                }
            }
        }
        Self::new(processors, links)
    }

    fn encode(end: LinkEnd, m: usize) -> usize {
        match end {
            LinkEnd::In => 0,
            LinkEnd::Proc(u) => {
                assert!(u < m, "processor index {u} out of range (m = {m})");
                u + 1
            }
            LinkEnd::Out => m + 1,
        }
    }

    /// Number of processors `m`.
    pub fn processor_count(&self) -> usize {
        self.processors.len()
    }

    pub fn processors(&self) -> &[Processor] {
        &self.processors
    }

    /// Bandwidth of the directed link, or `None` if unusable.
    pub fn link(&self, from: LinkEnd, to: LinkEnd) -> Option<f64> {
        let m = self.processors.len();
        self.bandwidth[Self::encode(from, m) * (m + 2) + Self::encode(to, m)]
    }

    /// All defined links in a fixed order (source-major over the encoding
    /// input gateway, processors in declaration order, output gateway).
    pub fn links(&self) -> impl Iterator<Item = (LinkEnd, LinkEnd, f64)> + '_ {
        let m = self.processors.len();
        let side = m + 2;
        self.bandwidth.iter().enumerate().filter_map(move |(i, bw)| {
            bw.map(|bw| (Self::decode(i / side, m), Self::decode(i % side, m), bw))
        })
    }

    fn decode(code: usize, m: usize) -> LinkEnd {
        if code == 0 {
            LinkEnd::In
        } else if code == m + 1 {
            LinkEnd::Out
        } else {
            LinkEnd::Proc(code - 1)
        }
    }

    /// The common bandwidth if all defined links share one value
    /// (i.e. communications are homogeneous), else `None`.
    pub fn common_bandwidth(&self) -> Option<f64> {
        let mut links = self.links();
        let (_, _, first) = links.next().expect("platform invariant: at least one link");
        if links.all(|(_, _, bw)| bw == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Human-readable name of a link endpoint.
    pub fn end_name(&self, end: LinkEnd) -> String {
        match end {
            LinkEnd::In => "in".to_string(),
            LinkEnd::Out => "out".to_string(),
            LinkEnd::Proc(u) => self.processors[u].id.clone(),
        }
    }
}

/// Whether one structural attribute of a platform is uniform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uniformity {
    Homogeneous,
    Heterogeneous,
}

impl fmt::Display for Uniformity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Uniformity::Homogeneous => write!(f, "homogeneous"),
            Uniformity::Heterogeneous => write!(f, "heterogeneous"),
        }
    }
}

/// Structural platform class along the three independent axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlatformClass {
    /// All defined links share one bandwidth?
    pub links: Uniformity,
    /// All processors share one speed?
    pub speeds: Uniformity,
    /// All processors share one failure probability?
    pub failures: Uniformity,
}

/// The coarse structural kind used for solver dispatch (failure uniformity
/// is tracked separately on [`PlatformClass`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlatformKind {
    /// Homogeneous links and homogeneous speeds.
    FullyHomogeneous,
    /// Homogeneous links, heterogeneous speeds.
    CommHomogeneous,
    /// Heterogeneous (or partially absent with differing) links.
    FullyHeterogeneous,
}

impl fmt::Display for PlatformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlatformKind::FullyHomogeneous => write!(f, "fully homogeneous"),
            PlatformKind::CommHomogeneous => write!(f, "communication homogeneous"),
            PlatformKind::FullyHeterogeneous => write!(f, "fully heterogeneous"),
        }
    }
}

impl PlatformClass {
    pub fn kind(&self) -> PlatformKind {
        match (self.links, self.speeds) {
            (Uniformity::Homogeneous, Uniformity::Homogeneous) => PlatformKind::FullyHomogeneous,
            (Uniformity::Homogeneous, Uniformity::Heterogeneous) => PlatformKind::CommHomogeneous,
            (Uniformity::Heterogeneous, _) => PlatformKind::FullyHeterogeneous,
        }
    }
}

/// Classifies a platform by exact value comparison: every axis is
/// homogeneous iff all its values are identical. Absent links do not make
/// links heterogeneous by themselves; only differing defined bandwidths do.
pub fn classify_platform(platform: &PlatformSpec) -> PlatformClass {
    let links = if platform.common_bandwidth().is_some() {
        Uniformity::Homogeneous
    } else {
        Uniformity::Heterogeneous
    };
    let uniform = |mut values: Box<dyn Iterator<Item = f64> + '_>| -> Uniformity {
        let first = values.next().expect("platform invariant: m >= 1");
        if values.all(|v| v == first) {
            Uniformity::Homogeneous
        } else {
            Uniformity::Heterogeneous
        }
    };
    PlatformClass {
        links,
        speeds: uniform(Box::new(platform.processors().iter().map(|p| p.speed))),
        failures: uniform(Box::new(platform.processors().iter().map(|p| p.failure_prob))),
    }
}

/// One interval of a mapping: consecutive stages `first..=last` (1-based)
/// replicated on the processors in `procs` (platform indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub first: usize,
    pub last: usize,
    pub procs: Vec<usize>,
}

/// An interval mapping: an ordered partition of the stages into intervals,
/// each with its replication set. Sets of distinct intervals are disjoint
/// (each physical processor runs at most one interval).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapping {
    pub intervals: Vec<Interval>,
}

impl Mapping {
    /// The whole pipeline as one interval replicated on `procs`.
    pub fn single_interval(stage_count: usize, procs: Vec<usize>) -> Self {
        Mapping {
            intervals: vec![Interval {
                first: 1,
                last: stage_count,
                procs,
            }],
        }
    }

    /// Number of intervals `p`.
    pub fn interval_count(&self) -> usize {
        self.intervals.len()
    }

    /// True if every interval runs on exactly one processor.
    pub fn is_replication_free(&self) -> bool {
        self.intervals.iter().all(|iv| iv.procs.len() == 1)
    }
}

/// A mapping's two quality criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// Worst-case end-to-end latency of one data set.
    pub latency: f64,
    /// Probability that every replica of some interval fails.
    pub failure_prob: f64,
}

/// Violations reported by [`validate_mapping`]. Interval numbers are
/// 1-based positions in the mapping.
#[derive(Debug, Error, PartialEq)]
pub enum MappingViolation {
    #[error("mapping has no intervals")]
    Empty,
    #[error("interval {interval} is malformed: stages {first}..{last}")]
    BadInterval {
        interval: usize,
        first: usize,
        last: usize,
    },
    #[error("interval 1 must start at stage 1, starts at {first}")]
    BadStart { first: usize },
    #[error("intervals {} and {} are not consecutive: stage ranges ..{prev_last} and {next_first}..", interval - 1, interval)]
    NotConsecutive {
        interval: usize,
        prev_last: usize,
        next_first: usize,
    },
    #[error("last interval ends at stage {last}, pipeline has {stages} stages")]
    BadEnd { last: usize, stages: usize },
    #[error("interval {interval} has an empty replication set")]
    EmptyAllocation { interval: usize },
    #[error("interval {interval} names processor index {index}, platform has {procs}")]
    UnknownProcessor {
        interval: usize,
        index: usize,
        procs: usize,
    },
    #[error("processor {id:?} is allocated more than once (again in interval {interval})")]
    Reused { interval: usize, id: String },
    #[error("mapping needs unusable link {from} -> {to}")]
    MissingLink { from: String, to: String },
}

/// Checks an interval mapping against a pipeline and a platform:
/// the intervals cover stages `1..=n` consecutively in order, every
/// replication set is non-empty, processor indices are in range, no
/// processor is allocated twice, and — on platforms with heterogeneous
/// links — every link the latency evaluation consults is defined.
///
/// Violations are reported in this order, scanning intervals left to right.
pub fn validate_mapping(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    mapping: &Mapping,
) -> Result<(), MappingViolation> {
    let n = pipeline.stage_count();
    let m = platform.processor_count();
    if mapping.intervals.is_empty() {
        return Err(MappingViolation::Empty);
    }

    let mut used = vec![false; m];
    let mut expected_first = 1;
    for (pos, iv) in mapping.intervals.iter().enumerate() {
        let number = pos + 1;
        if iv.first == 0 || iv.first > iv.last {
            return Err(MappingViolation::BadInterval {
                interval: number,
                first: iv.first,
                last: iv.last,
            });
        }
        if pos == 0 {
            if iv.first != 1 {
                return Err(MappingViolation::BadStart { first: iv.first });
            }
        } else if iv.first != expected_first {
            return Err(MappingViolation::NotConsecutive {
                interval: number,
                prev_last: expected_first - 1,
                next_first: iv.first,
            });
        }
        if iv.last > n {
            return Err(MappingViolation::BadEnd {
                last: iv.last,
                stages: n,
            });
        }
        expected_first = iv.last + 1;

        if iv.procs.is_empty() {
            return Err(MappingViolation::EmptyAllocation { interval: number });
        }
        for &u in &iv.procs {
            if u >= m {
                return Err(MappingViolation::UnknownProcessor {
                    interval: number,
                    index: u,
                    procs: m,
                });
            }
            if used[u] {
                return Err(MappingViolation::Reused {
                    interval: number,
                    id: platform.processors()[u].id.clone(),
                });
            }
            used[u] = true;
        }
    }
    let last = mapping.intervals.last().expect("non-empty").last;
    if last != n {
        return Err(MappingViolation::BadEnd { last, stages: n });
    }

    // Link availability only matters when the heterogeneous-links latency
    // evaluation will consult the matrix; with homogeneous links every
    // transfer uses the single common bandwidth.
    if classify_platform(platform).links == Uniformity::Heterogeneous {
        let missing = |from: LinkEnd, to: LinkEnd| MappingViolation::MissingLink {
            from: platform.end_name(from),
            to: platform.end_name(to),
        };
        for &u in &mapping.intervals[0].procs {
            if platform.link(LinkEnd::In, LinkEnd::Proc(u)).is_none() {
                return Err(missing(LinkEnd::In, LinkEnd::Proc(u)));
            }
        }
        for window in mapping.intervals.windows(2) {
            for &u in &window[0].procs {
                for &v in &window[1].procs {
                    if u != v && platform.link(LinkEnd::Proc(u), LinkEnd::Proc(v)).is_none() {
                        return Err(missing(LinkEnd::Proc(u), LinkEnd::Proc(v)));
                    }
                }
            }
        }
        for &u in &mapping.intervals.last().expect("non-empty").procs {
            if platform.link(LinkEnd::Proc(u), LinkEnd::Out).is_none() {
                return Err(missing(LinkEnd::Proc(u), LinkEnd::Out));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn proc(id: &str, speed: f64, failure_prob: f64) -> Processor {
        Processor {
            id: id.to_string(),
            speed,
            failure_prob,
        }
    }

    fn uniform_platform(specs: &[(&str, f64, f64)], bw: f64) -> PlatformSpec {
        let procs = specs.iter().map(|&(id, s, f)| proc(id, s, f)).collect();
        PlatformSpec::with_uniform_bandwidth(procs, bw).unwrap()
    }

    #[test]
    fn pipeline_accessors() {
        let p = PipelineSpec::new(vec![1.0, 2.0, 3.0], vec![10.0, 0.0, 5.0, 7.0]).unwrap();
        assert_eq!(p.stage_count(), 3);
        assert_eq!(p.work(1, 3), 6.0);
        assert_eq!(p.work(2, 2), 2.0);
        assert_eq!(p.input_volume(2), 0.0);
        assert_eq!(p.output_volume(3), 7.0);
    }

    #[test]
    fn pipeline_rejects_bad_shapes() {
        assert_eq!(
            PipelineSpec::new(vec![], vec![1.0]),
            Err(ModelError::NoStages)
        );
        assert!(matches!(
            PipelineSpec::new(vec![1.0], vec![1.0]),
            Err(ModelError::VolumeCount { expected: 2, got: 1, .. })
        ));
        assert!(matches!(
            PipelineSpec::new(vec![0.0], vec![1.0, 1.0]),
            Err(ModelError::BadWeight { stage: 1, .. })
        ));
        assert!(matches!(
            PipelineSpec::new(vec![1.0], vec![1.0, -2.0]),
            Err(ModelError::BadVolume { index: 1, .. })
        ));
    }

    #[test]
    fn platform_rejects_bad_processors() {
        assert!(matches!(
            PlatformSpec::with_uniform_bandwidth(vec![proc("p", -1.0, 0.5)], 1.0),
            Err(ModelError::BadSpeed { .. })
        ));
        assert!(matches!(
            PlatformSpec::with_uniform_bandwidth(vec![proc("p", 1.0, 1.5)], 1.0),
            Err(ModelError::BadFailureProb { .. })
        ));
        assert!(matches!(
            PlatformSpec::with_uniform_bandwidth(vec![proc("in", 1.0, 0.5)], 1.0),
            Err(ModelError::ReservedId { .. })
        ));
        assert!(matches!(
            PlatformSpec::with_uniform_bandwidth(
                vec![proc("p", 1.0, 0.5), proc("p", 2.0, 0.5)],
                1.0
            ),
            Err(ModelError::DuplicateId { .. })
        ));
    }

    #[test]
    fn platform_link_rules() {
        let procs = || vec![proc("a", 1.0, 0.1), proc("b", 1.0, 0.1)];
        assert!(matches!(
            PlatformSpec::new(procs(), vec![(LinkEnd::Proc(0), LinkEnd::In, 1.0)]),
            Err(ModelError::BadLinkDirection { .. })
        ));
        assert!(matches!(
            PlatformSpec::new(procs(), vec![(LinkEnd::Proc(0), LinkEnd::Proc(0), 1.0)]),
            Err(ModelError::BadLinkDirection { .. })
        ));
        assert!(matches!(
            PlatformSpec::new(procs(), vec![(LinkEnd::Proc(0), LinkEnd::Out, 1.0)]),
            Err(ModelError::NoInputLink)
        ));
        assert!(matches!(
            PlatformSpec::new(procs(), vec![(LinkEnd::In, LinkEnd::Proc(0), 1.0)]),
            Err(ModelError::NoOutputLink)
        ));
        assert!(matches!(
            PlatformSpec::new(
                procs(),
                vec![
                    (LinkEnd::In, LinkEnd::Proc(0), 1.0),
                    (LinkEnd::In, LinkEnd::Proc(0), 2.0),
                ]
            ),
            Err(ModelError::DuplicateLink { .. })
        ));
        assert!(matches!(
            PlatformSpec::new(procs(), vec![(LinkEnd::In, LinkEnd::Proc(0), 0.0)]),
            Err(ModelError::BadBandwidth { .. })
        ));
    }

    #[test]
    fn uniform_bandwidth_builds_full_clique() {
        let platform = uniform_platform(&[("a", 1.0, 0.1), ("b", 1.0, 0.1)], 4.0);
        // 2 inter-processor + 4 gateway links, no self links.
        assert_eq!(platform.links().count(), 6);
        assert_eq!(platform.link(LinkEnd::Proc(0), LinkEnd::Proc(1)), Some(4.0));
        assert_eq!(platform.link(LinkEnd::Proc(0), LinkEnd::Proc(0)), None);
        assert_eq!(platform.link(LinkEnd::In, LinkEnd::Proc(1)), Some(4.0));
        assert_eq!(platform.common_bandwidth(), Some(4.0));
    }

    #[test]
    fn classify_all_axes() {
        let hom = uniform_platform(&[("a", 2.0, 0.1), ("b", 2.0, 0.1)], 1.0);
        let class = classify_platform(&hom);
        assert_eq!(class.links, Uniformity::Homogeneous);
        assert_eq!(class.speeds, Uniformity::Homogeneous);
        assert_eq!(class.failures, Uniformity::Homogeneous);
        assert_eq!(class.kind(), PlatformKind::FullyHomogeneous);

        let comm = uniform_platform(&[("a", 1.0, 0.1), ("b", 100.0, 0.8)], 1.0);
        let class = classify_platform(&comm);
        assert_eq!(class.kind(), PlatformKind::CommHomogeneous);
        assert_eq!(class.failures, Uniformity::Heterogeneous);

        let het = PlatformSpec::new(
            vec![proc("a", 1.0, 0.1), proc("b", 1.0, 0.1)],
            vec![
                (LinkEnd::In, LinkEnd::Proc(0), 100.0),
                (LinkEnd::Proc(0), LinkEnd::Out, 1.0),
            ],
        )
        .unwrap();
        assert_eq!(classify_platform(&het).kind(), PlatformKind::FullyHeterogeneous);
    }

    #[test]
    fn classify_ignores_absent_links() {
        // Only some links exist, but all defined ones share a bandwidth.
        let p = PlatformSpec::new(
            vec![proc("a", 1.0, 0.1), proc("b", 2.0, 0.1)],
            vec![
                (LinkEnd::In, LinkEnd::Proc(0), 3.0),
                (LinkEnd::Proc(0), LinkEnd::Proc(1), 3.0),
                (LinkEnd::Proc(1), LinkEnd::Out, 3.0),
            ],
        )
        .unwrap();
        assert_eq!(classify_platform(&p).links, Uniformity::Homogeneous);
        assert_eq!(classify_platform(&p).kind(), PlatformKind::CommHomogeneous);
    }

    fn three_stage_pipeline() -> PipelineSpec {
        PipelineSpec::new(vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn validate_accepts_partition() {
        let pipeline = three_stage_pipeline();
        let platform = uniform_platform(&[("a", 1.0, 0.1), ("b", 1.0, 0.1), ("c", 1.0, 0.1)], 1.0);
        let mapping = Mapping {
            intervals: vec![
                Interval { first: 1, last: 2, procs: vec![2, 0] },
                Interval { first: 3, last: 3, procs: vec![1] },
            ],
        };
        assert_eq!(validate_mapping(&pipeline, &platform, &mapping), Ok(()));
    }

    #[test]
    fn validate_orders_violations() {
        let pipeline = three_stage_pipeline();
        let platform = uniform_platform(&[("a", 1.0, 0.1), ("b", 1.0, 0.1)], 1.0);
        let bad = |intervals: Vec<Interval>| {
            validate_mapping(&pipeline, &platform, &Mapping { intervals }).unwrap_err()
        };

        assert_eq!(bad(vec![]), MappingViolation::Empty);
        assert_eq!(
            bad(vec![Interval { first: 2, last: 3, procs: vec![0] }]),
            MappingViolation::BadStart { first: 2 }
        );
        assert_eq!(
            bad(vec![
                Interval { first: 1, last: 2, procs: vec![0] },
                Interval { first: 2, last: 3, procs: vec![1] },
            ]),
            MappingViolation::NotConsecutive { interval: 2, prev_last: 2, next_first: 2 }
        );
        assert_eq!(
            bad(vec![Interval { first: 1, last: 2, procs: vec![0] }]),
            MappingViolation::BadEnd { last: 2, stages: 3 }
        );
        assert_eq!(
            bad(vec![Interval { first: 1, last: 3, procs: vec![] }]),
            MappingViolation::EmptyAllocation { interval: 1 }
        );
        assert_eq!(
            bad(vec![Interval { first: 1, last: 3, procs: vec![7] }]),
            MappingViolation::UnknownProcessor { interval: 1, index: 7, procs: 2 }
        );
        assert_eq!(
            bad(vec![
                Interval { first: 1, last: 1, procs: vec![0] },
                Interval { first: 2, last: 3, procs: vec![1, 0] },
            ]),
            MappingViolation::Reused { interval: 2, id: "a".to_string() }
        );
        assert_eq!(
            bad(vec![Interval { first: 1, last: 3, procs: vec![0, 0] }]),
            MappingViolation::Reused { interval: 1, id: "a".to_string() }
        );
    }

    #[test]
    fn validate_checks_links_only_when_heterogeneous() {
        let pipeline = PipelineSpec::new(vec![1.0, 1.0], vec![1.0, 1.0, 1.0]).unwrap();
        // Heterogeneous links: a -> b missing, a -> out missing.
        let platform = PlatformSpec::new(
            vec![proc("a", 1.0, 0.1), proc("b", 1.0, 0.1)],
            vec![
                (LinkEnd::In, LinkEnd::Proc(0), 10.0),
                (LinkEnd::Proc(1), LinkEnd::Proc(0), 1.0),
                (LinkEnd::Proc(1), LinkEnd::Out, 1.0),
            ],
        )
        .unwrap();
        let split = Mapping {
            intervals: vec![
                Interval { first: 1, last: 1, procs: vec![0] },
                Interval { first: 2, last: 2, procs: vec![1] },
            ],
        };
        assert_eq!(
            validate_mapping(&pipeline, &platform, &split),
            Err(MappingViolation::MissingLink { from: "a".to_string(), to: "b".to_string() })
        );
        let whole = Mapping::single_interval(2, vec![1]);
        assert_eq!(
            validate_mapping(&pipeline, &platform, &whole),
            Err(MappingViolation::MissingLink { from: "in".to_string(), to: "b".to_string() })
        );

        // Same shape but homogeneous links: no link checks apply.
        let hom = uniform_platform(&[("a", 1.0, 0.1), ("b", 1.0, 0.1)], 1.0);
        assert_eq!(validate_mapping(&pipeline, &hom, &split), Ok(()));
    }
}
