//! Exhaustive reference oracle: enumerates *every* interval mapping of
//! small instances, computes the exact latency/failure-probability Pareto
//! front, and answers both bounded optimization questions from it. Also an
//! exhaustive one-to-one (each stage on its own processor) latency
//! optimizer.
//!
//! The candidate space is the choice of a stage partition (a cut mask over
//! the `n-1` stage boundaries) times, per partition, every assignment of
//! pairwise-disjoint non-empty replication sets. Its size explodes
//! combinatorially, so every entry point first checks [`EnumLimits`] and
//! refuses oversized instances with a size estimate instead of silently
//! truncating.
//!
//! Enumeration order is canonical — cut masks ascending, then per-interval
//! subset bitmasks in ascending numeric value, last interval fastest — and
//! every candidate carries its ordinal in that order. Ties on both criteria
//! keep the earliest ordinal, which makes the parallel front (per-mask
//! fronts merged by a canonical sort) bit-identical to the sequential one.

use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::metrics::{failure_probability, latency_heterogeneous, latency_homogeneous_links};
use crate::model::{
    classify_platform, Evaluation, Interval, Mapping, PipelineSpec, PlatformSpec, Uniformity,
};
use crate::report::fmt_sig;
use crate::within_threshold;

/// Hard bounds on the exhaustive search space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumLimits {
    /// Maximum pipeline length `n`.
    pub max_stages: usize,
    /// Maximum platform size `m`.
    pub max_processors: usize,
    /// Maximum number of candidate mappings the enumeration may visit.
    pub max_candidates: u64,
    /// Optional cap on the interval count `p` (`None` = only the structural
    /// `p <= min(n, m)` limit applies).
    pub max_intervals: Option<usize>,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits {
            max_stages: 6,
            max_processors: 7,
            max_candidates: 10_000_000,
            max_intervals: None,
        }
    }
}

/// Errors from the oracle.
#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance too large for exhaustive enumeration: {what} is {value}, limit is {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("enumeration would visit {estimate} candidate mappings, limit is {limit}")]
    TooManyCandidates { estimate: String, limit: u64 },
    #[error("infeasible: {0}")]
    Infeasible(String),
}

/// Number of interval mappings of an `n`-stage pipeline on `m` processors
/// with at most `max_intervals` intervals (`None` = unrestricted). `None`
/// result means the count overflows 128 bits.
pub fn candidate_count(n: usize, m: usize, max_intervals: Option<usize>) -> Option<u128> {
    let p_cap = max_intervals.unwrap_or(usize::MAX).min(n).min(m);
    let mut total: u128 = 0;
    for p in 1..=p_cap {
        let partitions = binomial(n - 1, p - 1)?;
        let assignments = disjoint_assignments(p, m)?;
        total = total.checked_add(partitions.checked_mul(assignments)?)?;
    }
    Some(total)
}

fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let mut result: u128 = 1;
    for i in 0..k.min(n - k) {
        result = result.checked_mul((n - i) as u128)?;
        result /= (i + 1) as u128;
    }
    Some(result)
}

/// Ordered lists of `p` pairwise-disjoint non-empty subsets of `m`
/// processors, by inclusion-exclusion over which intervals stay empty:
/// each processor picks an interval or "unused", minus the assignments
/// missing at least one interval.
fn disjoint_assignments(p: usize, m: usize) -> Option<u128> {
    if p > m {
        return Some(0);
    }
    let mut total: i128 = 0;
    for i in 0..=p {
        let choose = binomial(p, i)? as i128;
        let ways = ((p + 1 - i) as i128).checked_pow(m as u32)?;
        let term = choose.checked_mul(ways)?;
        total = if i % 2 == 0 {
            total.checked_add(term)?
        } else {
            total.checked_sub(term)?
        };
    }
    debug_assert!(total >= 0);
    Some(total as u128)
}

/// Stage ranges (1-based, inclusive) encoded by a cut mask: bit `i` set
/// means a cut between stages `i+1` and `i+2`.
fn boundaries_from_mask(mask: u64, n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut first = 1;
    for i in 0..n - 1 {
        if mask >> i & 1 == 1 {
            out.push((first, i + 1));
            first = i + 2;
        }
    }
    out.push((first, n));
    out
}

/// Backtracking odometer over the ordered disjoint non-empty subset
/// assignments for a fixed stage partition, in lexicographic order of the
/// per-interval subset bitmasks (ascending numeric value, last interval
/// advancing fastest).
#[derive(Debug)]
struct AllocOdometer {
    pool: u32,
    subsets: Vec<u32>,
    avail: Vec<u32>,
}

impl AllocOdometer {
    /// First assignment (singleton lowest-index processors), or `None` when
    /// `p` exceeds the processor count.
    fn first(p: usize, m: usize) -> Option<AllocOdometer> {
        if p > m {
            return None;
        }
        let mut odo = AllocOdometer {
            pool: ((1u64 << m) - 1) as u32,
            subsets: vec![0; p],
            avail: vec![0; p],
        };
        let ok = odo.refill(0);
        debug_assert!(ok, "p <= m always admits singleton assignments");
        Some(odo)
    }

    /// Resets levels `from..` to their smallest subsets (singletons of the
    /// lowest available processor). Fails iff some level runs out of
    /// processors — and since singletons consume the fewest, no other tail
    /// works either.
    fn refill(&mut self, from: usize) -> bool {
        for l in from..self.subsets.len() {
            self.avail[l] = if l == 0 {
                self.pool
            } else {
                self.avail[l - 1] & !self.subsets[l - 1]
            };
            if self.avail[l] == 0 {
                return false;
            }
            self.subsets[l] = self.avail[l] & self.avail[l].wrapping_neg();
        }
        true
    }

    /// Advances to the next assignment; false when exhausted.
    fn advance(&mut self) -> bool {
        let p = self.subsets.len();
        let mut level = p - 1;
        loop {
            // Next subset of `avail` above the current one, in ascending
            // numeric order: (s - avail) & avail walks exactly the subsets
            // of `avail`, wrapping to 0 after the largest.
            let avail = self.avail[level];
            let next = self.subsets[level].wrapping_sub(avail) & avail;
            if next != 0 {
                self.subsets[level] = next;
                if self.refill(level + 1) {
                    return true;
                }
                continue;
            }
            if level == 0 {
                return false;
            }
            level -= 1;
        }
    }

    /// Writes the current assignment into `mapping` (same interval count).
    fn write_into(&self, mapping: &mut Mapping) {
        for (iv, &subset) in mapping.intervals.iter_mut().zip(&self.subsets) {
            iv.procs.clear();
            let mut bits = subset;
            while bits != 0 {
                iv.procs.push(bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
    }
}

/// Iterator over every interval mapping in canonical enumeration order.
#[derive(Debug)]
pub struct MappingEnumerator {
    n: usize,
    m: usize,
    p_cap: usize,
    mask: u64,
    mask_end: u64,
    boundaries: Vec<(usize, usize)>,
    odometer: Option<AllocOdometer>,
}

impl MappingEnumerator {
    fn new(n: usize, m: usize, p_cap: usize) -> MappingEnumerator {
        MappingEnumerator {
            n,
            m,
            p_cap,
            mask: 0,
            mask_end: 1u64 << (n - 1),
            boundaries: Vec::new(),
            odometer: None,
        }
    }
}

impl Iterator for MappingEnumerator {
    type Item = Mapping;

    fn next(&mut self) -> Option<Mapping> {
        loop {
            if self.odometer.is_none() {
                if self.mask >= self.mask_end {
                    return None;
                }
                let boundaries = boundaries_from_mask(self.mask, self.n);
                self.mask += 1;
                if boundaries.len() > self.p_cap {
                    continue;
                }
                self.odometer = AllocOdometer::first(boundaries.len(), self.m);
                self.boundaries = boundaries;
            }
            let odo = self.odometer.as_mut().expect("set above");
            let mut mapping = Mapping {
                intervals: self
                    .boundaries
                    .iter()
                    .map(|&(first, last)| Interval {
                        first,
                        last,
                        procs: Vec::new(),
                    })
                    .collect(),
            };
            odo.write_into(&mut mapping);
            if !odo.advance() {
                self.odometer = None;
            }
            return Some(mapping);
        }
    }
}

/// Structural caps of the enumeration machinery (cut masks in a `u64`,
/// allocation subsets in a `u32`); far beyond anything the candidate budget
/// admits, but enforced so raising [`EnumLimits`] can never overflow.
const HARD_MAX_STAGES: usize = 60;
const HARD_MAX_PROCESSORS: usize = 30;

fn check_sizes(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    limits: &EnumLimits,
) -> Result<(usize, usize), OracleError> {
    let n = pipeline.stage_count();
    let m = platform.processor_count();
    let max_stages = limits.max_stages.min(HARD_MAX_STAGES);
    if n > max_stages {
        return Err(OracleError::TooLarge {
            what: "stage count",
            value: n,
            limit: max_stages,
        });
    }
    let max_processors = limits.max_processors.min(HARD_MAX_PROCESSORS);
    if m > max_processors {
        return Err(OracleError::TooLarge {
            what: "processor count",
            value: m,
            limit: max_processors,
        });
    }
    Ok((n, m))
}

fn check_limits(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    limits: &EnumLimits,
) -> Result<(usize, usize, usize), OracleError> {
    let (n, m) = check_sizes(pipeline, platform, limits)?;
    let p_cap = limits.max_intervals.unwrap_or(usize::MAX).min(n).min(m);
    match candidate_count(n, m, limits.max_intervals) {
        Some(count) if count <= limits.max_candidates as u128 => Ok((n, m, p_cap)),
        Some(count) => Err(OracleError::TooManyCandidates {
            estimate: count.to_string(),
            limit: limits.max_candidates,
        }),
        None => Err(OracleError::TooManyCandidates {
            estimate: "more than 2^127".to_string(),
            limit: limits.max_candidates,
        }),
    }
}

/// All interval mappings of this instance, in canonical order, after
/// checking the enumeration limits. Enumeration is structural: mappings
/// that need unusable links are still produced (evaluation rejects them).
pub fn enumerate_interval_mappings(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    limits: &EnumLimits,
) -> Result<MappingEnumerator, OracleError> {
    let (n, m, p_cap) = check_limits(pipeline, platform, limits)?;
    Ok(MappingEnumerator::new(n, m, p_cap))
}

/// One Pareto-optimal mapping with its evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoEntry {
    pub mapping: Mapping,
    pub evaluation: Evaluation,
}

/// The exact Pareto front: entries sorted by strictly increasing latency
/// and strictly decreasing failure probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    entries: Vec<ParetoEntry>,
}

impl ParetoFront {
    pub fn entries(&self) -> &[ParetoEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// CSV export: `latency,failure_prob,p,intervals,allocations`, one row
    /// per entry in front order, numbers at 12 significant digits,
    /// intervals like `1-2;3-3` and allocations like `a+b;c`.
    pub fn to_csv(&self, platform: &PlatformSpec) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["latency", "failure_prob", "p", "intervals", "allocations"])
            .expect("writing to memory");
        for entry in &self.entries {
            let intervals = entry
                .mapping
                .intervals
                .iter()
                .map(|iv| format!("{}-{}", iv.first, iv.last))
                .collect::<Vec<_>>()
                .join(";");
            let allocations = entry
                .mapping
                .intervals
                .iter()
                .map(|iv| {
                    iv.procs
                        .iter()
                        .map(|&u| platform.processors()[u].id.clone())
                        .collect::<Vec<_>>()
                        .join("+")
                })
                .collect::<Vec<_>>()
                .join(";");
            writer
                .write_record([
                    fmt_sig(entry.evaluation.latency),
                    fmt_sig(entry.evaluation.failure_prob),
                    entry.mapping.interval_count().to_string(),
                    intervals,
                    allocations,
                ])
                .expect("writing to memory");
        }
        String::from_utf8(writer.into_inner().expect("writing to memory"))
            .expect("csv output is utf-8")
    }
}

/// Latency model picked once per run; matches what
/// [`crate::metrics::evaluate`] would dispatch per mapping.
#[derive(Clone, Copy)]
enum LatencyModel {
    Uniform,
    PerLink,
}

impl LatencyModel {
    fn for_platform(platform: &PlatformSpec) -> LatencyModel {
        match classify_platform(platform).links {
            Uniformity::Homogeneous => LatencyModel::Uniform,
            Uniformity::Heterogeneous => LatencyModel::PerLink,
        }
    }

    fn latency(
        self,
        pipeline: &PipelineSpec,
        platform: &PlatformSpec,
        mapping: &Mapping,
    ) -> Option<f64> {
        match self {
            LatencyModel::Uniform => latency_homogeneous_links(pipeline, platform, mapping).ok(),
            LatencyModel::PerLink => latency_heterogeneous(pipeline, platform, mapping).ok(),
        }
    }
}

/// Front entry during construction; `ordinal` is the candidate's global
/// position in canonical enumeration order and breaks exact ties.
#[derive(Debug, Clone)]
struct FrontEntry {
    latency: f64,
    failure_prob: f64,
    ordinal: u64,
    mapping: Mapping,
}

/// Inserts into a local front kept sorted by strictly ascending latency /
/// strictly descending failure probability. Candidates arrive in ascending
/// ordinal, so on exact (latency, fp) duplicates the incumbent is the
/// earlier one and wins.
fn front_insert(
    front: &mut Vec<FrontEntry>,
    latency: f64,
    failure_prob: f64,
    ordinal: u64,
    mapping: impl FnOnce() -> Mapping,
) {
    let pos = front.partition_point(|e| e.latency < latency);
    if pos > 0 && front[pos - 1].failure_prob <= failure_prob {
        return; // dominated by a strictly faster entry
    }
    if pos < front.len() && front[pos].latency == latency && front[pos].failure_prob <= failure_prob
    {
        return; // dominated or duplicated at equal latency
    }
    let mut end = pos;
    while end < front.len() && front[end].failure_prob >= failure_prob {
        end += 1;
    }
    front.splice(
        pos..end,
        [FrontEntry {
            latency,
            failure_prob,
            ordinal,
            mapping: mapping(),
        }],
    );
}

/// Enumerates one stage partition and returns its local Pareto front.
fn mask_front(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    model: LatencyModel,
    boundaries: &[(usize, usize)],
    start_ordinal: u64,
) -> Vec<FrontEntry> {
    let mut front = Vec::new();
    let Some(mut odometer) = AllocOdometer::first(boundaries.len(), platform.processor_count())
    else {
        return front;
    };
    let mut scratch = Mapping {
        intervals: boundaries
            .iter()
            .map(|&(first, last)| Interval {
                first,
                last,
                procs: Vec::new(),
            })
            .collect(),
    };
    let mut ordinal = start_ordinal;
    loop {
        odometer.write_into(&mut scratch);
        // Mappings needing unusable links evaluate to an error and are
        // simply not candidates.
        if let Some(latency) = model.latency(pipeline, platform, &scratch) {
            let fp = failure_probability(&scratch, platform);
            front_insert(&mut front, latency, fp, ordinal, || scratch.clone());
        }
        ordinal += 1;
        if !odometer.advance() {
            return front;
        }
    }
}

/// Canonical merge of per-partition fronts: sort every surviving entry by
/// (latency, failure probability, ordinal) and sweep, keeping entries whose
/// failure probability strictly improves. Independent of the order the
/// local fronts were produced in, so parallel and sequential runs agree
/// bit-for-bit.
fn merge_fronts(locals: Vec<Vec<FrontEntry>>) -> Vec<ParetoEntry> {
    let mut entries: Vec<FrontEntry> = locals.into_iter().flatten().collect();
    entries.sort_by(|a, b| {
        a.latency
            .total_cmp(&b.latency)
            .then(a.failure_prob.total_cmp(&b.failure_prob))
            .then(a.ordinal.cmp(&b.ordinal))
    });
    let mut best_fp = f64::INFINITY;
    let mut out = Vec::new();
    for entry in entries {
        if entry.failure_prob < best_fp {
            best_fp = entry.failure_prob;
            out.push(ParetoEntry {
                mapping: entry.mapping,
                evaluation: Evaluation {
                    latency: entry.latency,
                    failure_prob: entry.failure_prob,
                },
            });
        }
    }
    out
}

struct MaskJob {
    boundaries: Vec<(usize, usize)>,
    start_ordinal: u64,
}

fn mask_jobs(n: usize, m: usize, p_cap: usize) -> Vec<MaskJob> {
    let mut jobs = Vec::new();
    let mut ordinal: u64 = 0;
    for mask in 0..1u64 << (n - 1) {
        let boundaries = boundaries_from_mask(mask, n);
        let p = boundaries.len();
        if p > p_cap {
            continue;
        }
        let count = disjoint_assignments(p, m).expect("within checked limits") as u64;
        jobs.push(MaskJob {
            boundaries,
            start_ordinal: ordinal,
        });
        ordinal += count;
    }
    jobs
}

fn pareto_front_impl(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    limits: &EnumLimits,
    parallel: bool,
) -> Result<ParetoFront, OracleError> {
    let (n, m, p_cap) = check_limits(pipeline, platform, limits)?;
    let model = LatencyModel::for_platform(platform);
    let jobs = mask_jobs(n, m, p_cap);
    let run = |job: &MaskJob| mask_front(pipeline, platform, model, &job.boundaries, job.start_ordinal);

    #[cfg(feature = "parallel")]
    let locals: Vec<Vec<FrontEntry>> = if parallel {
        jobs.par_iter().map(run).collect()
    } else {
        jobs.iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let locals: Vec<Vec<FrontEntry>> = {
        let _ = parallel;
        jobs.iter().map(run).collect()
    };

    Ok(ParetoFront {
        entries: merge_fronts(locals),
    })
}

/// The exact Pareto front over every interval mapping (parallel over stage
/// partitions when the `parallel` feature is on).
pub fn pareto_front(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    limits: &EnumLimits,
) -> Result<ParetoFront, OracleError> {
    pareto_front_impl(pipeline, platform, limits, true)
}

/// Sequential variant of [`pareto_front`]; always available and
/// bit-identical to the parallel one.
pub fn pareto_front_seq(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    limits: &EnumLimits,
) -> Result<ParetoFront, OracleError> {
    pareto_front_impl(pipeline, platform, limits, false)
}

/// Exhaustively minimal failure probability among interval mappings with
/// latency within the bound (1e-9 relative slack).
pub fn min_fp_under_latency(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    max_latency: f64,
    limits: &EnumLimits,
) -> Result<(Mapping, Evaluation), OracleError> {
    let front = pareto_front(pipeline, platform, limits)?;
    // Latency ascends and failure probability descends along the front, so
    // the last feasible entry has the smallest failure probability.
    front
        .entries()
        .iter()
        .rev()
        .find(|e| within_threshold(e.evaluation.latency, max_latency))
        .map(|e| (e.mapping.clone(), e.evaluation))
        .ok_or_else(|| {
            OracleError::Infeasible(format!(
                "no interval mapping reaches latency <= {}",
                fmt_sig(max_latency)
            ))
        })
}

/// Exhaustively minimal latency among interval mappings with failure
/// probability within the bound (1e-9 relative slack).
pub fn min_latency_under_fp(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    max_failure_prob: f64,
    limits: &EnumLimits,
) -> Result<(Mapping, Evaluation), OracleError> {
    let front = pareto_front(pipeline, platform, limits)?;
    front
        .entries()
        .iter()
        .find(|e| within_threshold(e.evaluation.failure_prob, max_failure_prob))
        .map(|e| (e.mapping.clone(), e.evaluation))
        .ok_or_else(|| {
            OracleError::Infeasible(format!(
                "no interval mapping reaches failure probability <= {}",
                fmt_sig(max_failure_prob)
            ))
        })
}

/// Exhaustively latency-minimal one-to-one mapping: every stage on its own
/// interval and its own processor (injective). Latency always uses the
/// per-link model — the assignment is about exploiting individual links, so
/// absent links rule candidates out on any platform. Ties keep the first
/// assignment in lexicographic (stage-major, processor-ascending) order.
pub fn min_latency_one_to_one(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    limits: &EnumLimits,
) -> Result<(Mapping, Evaluation), OracleError> {
    let (n, m) = check_sizes(pipeline, platform, limits)?;
    if n > m {
        return Err(OracleError::Infeasible(format!(
            "one-to-one mapping needs {n} distinct processors, platform has {m}"
        )));
    }
    let mut count: u128 = 1;
    for i in 0..n {
        count = count.saturating_mul((m - i) as u128);
    }
    if count > limits.max_candidates as u128 {
        return Err(OracleError::TooManyCandidates {
            estimate: count.to_string(),
            limit: limits.max_candidates,
        });
    }

    let mut scratch = Mapping {
        intervals: (1..=n)
            .map(|k| Interval {
                first: k,
                last: k,
                procs: vec![0],
            })
            .collect(),
    };
    let mut best: Option<(f64, Mapping)> = None;
    let mut assignment = vec![usize::MAX; n];
    let mut used = vec![false; m];
    // Depth-first over injective assignments, processors ascending at each
    // stage: lexicographic order, so strict improvement keeps the earliest
    // optimum.
    let mut stage = 0;
    loop {
        let next = (assignment[stage].wrapping_add(1)..m).find(|&u| !used[u]);
        match next {
            Some(u) => {
                if assignment[stage] != usize::MAX {
                    used[assignment[stage]] = false;
                }
                assignment[stage] = u;
                used[u] = true;
                if stage + 1 < n {
                    stage += 1;
                    assignment[stage] = usize::MAX;
                    continue;
                }
                for (iv, &proc) in scratch.intervals.iter_mut().zip(&assignment) {
                    iv.procs[0] = proc;
                }
                if let Ok(latency) = latency_heterogeneous(pipeline, platform, &scratch) {
                    if best.as_ref().is_none_or(|(b, _)| latency < *b) {
                        best = Some((latency, scratch.clone()));
                    }
                }
            }
            None => {
                if assignment[stage] != usize::MAX {
                    used[assignment[stage]] = false;
                }
                if stage == 0 {
                    break;
                }
                stage -= 1;
            }
        }
    }

    let (latency, mapping) = best.ok_or_else(|| {
        OracleError::Infeasible("no one-to-one assignment has all links usable".to_string())
    })?;
    let failure_prob = failure_probability(&mapping, platform);
    Ok((
        mapping,
        Evaluation {
            latency,
            failure_prob,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::evaluate;
    use crate::model::{LinkEnd, Processor};

    fn proc(id: &str, speed: f64, failure_prob: f64) -> Processor {
        Processor {
            id: id.to_string(),
            speed,
            failure_prob,
        }
    }

    fn small_instance(n: usize, m: usize) -> (PipelineSpec, PlatformSpec) {
        let pipeline = PipelineSpec::new(vec![1.0; n], vec![1.0; n + 1]).unwrap();
        let procs = (0..m)
            .map(|i| proc(&format!("p{i}"), 1.0 + i as f64, 0.5 / (i + 1) as f64))
            .collect();
        let platform = PlatformSpec::with_uniform_bandwidth(procs, 2.0).unwrap();
        (pipeline, platform)
    }

    #[test]
    fn counts_tiny_cases() {
        assert_eq!(candidate_count(1, 1, None), Some(1));
        assert_eq!(candidate_count(1, 2, None), Some(3));
        assert_eq!(candidate_count(2, 2, None), Some(5));
        assert_eq!(candidate_count(3, 1, None), Some(1));
        // Interval cap: 2 stages, 2 processors, single interval only.
        assert_eq!(candidate_count(2, 2, Some(1)), Some(3));
    }

    #[test]
    fn enumerator_matches_closed_form_count() {
        for n in 1..=4 {
            for m in 1..=4 {
                for cap in [None, Some(1), Some(2)] {
                    let (pipeline, platform) = small_instance(n, m);
                    let limits = EnumLimits {
                        max_intervals: cap,
                        ..EnumLimits::default()
                    };
                    let listed =
                        enumerate_interval_mappings(&pipeline, &platform, &limits)
                            .unwrap()
                            .count() as u128;
                    assert_eq!(
                        Some(listed),
                        candidate_count(n, m, cap),
                        "n={n} m={m} cap={cap:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn enumerator_order_for_two_by_two() {
        let (pipeline, platform) = small_instance(2, 2);
        let all: Vec<Vec<Vec<usize>>> =
            enumerate_interval_mappings(&pipeline, &platform, &EnumLimits::default())
                .unwrap()
                .map(|mp| mp.intervals.iter().map(|iv| iv.procs.clone()).collect())
                .collect();
        // Single interval first (subsets {p0}, {p1}, {p0,p1}), then the cut
        // partition with both orders of the two singletons.
        assert_eq!(
            all,
            vec![
                vec![vec![0]],
                vec![vec![1]],
                vec![vec![0, 1]],
                vec![vec![0], vec![1]],
                vec![vec![1], vec![0]],
            ]
        );
    }

    #[test]
    fn enumerated_mappings_validate() {
        let (pipeline, platform) = small_instance(3, 3);
        for mapping in
            enumerate_interval_mappings(&pipeline, &platform, &EnumLimits::default()).unwrap()
        {
            crate::model::validate_mapping(&pipeline, &platform, &mapping).unwrap();
        }
    }

    #[test]
    fn limits_are_enforced() {
        let (pipeline, platform) = small_instance(5, 3);
        let err = enumerate_interval_mappings(
            &pipeline,
            &platform,
            &EnumLimits {
                max_stages: 4,
                ..EnumLimits::default()
            },
        )
        .unwrap_err();
        assert_eq!(
            err,
            OracleError::TooLarge {
                what: "stage count",
                value: 5,
                limit: 4
            }
        );

        let err = enumerate_interval_mappings(
            &pipeline,
            &platform,
            &EnumLimits {
                max_candidates: 10,
                ..EnumLimits::default()
            },
        )
        .unwrap_err();
        match err {
            OracleError::TooManyCandidates { estimate, limit } => {
                assert_eq!(limit, 10);
                assert_eq!(estimate, candidate_count(5, 3, None).unwrap().to_string());
            }
            other => panic!("expected TooManyCandidates, got {other:?}"),
        }
    }

    #[test]
    fn front_is_strictly_monotone_and_reevaluates() {
        let (pipeline, platform) = small_instance(3, 3);
        let front = pareto_front(&pipeline, &platform, &EnumLimits::default()).unwrap();
        assert!(!front.is_empty());
        for pair in front.entries().windows(2) {
            assert!(pair[0].evaluation.latency < pair[1].evaluation.latency);
            assert!(pair[0].evaluation.failure_prob > pair[1].evaluation.failure_prob);
        }
        for entry in front.entries() {
            let again = evaluate(&pipeline, &platform, &entry.mapping).unwrap();
            assert_eq!(entry.evaluation, again);
        }
    }

    #[test]
    fn front_on_uniform_platform_is_single_interval_sweep() {
        // Fully homogeneous: the optimal mappings are single-interval, one
        // per replica count.
        let pipeline = PipelineSpec::new(vec![1.0, 1.0], vec![2.0, 1.0, 1.0]).unwrap();
        let procs = (0..4).map(|i| proc(&format!("p{i}"), 1.0, 0.5)).collect();
        let platform = PlatformSpec::with_uniform_bandwidth(procs, 1.0).unwrap();
        let front = pareto_front(&pipeline, &platform, &EnumLimits::default()).unwrap();
        assert_eq!(front.len(), 4);
        for (k, entry) in front.entries().iter().enumerate() {
            assert_eq!(entry.mapping.interval_count(), 1);
            assert_eq!(entry.mapping.intervals[0].procs.len(), k + 1);
        }
    }

    #[test]
    fn bounded_queries_walk_the_front() {
        let (pipeline, platform) = small_instance(3, 3);
        let front = pareto_front(&pipeline, &platform, &EnumLimits::default()).unwrap();
        let first = &front.entries()[0];
        let last = &front.entries()[front.len() - 1];

        let (_, eval) =
            min_latency_under_fp(&pipeline, &platform, 1.0, &EnumLimits::default()).unwrap();
        assert_eq!(eval, first.evaluation);

        let (_, eval) =
            min_fp_under_latency(&pipeline, &platform, f64::INFINITY, &EnumLimits::default())
                .unwrap();
        assert_eq!(eval, last.evaluation);

        let too_tight = first.evaluation.latency * 0.5;
        assert!(matches!(
            min_fp_under_latency(&pipeline, &platform, too_tight, &EnumLimits::default()),
            Err(OracleError::Infeasible(_))
        ));
        assert!(matches!(
            min_latency_under_fp(&pipeline, &platform, -1.0, &EnumLimits::default()),
            Err(OracleError::Infeasible(_))
        ));
    }

    #[test]
    fn parallel_and_sequential_fronts_are_identical() {
        let (pipeline, platform) = small_instance(4, 4);
        let par = pareto_front(&pipeline, &platform, &EnumLimits::default()).unwrap();
        let seq = pareto_front_seq(&pipeline, &platform, &EnumLimits::default()).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn csv_export_shape() {
        let (pipeline, platform) = small_instance(2, 2);
        let front = pareto_front(&pipeline, &platform, &EnumLimits::default()).unwrap();
        let csv = front.to_csv(&platform);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next(),
            Some("latency,failure_prob,p,intervals,allocations")
        );
        assert_eq!(lines.count(), front.len());
        // Multi-processor allocations join with '+', intervals with ';'.
        assert!(csv.contains("p0+p1") || csv.contains("1-1;2-2"));
    }

    #[test]
    fn one_to_one_prefers_good_links() {
        let pipeline = PipelineSpec::new(vec![2.0, 2.0], vec![100.0, 100.0, 100.0]).unwrap();
        let platform = PlatformSpec::new(
            vec![proc("a", 1.0, 0.1), proc("b", 1.0, 0.1)],
            vec![
                (LinkEnd::In, LinkEnd::Proc(0), 100.0),
                (LinkEnd::In, LinkEnd::Proc(1), 1.0),
                (LinkEnd::Proc(0), LinkEnd::Proc(1), 100.0),
                (LinkEnd::Proc(1), LinkEnd::Proc(0), 100.0),
                (LinkEnd::Proc(0), LinkEnd::Out, 1.0),
                (LinkEnd::Proc(1), LinkEnd::Out, 100.0),
            ],
        )
        .unwrap();
        let (mapping, eval) =
            min_latency_one_to_one(&pipeline, &platform, &EnumLimits::default()).unwrap();
        assert_eq!(eval.latency, 7.0);
        let procs: Vec<usize> = mapping.intervals.iter().map(|iv| iv.procs[0]).collect();
        assert_eq!(procs, vec![0, 1]);
    }

    #[test]
    fn one_to_one_needs_enough_processors() {
        let (pipeline, platform) = small_instance(3, 2);
        assert!(matches!(
            min_latency_one_to_one(&pipeline, &platform, &EnumLimits::default()),
            Err(OracleError::Infeasible(_))
        ));
    }

    #[test]
    fn one_to_one_single_stage() {
        let (pipeline, platform) = small_instance(1, 3);
        let (mapping, eval) =
            min_latency_one_to_one(&pipeline, &platform, &EnumLimits::default()).unwrap();
        assert_eq!(mapping.intervals.len(), 1);
        // Fastest processor wins: p2 at speed 3; 1/2 + 1/3 + 1/2.
        assert_eq!(mapping.intervals[0].procs, vec![2]);
        assert!((eval.latency - (0.5 + 1.0 / 3.0 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn one_to_one_skips_unusable_chains() {
        // Only the chain in -> a -> b -> out is complete.
        let pipeline = PipelineSpec::new(vec![1.0, 1.0], vec![1.0, 1.0, 1.0]).unwrap();
        let platform = PlatformSpec::new(
            vec![proc("a", 1.0, 0.1), proc("b", 1.0, 0.1)],
            vec![
                (LinkEnd::In, LinkEnd::Proc(0), 1.0),
                (LinkEnd::Proc(0), LinkEnd::Proc(1), 1.0),
                (LinkEnd::Proc(1), LinkEnd::Out, 1.0),
            ],
        )
        .unwrap();
        let (mapping, _) =
            min_latency_one_to_one(&pipeline, &platform, &EnumLimits::default()).unwrap();
        let procs: Vec<usize> = mapping.intervals.iter().map(|iv| iv.procs[0]).collect();
        assert_eq!(procs, vec![0, 1]);
    }
}
