//! Optimal latency over *general* (unrestricted) replication-free mappings.
//!
//! When each stage may go to any processor — consecutive stages may share
//! one, and a processor may host non-consecutive stages — the latency-
//! optimal assignment is a shortest path in a layered graph: layer `i` holds
//! one vertex per processor meaning "stage `i` runs here", plus a source
//! (input gateway) and a sink (output gateway). Edge weights charge the
//! tail's compute time and the inter-stage transfer, with transfers between
//! a processor and itself free.
//!
//! The graph is acyclic with `n*m + 2` vertices and at most
//! `(n-1)*m^2 + 2*m` edges; relaxing layer by layer gives the optimum in
//! `O(n*m^2)` time. Absent links simply contribute no edge.

use crate::model::{LinkEnd, PipelineSpec, PlatformSpec};
use crate::report::fmt_sig;
use crate::solvers::SolveError;

/// Layered shortest-path graph for a pipeline/platform pair.
///
/// `source[v]` is the weight of the edge source -> (stage 1 on `v`);
/// `interior[i][u][v]` the edge (stage `i+1` on `u`) -> (stage `i+2` on `v`)
/// (0-based `i`, so `interior` has `n-1` layers); `sink[u]` the edge
/// (stage `n` on `u`) -> sink. `None` = the required link is unusable.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredGraph {
    stage_count: usize,
    processor_count: usize,
    source: Vec<Option<f64>>,
    interior: Vec<Vec<Vec<Option<f64>>>>,
    sink: Vec<Option<f64>>,
}

impl LayeredGraph {
    /// Vertices: one per (stage, processor) pair plus source and sink.
    pub fn vertex_count(&self) -> usize {
        self.stage_count * self.processor_count + 2
    }

    /// Defined edges (absent links excluded).
    pub fn edge_count(&self) -> usize {
        let interior: usize = self
            .interior
            .iter()
            .flatten()
            .map(|row| row.iter().flatten().count())
            .sum();
        self.source.iter().flatten().count() + interior + self.sink.iter().flatten().count()
    }

    pub fn source_edge(&self, v: usize) -> Option<f64> {
        self.source[v]
    }

    /// Edge weight from stage `i` on `u` to stage `i+1` on `v` (1-based `i`).
    pub fn interior_edge(&self, i: usize, u: usize, v: usize) -> Option<f64> {
        self.interior[i - 1][u][v]
    }

    pub fn sink_edge(&self, u: usize) -> Option<f64> {
        self.sink[u]
    }

    /// Line-oriented debug dump: one edge per line as
    /// `layer <tab> from <tab> to <tab> weight`, layer 0 carrying the
    /// source edges and layer `n` the sink edges. Ordered by layer, then
    /// tail, then head, so output is reproducible.
    pub fn dump(&self, platform: &PlatformSpec) -> String {
        let mut out = String::new();
        let name = |u: usize| platform.processors()[u].id.as_str();
        for (v, w) in self.source.iter().enumerate() {
            if let Some(w) = w {
                out.push_str(&format!("0\tin\t{}\t{}\n", name(v), fmt_sig(*w)));
            }
        }
        for (layer, rows) in self.interior.iter().enumerate() {
            for (u, row) in rows.iter().enumerate() {
                for (v, w) in row.iter().enumerate() {
                    if let Some(w) = w {
                        out.push_str(&format!(
                            "{}\t{}\t{}\t{}\n",
                            layer + 1,
                            name(u),
                            name(v),
                            fmt_sig(*w)
                        ));
                    }
                }
            }
        }
        for (u, w) in self.sink.iter().enumerate() {
            if let Some(w) = w {
                out.push_str(&format!(
                    "{}\t{}\tout\t{}\n",
                    self.stage_count,
                    name(u),
                    fmt_sig(*w)
                ));
            }
        }
        out
    }
}

/// Builds the layered graph. Weights:
/// - source -> (1, v): `delta[0] / b(in, v)`;
/// - (i, u) -> (i+1, v): `w[i] / s(u)` plus `delta[i] / b(u, v)` when
///   `u != v` (staying on the same processor transfers for free);
/// - (n, u) -> sink: `w[n] / s(u) + delta[n] / b(u, out)`.
pub fn build_layered_graph(pipeline: &PipelineSpec, platform: &PlatformSpec) -> LayeredGraph {
    let n = pipeline.stage_count();
    let m = platform.processor_count();
    let delta = pipeline.volumes();
    let w = pipeline.weights();
    let speed = |u: usize| platform.processors()[u].speed;

    let source = (0..m)
        .map(|v| platform.link(LinkEnd::In, LinkEnd::Proc(v)).map(|b| delta[0] / b))
        .collect();
    let interior = (0..n.saturating_sub(1))
        .map(|i| {
            (0..m)
                .map(|u| {
                    (0..m)
                        .map(|v| {
                            if u == v {
                                Some(w[i] / speed(u))
                            } else {
                                platform
                                    .link(LinkEnd::Proc(u), LinkEnd::Proc(v))
                                    .map(|b| w[i] / speed(u) + delta[i + 1] / b)
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let sink = (0..m)
        .map(|u| {
            platform
                .link(LinkEnd::Proc(u), LinkEnd::Out)
                .map(|b| w[n - 1] / speed(u) + delta[n] / b)
        })
        .collect();

    LayeredGraph {
        stage_count: n,
        processor_count: m,
        source,
        interior,
        sink,
    }
}

/// A general (per-stage) assignment and its latency.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralMapping {
    /// `stage_processor[k]` hosts stage `k+1`.
    pub stage_processor: Vec<usize>,
    pub latency: f64,
}

/// Latency of a given per-stage assignment, recomputed edge by edge along
/// its path (source edge, interior edges, sink edge, summed left to right).
/// Errors as [`SolveError::Infeasible`] naming the first unusable link.
pub fn general_mapping_latency(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
    stage_processor: &[usize],
) -> Result<f64, SolveError> {
    assert_eq!(
        stage_processor.len(),
        pipeline.stage_count(),
        "one processor per stage"
    );
    let graph = build_layered_graph(pipeline, platform);
    let missing = |from: String, to: String| {
        SolveError::Infeasible(format!("assignment needs unusable link {from} -> {to}"))
    };
    let mut t = graph.source_edge(stage_processor[0]).ok_or_else(|| {
        missing("in".into(), platform.processors()[stage_processor[0]].id.clone())
    })?;
    for (i, pair) in stage_processor.windows(2).enumerate() {
        t += graph.interior_edge(i + 1, pair[0], pair[1]).ok_or_else(|| {
            missing(
                platform.processors()[pair[0]].id.clone(),
                platform.processors()[pair[1]].id.clone(),
            )
        })?;
    }
    let last = *stage_processor.last().expect("n >= 1");
    t += graph
        .sink_edge(last)
        .ok_or_else(|| missing(platform.processors()[last].id.clone(), "out".into()))?;
    Ok(t)
}

/// Minimum-latency general mapping by forward relaxation over the layered
/// graph, processing layers in order and processors in ascending index, so
/// equal-cost ties resolve to the smallest processor index at every layer.
pub fn min_latency_general(
    pipeline: &PipelineSpec,
    platform: &PlatformSpec,
) -> Result<GeneralMapping, SolveError> {
    let n = pipeline.stage_count();
    let m = platform.processor_count();
    let graph = build_layered_graph(pipeline, platform);

    let mut dist: Vec<f64> = (0..m)
        .map(|v| graph.source_edge(v).unwrap_or(f64::INFINITY))
        .collect();
    // parents[i][v] = processor of stage i+1 on the best path reaching
    // stage i+2 on v.
    let mut parents: Vec<Vec<usize>> = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let mut next = vec![f64::INFINITY; m];
        let mut parent = vec![usize::MAX; m];
        for (u, &du) in dist.iter().enumerate() {
            if du.is_finite() {
                for v in 0..m {
                    if let Some(wuv) = graph.interior_edge(i, u, v) {
                        let cand = du + wuv;
                        if cand < next[v] {
                            next[v] = cand;
                            parent[v] = u;
                        }
                    }
                }
            }
        }
        parents.push(parent);
        dist = next;
    }

    let mut best: Option<(f64, usize)> = None;
    for (u, &du) in dist.iter().enumerate() {
        if let (true, Some(wu)) = (du.is_finite(), graph.sink_edge(u)) {
            let total = du + wu;
            if best.is_none_or(|(b, _)| total < b) {
                best = Some((total, u));
            }
        }
    }
    let (latency, mut last) = best.ok_or_else(|| {
        SolveError::Infeasible(
            "no usable chain of links reaches the output gateway".to_string(),
        )
    })?;

    let mut stage_processor = vec![0; n];
    stage_processor[n - 1] = last;
    for i in (1..n).rev() {
        last = parents[i - 1][last];
        stage_processor[i - 1] = last;
    }
    Ok(GeneralMapping {
        stage_processor,
        latency,
    })
}
