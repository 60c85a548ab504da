//! Scenario files: a JSON description of a pipeline, a platform, and
//! optionally a mapping and optimization thresholds.
//!
//! ```json
//! {
//!   "pipeline": { "w": [1, 100], "delta": [10, 1, 0] },
//!   "platform": {
//!     "processors": [
//!       { "id": "slow", "speed": 1, "failure_prob": 0.1 },
//!       { "id": "fast", "speed": 100, "failure_prob": 0.8 }
//!     ],
//!     "bandwidth": 1
//!   },
//!   "mapping": { "intervals": [ { "from": 1, "to": 2, "procs": ["slow"] } ] },
//!   "thresholds": { "max_latency": 22 }
//! }
//! ```
//!
//! `bandwidth` is either a single number — every link, gateway links
//! included, gets that bandwidth — or a map from `"A->B"` keys to numbers,
//! where each endpoint is `in`, `out`, or a processor id and missing pairs
//! are unusable links. Mappings reference processors by id; stage ranges
//! are 1-based inclusive. An embedded mapping must validate against the
//! pipeline and platform.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate_mapping, Interval, LinkEnd, Mapping, MappingViolation, ModelError, PipelineSpec,
    PlatformSpec, Processor,
};

/// A parsed, validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub pipeline: PipelineSpec,
    pub platform: PlatformSpec,
    pub mapping: Option<Mapping>,
    pub thresholds: Thresholds,
}

/// Optional optimization bounds carried by the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Thresholds {
    pub max_latency: Option<f64>,
    pub max_failure_prob: Option<f64>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid mapping: {0}")]
    Mapping(#[from] MappingViolation),
    #[error("bad link key {key:?}: expected \"A->B\" with endpoints \"in\", \"out\", or a processor id")]
    BadLinkKey { key: String },
    #[error("unknown processor {name:?} in {place}")]
    UnknownProcessor { name: String, place: &'static str },
    #[error("threshold {name} must be {requirement}, got {value}")]
    BadThreshold {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    pipeline: RawPipeline,
    platform: RawPlatform,
    #[serde(skip_serializing_if = "Option::is_none")]
    mapping: Option<RawMapping>,
    #[serde(skip_serializing_if = "Option::is_none")]
    thresholds: Option<RawThresholds>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawPipeline {
    w: Vec<f64>,
    delta: Vec<f64>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawPlatform {
    processors: Vec<RawProcessor>,
    bandwidth: RawBandwidth,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawProcessor {
    id: String,
    speed: f64,
    failure_prob: f64,
}

#[derive(Deserialize, Serialize)]
#[serde(untagged)]
enum RawBandwidth {
    Uniform(f64),
    Links(BTreeMap<String, f64>),
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawMapping {
    intervals: Vec<RawInterval>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawInterval {
    from: usize,
    to: usize,
    procs: Vec<String>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawThresholds {
    #[serde(skip_serializing_if = "Option::is_none")]
    max_latency: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_failure_prob: Option<f64>,
}

fn resolve_end(token: &str, platform_procs: &[RawProcessor]) -> Result<LinkEnd, ScenarioError> {
    match token {
        "in" => Ok(LinkEnd::In),
        "out" => Ok(LinkEnd::Out),
        id => platform_procs
            .iter()
            .position(|p| p.id == id)
            .map(LinkEnd::Proc)
            .ok_or_else(|| ScenarioError::UnknownProcessor {
                name: id.to_string(),
                place: "bandwidth map",
            }),
    }
}

/// Parses and validates a scenario from JSON text.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = serde_json::from_str(text)?;
    let pipeline = PipelineSpec::new(raw.pipeline.w, raw.pipeline.delta)?;

    let processors: Vec<Processor> = raw
        .platform
        .processors
        .iter()
        .map(|p| Processor {
            id: p.id.clone(),
            speed: p.speed,
            failure_prob: p.failure_prob,
        })
        .collect();
    let platform = match &raw.platform.bandwidth {
        RawBandwidth::Uniform(b) => PlatformSpec::with_uniform_bandwidth(processors, *b)?,
        RawBandwidth::Links(map) => {
            let mut links = Vec::with_capacity(map.len());
            for (key, &bw) in map {
                let (from, to) = key
                    .split_once("->")
                    .ok_or_else(|| ScenarioError::BadLinkKey { key: key.clone() })?;
                let from = resolve_end(from.trim(), &raw.platform.processors)?;
                let to = resolve_end(to.trim(), &raw.platform.processors)?;
                links.push((from, to, bw));
            }
            PlatformSpec::new(processors, links)?
        }
    };

    let mapping = raw
        .mapping
        .map(|raw_mapping| -> Result<Mapping, ScenarioError> {
            let intervals = raw_mapping
                .intervals
                .into_iter()
                .map(|iv| -> Result<Interval, ScenarioError> {
                    let procs = iv
                        .procs
                        .iter()
                        .map(|name| {
                            platform
                                .processors()
                                .iter()
                                .position(|p| &p.id == name)
                                .ok_or_else(|| ScenarioError::UnknownProcessor {
                                    name: name.clone(),
                                    place: "mapping",
                                })
                        })
                        .collect::<Result<Vec<usize>, _>>()?;
                    Ok(Interval {
                        first: iv.from,
                        last: iv.to,
                        procs,
                    })
                })
                .collect::<Result<Vec<Interval>, _>>()?;
            let mapping = Mapping { intervals };
            validate_mapping(&pipeline, &platform, &mapping)?;
            Ok(mapping)
        })
        .transpose()?;

    let thresholds = match raw.thresholds {
        None => Thresholds::default(),
        Some(t) => {
            if let Some(v) = t.max_latency {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(ScenarioError::BadThreshold {
                        name: "max_latency",
                        requirement: "finite and non-negative",
                        value: v,
                    });
                }
            }
            if let Some(v) = t.max_failure_prob {
                if !(0.0..=1.0).contains(&v) {
                    return Err(ScenarioError::BadThreshold {
                        name: "max_failure_prob",
                        requirement: "within [0, 1]",
                        value: v,
                    });
                }
            }
            Thresholds {
                max_latency: t.max_latency,
                max_failure_prob: t.max_failure_prob,
            }
        }
    };

    Ok(Scenario {
        pipeline,
        platform,
        mapping,
        thresholds,
    })
}

/// Serializes a scenario back to pretty JSON. Bandwidths are always written
/// in map form (sorted keys), so `parse(serialize(s))` reproduces `s`.
pub fn serialize_scenario(scenario: &Scenario) -> String {
    let platform = &scenario.platform;
    let mut bandwidth = BTreeMap::new();
    for (from, to, bw) in platform.links() {
        bandwidth.insert(
            format!("{}->{}", platform.end_name(from), platform.end_name(to)),
            bw,
        );
    }
    let raw = RawScenario {
        pipeline: RawPipeline {
            w: scenario.pipeline.weights().to_vec(),
            delta: scenario.pipeline.volumes().to_vec(),
        },
        platform: RawPlatform {
            processors: platform
                .processors()
                .iter()
                .map(|p| RawProcessor {
                    id: p.id.clone(),
                    speed: p.speed,
                    failure_prob: p.failure_prob,
                })
                .collect(),
            bandwidth: RawBandwidth::Links(bandwidth),
        },
        mapping: scenario.mapping.as_ref().map(|mapping| RawMapping {
            intervals: mapping
                .intervals
                .iter()
                .map(|iv| RawInterval {
                    from: iv.first,
                    to: iv.last,
                    procs: iv
                        .procs
                        .iter()
                        .map(|&u| platform.processors()[u].id.clone())
                        .collect(),
                })
                .collect(),
        }),
        thresholds: if scenario.thresholds == Thresholds::default() {
            None
        } else {
            Some(RawThresholds {
                max_latency: scenario.thresholds.max_latency,
                max_failure_prob: scenario.thresholds.max_failure_prob,
            })
        },
    };
    serde_json::to_string_pretty(&raw).expect("scenario serializes")
}
