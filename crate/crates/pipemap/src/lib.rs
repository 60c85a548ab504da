//! Mapping linear pipeline workflows onto failure-prone processor platforms.
//!
//! A pipeline of `n` stages is cut into consecutive intervals, and every
//! interval is replicated onto a set of processors; each replica receives the
//! interval's input and computes independently, so the interval survives as
//! long as one replica does. This crate evaluates such mappings (worst-case
//! latency + global failure probability), optimizes one criterion under a
//! bound on the other with polynomial algorithms on the platform classes
//! where that is possible, finds the exact Pareto front by bounded exhaustive
//! enumeration, computes the optimal latency of unrestricted (non-interval)
//! mappings via a layered-graph shortest path, and cross-checks failure
//! probabilities with a Monte Carlo simulator.
//!
//! All operations are pure functions over immutable inputs; with the
//! `parallel` feature (on by default) the heavy loops run on rayon but return
//! bit-identical results to the always-available `*_seq` fallbacks.

pub mod cli;
pub mod general;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod report;
pub mod scenario;
pub mod sim;
pub mod solvers;

/// Relative tolerance for every threshold feasibility comparison in the
/// solvers, the oracle, and the CLI.
pub const THRESHOLD_REL_TOL: f64 = 1e-9;

/// Feasibility test `value <= limit` up to [`THRESHOLD_REL_TOL`] relative
/// slack. Works for `limit == 0` (degenerates to `value <= 0`) and for
/// infinite limits.
pub fn within_threshold(value: f64, limit: f64) -> bool {
    value <= limit + THRESHOLD_REL_TOL * limit.abs()
}
