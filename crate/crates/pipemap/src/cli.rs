//! Command-line interface.
//!
//! Every subcommand loads a scenario file (see [`crate::scenario`]) and
//! prints a line-oriented report; all numbers go through the stable
//! 12-significant-digit formatter, so identical invocations produce
//! byte-identical output.
//!
//! Exit codes: `0` success, `1` usage or I/O problem, `2` the requested
//! bound is infeasible, `3` the scenario or mapping fails validation,
//! `4` the instance exceeds the exhaustive-enumeration limits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::general::{build_layered_graph, min_latency_general};
use crate::metrics::{evaluate, failure_probability, EvalError};
use crate::model::{classify_platform, Mapping, PlatformClass, PlatformKind, Uniformity};
use crate::oracle::{self, EnumLimits, OracleError};
use crate::report::{fmt_sig, render_general, render_mapping};
use crate::scenario::{parse_scenario, Scenario, ScenarioError};
use crate::sim::simulate_failure_probability;
use crate::solvers::{self, SolveError};
use crate::within_threshold;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_LIMITS: i32 = 4;

#[derive(Parser)]
#[command(
    name = "pipemap",
    version,
    about = "Evaluate and optimize replicated interval mappings of linear pipelines \
             onto failure-prone processor platforms"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the scenario's mapping: latency and failure probability.
    Evaluate {
        /// Scenario JSON file (must contain a mapping).
        scenario: PathBuf,
    },
    /// Report the platform's structural classification.
    Classify { scenario: PathBuf },
    /// Optimize one criterion, optionally bounding the other.
    Solve {
        scenario: PathBuf,
        /// Criterion to minimize.
        #[arg(long, value_enum)]
        objective: Objective,
        /// Latency bound (pairs with the failure-probability objective);
        /// falls back to the scenario's thresholds.
        #[arg(long)]
        max_latency: Option<f64>,
        /// Failure-probability bound (pairs with the latency objective);
        /// falls back to the scenario's thresholds.
        #[arg(long)]
        max_fp: Option<f64>,
        /// Use exhaustive enumeration even where a polynomial solver applies.
        #[arg(long)]
        force_exact: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Exhaustive latency/failure-probability Pareto front.
    Pareto {
        scenario: PathBuf,
        /// Also write the front as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Minimum latency over general per-stage assignments (layered graph).
    GeneralLatency {
        scenario: PathBuf,
        /// Write the layered graph (one edge per line) to this path.
        #[arg(long)]
        dump_graph: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the mapping's failure probability.
    Simulate {
        /// Scenario JSON file (must contain a mapping).
        scenario: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    /// Minimize the global failure probability.
    Fp,
    /// Minimize the worst-case latency.
    Latency,
}

/// Exhaustive-enumeration limits (solve fallback and pareto).
#[derive(Args)]
struct LimitArgs {
    /// Maximum stage count for exhaustive enumeration.
    #[arg(long)]
    max_stages: Option<usize>,
    /// Maximum processor count for exhaustive enumeration.
    #[arg(long)]
    max_procs: Option<usize>,
    /// Maximum number of candidate mappings to visit.
    #[arg(long)]
    max_candidates: Option<u64>,
    /// Only consider mappings with at most this many intervals.
    #[arg(long)]
    max_intervals: Option<usize>,
}

impl LimitArgs {
    fn to_limits(&self) -> EnumLimits {
        let defaults = EnumLimits::default();
        EnumLimits {
            max_stages: self.max_stages.unwrap_or(defaults.max_stages),
            max_processors: self.max_procs.unwrap_or(defaults.max_processors),
            max_candidates: self.max_candidates.unwrap_or(defaults.max_candidates),
            max_intervals: self.max_intervals,
        }
    }
}

/// What one invocation produced: the report text and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub report: String,
}

enum CliError {
    Usage(String),
    Io { path: PathBuf, error: std::io::Error },
    Scenario(ScenarioError),
    Validation(String),
    Infeasible(String),
    Limits(OracleError),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Scenario(_) | CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Limits(_) => EXIT_LIMITS,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(message) => format!("usage error: {message}"),
            CliError::Io { path, error } => format!("io error on {}: {error}", path.display()),
            CliError::Scenario(error) => format!("invalid scenario: {error}"),
            CliError::Validation(message) => format!("validation error: {message}"),
            CliError::Infeasible(message) => format!("infeasible: {message}"),
            CliError::Limits(error) => format!("enumeration limits: {error}"),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(error: ScenarioError) -> Self {
        CliError::Scenario(error)
    }
}

impl From<SolveError> for CliError {
    fn from(error: SolveError) -> Self {
        match error {
            SolveError::Infeasible(message) => CliError::Infeasible(message),
            other @ SolveError::WrongPlatformClass { .. } => {
                CliError::Validation(other.to_string())
            }
        }
    }
}

impl From<OracleError> for CliError {
    fn from(error: OracleError) -> Self {
        match error {
            OracleError::Infeasible(message) => CliError::Infeasible(message),
            other => CliError::Limits(other),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(error: EvalError) -> Self {
        CliError::Validation(error.to_string())
    }
}

/// Parses arguments and runs the command, capturing the report instead of
/// printing. `--help`/`--version` exit 0; argument errors exit 1.
pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(error) => {
            let exit_code = if error.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return CommandOutcome {
                exit_code,
                report: ensure_newline(error.to_string()),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(report) => CommandOutcome {
            exit_code: EXIT_OK,
            report: ensure_newline(report),
        },
        Err(error) => CommandOutcome {
            exit_code: error.exit_code(),
            report: ensure_newline(error.message()),
        },
    }
}

fn ensure_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|error| CliError::Io {
        path: path.to_path_buf(),
        error,
    })?;
    Ok(parse_scenario(&text)?)
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|error| CliError::Io {
        path: path.to_path_buf(),
        error,
    })
}

fn plural(count: usize, one: &str, many: &str) -> String {
    format!("{count} {}", if count == 1 { one } else { many })
}

fn class_line(class: &PlatformClass, m: usize) -> String {
    format!(
        "platform: {}, {}, failures {}",
        plural(m, "processor", "processors"),
        class.kind(),
        class.failures
    )
}

fn header(scenario: &Scenario) -> String {
    let class = classify_platform(&scenario.platform);
    format!(
        "pipeline: {}\n{}",
        plural(scenario.pipeline.stage_count(), "stage", "stages"),
        class_line(&class, scenario.platform.processor_count())
    )
}

fn dispatch(command: Command) -> Result<String, CliError> {
    match command {
        Command::Evaluate { scenario } => cmd_evaluate(&scenario),
        Command::Classify { scenario } => cmd_classify(&scenario),
        Command::Solve {
            scenario,
            objective,
            max_latency,
            max_fp,
            force_exact,
            limits,
        } => cmd_solve(&scenario, objective, max_latency, max_fp, force_exact, &limits.to_limits()),
        Command::Pareto { scenario, csv, limits } => cmd_pareto(&scenario, csv.as_deref(), &limits.to_limits()),
        Command::GeneralLatency { scenario, dump_graph } => {
            cmd_general(&scenario, dump_graph.as_deref())
        }
        Command::Simulate { scenario, trials, seed } => cmd_simulate(&scenario, trials, seed),
    }
}

fn require_mapping(scenario: &Scenario) -> Result<&Mapping, CliError> {
    scenario.mapping.as_ref().ok_or_else(|| {
        CliError::Validation("this command needs a scenario with a mapping".to_string())
    })
}

fn cmd_evaluate(path: &Path) -> Result<String, CliError> {
    let scenario = load_scenario(path)?;
    let mapping = require_mapping(&scenario)?;
    let eval = evaluate(&scenario.pipeline, &scenario.platform, mapping)?;
    let mut out = header(&scenario);
    let _ = write!(
        out,
        "\nmapping: {}\nlatency: {}\nfailure probability: {}",
        render_mapping(mapping, &scenario.platform),
        fmt_sig(eval.latency),
        fmt_sig(eval.failure_prob)
    );
    if let Some(bound) = scenario.thresholds.max_latency {
        let ok = within_threshold(eval.latency, bound);
        let _ = write!(
            out,
            "\nlatency bound {}: {}",
            fmt_sig(bound),
            if ok { "satisfied" } else { "exceeded" }
        );
    }
    if let Some(bound) = scenario.thresholds.max_failure_prob {
        let ok = within_threshold(eval.failure_prob, bound);
        let _ = write!(
            out,
            "\nfailure probability bound {}: {}",
            fmt_sig(bound),
            if ok { "satisfied" } else { "exceeded" }
        );
    }
    Ok(out)
}

fn cmd_classify(path: &Path) -> Result<String, CliError> {
    let scenario = load_scenario(path)?;
    let class = classify_platform(&scenario.platform);
    Ok(format!(
        "processors: {}\nlinks: {}\nspeeds: {}\nfailures: {}\nclass: {}",
        scenario.platform.processor_count(),
        class.links,
        class.speeds,
        class.failures,
        class.kind()
    ))
}

/// Picks the right solver for the platform class, falling back to (or
/// forced onto) the exhaustive oracle, and reports mapping + both criteria.
fn cmd_solve(
    path: &Path,
    objective: Objective,
    max_latency_flag: Option<f64>,
    max_fp_flag: Option<f64>,
    force_exact: bool,
    limits: &EnumLimits,
) -> Result<String, CliError> {
    let scenario = load_scenario(path)?;
    let pipeline = &scenario.pipeline;
    let platform = &scenario.platform;
    let class = classify_platform(platform);

    let max_latency = max_latency_flag.or(scenario.thresholds.max_latency);
    let max_fp = max_fp_flag.or(scenario.thresholds.max_failure_prob);

    let mut out = header(&scenario);
    let objective_line;
    let solver_line;
    let solved: Result<Mapping, CliError> = match objective {
        Objective::Fp => {
            if max_fp_flag.is_some() {
                return Err(CliError::Usage(
                    "--max-fp cannot bound the failure-probability objective; use --max-latency"
                        .to_string(),
                ));
            }
            match max_latency {
                None => {
                    objective_line = "objective: min failure probability (unconstrained)".to_string();
                    solver_line = "solver: all-processors replication".to_string();
                    Ok(solvers::min_fp_unconstrained(pipeline, platform))
                }
                Some(bound) => {
                    objective_line = format!(
                        "objective: min failure probability under latency <= {}",
                        fmt_sig(bound)
                    );
                    if !force_exact && class.kind() == PlatformKind::FullyHomogeneous {
                        solver_line =
                            "solver: most-reliable replication (fully homogeneous)".to_string();
                        Ok(solvers::min_fp_bounded_latency_fully_hom(pipeline, platform, bound)?)
                    } else if !force_exact
                        && class.kind() == PlatformKind::CommHomogeneous
                        && class.failures == Uniformity::Homogeneous
                    {
                        solver_line =
                            "solver: fastest-prefix replication (communication homogeneous)"
                                .to_string();
                        Ok(solvers::min_fp_bounded_latency_comm_hom(pipeline, platform, bound)?)
                    } else {
                        solver_line = "solver: exhaustive enumeration".to_string();
                        Ok(oracle::min_fp_under_latency(pipeline, platform, bound, limits)?.0)
                    }
                }
            }
        }
        Objective::Latency => {
            if max_latency_flag.is_some() {
                return Err(CliError::Usage(
                    "--max-latency cannot bound the latency objective; use --max-fp".to_string(),
                ));
            }
            match max_fp {
                None => {
                    objective_line = "objective: min latency (unconstrained)".to_string();
                    if force_exact {
                        solver_line = "solver: exhaustive enumeration".to_string();
                        Ok(oracle::min_latency_under_fp(pipeline, platform, 1.0, limits)?.0)
                    } else if class.links == Uniformity::Homogeneous {
                        solver_line = "solver: single fastest processor".to_string();
                        Ok(solvers::min_latency_comm_hom(pipeline, platform)?)
                    } else {
                        // Heterogeneous links: the latency optimum may need
                        // a non-interval assignment; answer with the layered
                        // graph and report separately below.
                        let best = min_latency_general(pipeline, platform)?;
                        let _ = write!(
                            out,
                            "\nobjective: min latency (unconstrained)\n\
                             solver: layered-graph shortest path (general mapping)\n\
                             assignment: {}\nlatency: {}",
                            render_general(&best, platform),
                            fmt_sig(best.latency)
                        );
                        return Ok(out);
                    }
                }
                Some(bound) => {
                    objective_line = format!(
                        "objective: min latency under failure probability <= {}",
                        fmt_sig(bound)
                    );
                    if !force_exact && class.kind() == PlatformKind::FullyHomogeneous {
                        solver_line =
                            "solver: most-reliable replication (fully homogeneous)".to_string();
                        Ok(solvers::min_latency_bounded_fp_fully_hom(pipeline, platform, bound)?)
                    } else if !force_exact
                        && class.kind() == PlatformKind::CommHomogeneous
                        && class.failures == Uniformity::Homogeneous
                    {
                        solver_line =
                            "solver: fastest-prefix replication (communication homogeneous)"
                                .to_string();
                        Ok(solvers::min_latency_bounded_fp_comm_hom(pipeline, platform, bound)?)
                    } else {
                        solver_line = "solver: exhaustive enumeration".to_string();
                        Ok(oracle::min_latency_under_fp(pipeline, platform, bound, limits)?.0)
                    }
                }
            }
        }
    };
    let mapping = solved?;

    let _ = write!(out, "\n{objective_line}\n{solver_line}");
    let _ = write!(out, "\nmapping: {}", render_mapping(&mapping, platform));
    match evaluate(pipeline, platform, &mapping) {
        Ok(eval) => {
            let _ = write!(
                out,
                "\nlatency: {}\nfailure probability: {}",
                fmt_sig(eval.latency),
                fmt_sig(eval.failure_prob)
            );
        }
        Err(error) => {
            // Only reachable for the unconstrained all-processors mapping on
            // platforms whose gateway links don't cover every processor.
            let _ = write!(
                out,
                "\nlatency: not evaluable ({error})\nfailure probability: {}",
                fmt_sig(failure_probability(&mapping, platform))
            );
        }
    }
    Ok(out)
}

fn cmd_pareto(path: &Path, csv: Option<&Path>, limits: &EnumLimits) -> Result<String, CliError> {
    let scenario = load_scenario(path)?;
    let front = oracle::pareto_front(&scenario.pipeline, &scenario.platform, limits)?;
    let mut out = header(&scenario);
    let _ = write!(out, "\npareto front: {}", plural(front.len(), "entry", "entries"));
    for (i, entry) in front.entries().iter().enumerate() {
        let _ = write!(
            out,
            "\n{}. latency {}, failure probability {}, mapping {}",
            i + 1,
            fmt_sig(entry.evaluation.latency),
            fmt_sig(entry.evaluation.failure_prob),
            render_mapping(&entry.mapping, &scenario.platform)
        );
    }
    if let Some(csv_path) = csv {
        write_file(csv_path, &front.to_csv(&scenario.platform))?;
        let _ = write!(out, "\ncsv written: {}", csv_path.display());
    }
    Ok(out)
}

fn cmd_general(path: &Path, dump: Option<&Path>) -> Result<String, CliError> {
    let scenario = load_scenario(path)?;
    let graph = build_layered_graph(&scenario.pipeline, &scenario.platform);
    let best = min_latency_general(&scenario.pipeline, &scenario.platform)?;
    let mut out = header(&scenario);
    let _ = write!(
        out,
        "\ngraph: {} vertices, {} edges\nassignment: {}\nlatency: {}",
        graph.vertex_count(),
        graph.edge_count(),
        render_general(&best, &scenario.platform),
        fmt_sig(best.latency)
    );
    if let Some(dump_path) = dump {
        write_file(dump_path, &graph.dump(&scenario.platform))?;
        let _ = write!(out, "\ngraph dump written: {}", dump_path.display());
    }
    Ok(out)
}

fn cmd_simulate(path: &Path, trials: u64, seed: u64) -> Result<String, CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".to_string()));
    }
    let scenario = load_scenario(path)?;
    let mapping = require_mapping(&scenario)?;
    let analytic = failure_probability(mapping, &scenario.platform);
    let estimate = simulate_failure_probability(mapping, &scenario.platform, trials, seed);
    let deviation = (estimate.estimate - analytic).abs();
    let mut out = header(&scenario);
    let _ = write!(
        out,
        "\nmapping: {}\ntrials: {trials}\nseed: {seed}\n\
         analytic failure probability: {}\nestimate: {}\nstd error: {}\ndeviation: {}",
        render_mapping(mapping, &scenario.platform),
        fmt_sig(analytic),
        fmt_sig(estimate.estimate),
        fmt_sig(estimate.std_error),
        fmt_sig(deviation)
    );
    if estimate.std_error > 0.0 {
        let _ = write!(out, " ({} std errors)", fmt_sig(deviation / estimate.std_error));
    }
    Ok(out)
}
