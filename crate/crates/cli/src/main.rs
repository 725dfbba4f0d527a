//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when the computation ran but found no
//! transversal (or the input fails verification), 2 on usage and format
//! errors. Errors are also written to stderr as one JSON object.

// `!(x > 0.0)` is deliberate: NaN must fail these checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use transversal::finisher::{finish, FinishOutcome, FinisherParams};
use transversal::generators::{egl_sweep, GenSpec};
use transversal::io::{instance_digest, read_instance, to_canonical_json, ColouringFile};
use transversal::nibble::{monte_carlo_check, nibble_round, EstimateOptions, NibbleParams};
use transversal::oracle::{find_transversal_exact, SearchBudget, SearchOutcome};
use transversal::par::configure_threads;
use transversal::phase1::{reduce, ReduceParams};
use transversal::pipeline::{run_pipeline, PipelineOutcome, PipelineParams};
use transversal::reductions::{
    build_dp_cover, build_list_cover, build_single_conflict_cover, CorrespondenceAssignment, ListAssignment,
};
use transversal::{is_independent_transversal, stats, CoverInstance, Error, Execution, InstanceData};

#[derive(Parser)]
#[command(name = "transversal", version, about = "Independent transversals in cover graphs")]
struct Cli {
    /// Worker threads for trial and seed sweeps; 1 runs sequentially.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file against the cover invariants.
    Validate { instance: PathBuf },
    /// Degree and multiplicity statistics.
    Stats { instance: PathBuf },
    /// Generate a random instance.
    Generate(GenerateArgs),
    /// Reduce colour multiplicity by repeated list halving.
    Reduce(ReduceArgs),
    /// One nibble round, or a Monte Carlo table over many rounds.
    Nibble(NibbleArgs),
    /// Search for an independent transversal.
    Solve(SolveArgs),
    /// Check that a colouring is an independent transversal.
    Verify { instance: PathBuf, colouring: PathBuf },
    /// Build the cover of a list or correspondence assignment.
    BuildCover(BuildCoverArgs),
    /// Transversal existence frequency in the EGL family over a range of n.
    EglSweep(EglSweepArgs),
}

#[derive(Args)]
struct Mode {
    /// Fail as soon as a stated hypothesis or target is missed.
    #[arg(long, conflicts_with = "adaptive")]
    strict: bool,
    /// Continue with what each stage achieved (default).
    #[arg(long)]
    adaptive: bool,
}

#[derive(Args)]
struct Output {
    /// Primary output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    RandomCover,
    ListCover,
    SingleConflict,
    Egl,
}

#[derive(Args)]
struct GenerateArgs {
    /// Read the full generator specification from a JSON file instead.
    #[arg(long, conflicts_with = "family")]
    spec: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "spec")]
    family: Option<Family>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 20)]
    parts: usize,
    #[arg(long, default_value_t = 4)]
    list_size: usize,
    /// Probability of each colour pair along a base edge (random-cover).
    #[arg(long, default_value_t = 0.1)]
    edge_prob: f64,
    #[arg(long, default_value_t = 0.5)]
    base_density: f64,
    /// Multiplicity cap (random-cover) or base-edge multiplicity (single-conflict).
    #[arg(long, default_value_t = 1)]
    multiplicity: u32,
    /// Palette size (list-cover).
    #[arg(long, default_value_t = 8)]
    palette: usize,
    /// Vertex count (egl).
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Number of sets (egl).
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0.5)]
    pair_edge_prob: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ReduceArgs {
    instance: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// Defaults to the measured `mu / avg degree`.
    #[arg(long)]
    gamma: Option<f64>,
    /// Defaults to the measured maximum average colour degree.
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 50)]
    max_attempts: usize,
    #[command(flatten)]
    mode: Mode,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct NibbleArgs {
    instance: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Defaults to `1/ln d`.
    #[arg(long)]
    p: Option<f64>,
    /// Defaults to the measured maximum average colour degree.
    #[arg(long)]
    d: Option<f64>,
    /// Defaults to the shortest list.
    #[arg(long)]
    lambda: Option<f64>,
    /// Defaults to `lambda/d - 1`.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Monte Carlo trials; writes a per-trial CSV instead of a residual.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 100)]
    max_attempts: usize,
    #[command(flatten)]
    mode: Mode,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Exact,
    Lll,
    Pipeline,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    engine: Engine,
    #[arg(long)]
    seed: Option<u64>,
    /// Search-tree node budget for the exact engine.
    #[arg(long, default_value_t = 100_000_000)]
    max_nodes: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_resamples: u64,
    #[arg(long, default_value_t = 50)]
    max_attempts: usize,
    /// Defaults to the measured `list size / avg degree - 1` when positive, else 0.5.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Defaults to the measured `mu / avg degree`.
    #[arg(long)]
    gamma: Option<f64>,
    /// Record wall-clock time per pipeline stage in the report.
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    mode: Mode,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum AssignmentKind {
    List,
    Correspondence,
    SingleConflict,
}

#[derive(Args)]
struct BuildCoverArgs {
    assignment: PathBuf,
    #[arg(long, value_enum, default_value = "list")]
    kind: AssignmentKind,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct EglSweepArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
    #[arg(long, default_value_t = 1.0)]
    pair_edge_prob: f64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 100_000_000)]
    max_nodes: u64,
    /// CSV output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    /// Bad arguments or unreadable input: exit 2.
    Usage { kind: &'static str, message: String, detail: Value },
    /// The computation ran and failed: exit 1.
    Domain { kind: &'static str, message: String, detail: Value },
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError::Usage {
            kind: "usage",
            message: message.into(),
            detail: Value::Null,
        }
    }

    fn domain(kind: &'static str, message: impl Into<String>) -> Self {
        CliError::Domain {
            kind,
            message: message.into(),
            detail: Value::Null,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::InvalidInstance(v) => CliError::Usage {
                kind: "invalid_instance",
                message,
                detail: json!(v),
            },
            Error::InvalidArgument(_) => CliError::Usage {
                kind: "invalid_argument",
                message,
                detail: Value::Null,
            },
            Error::Format(_) => CliError::Usage {
                kind: "format",
                message,
                detail: Value::Null,
            },
            Error::Precondition(_) => CliError::domain("precondition", message),
            Error::ImproperColouring(..) => CliError::domain("improper_colouring", message),
            Error::AttemptsExhausted { .. } => CliError::domain("attempts_exhausted", message),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Usage {
            kind: "io",
            message: e.to_string(),
            detail: Value::Null,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TRANSVERSAL_LOG", "error")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let execution = match cli.jobs {
        Some(0) => {
            return report_error(CliError::usage("--jobs must be at least 1"));
        }
        Some(1) => Execution::Sequential,
        Some(n) => {
            configure_threads(n);
            Execution::Parallel
        }
        None => Execution::Parallel,
    };
    match run(cli.command, execution) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(e),
    }
}

fn report_error(e: CliError) -> ExitCode {
    let (code, kind, message, detail) = match e {
        CliError::Usage { kind, message, detail } => (2, kind, message, detail),
        CliError::Domain { kind, message, detail } => (1, kind, message, detail),
    };
    let mut obj = json!({ "error": kind, "message": message });
    if !detail.is_null() {
        obj["detail"] = detail;
    }
    eprintln!("{obj}");
    ExitCode::from(code)
}

fn run(command: Command, execution: Execution) -> CliResult {
    match command {
        Command::Validate { instance } => cmd_validate(&instance),
        Command::Stats { instance } => {
            let inst = load_instance(&instance)?;
            write_json_line(None, &stats(&inst))
        }
        Command::Generate(args) => cmd_generate(args),
        Command::Reduce(args) => cmd_reduce(args),
        Command::Nibble(args) => cmd_nibble(args, execution),
        Command::Solve(args) => cmd_solve(args),
        Command::Verify { instance, colouring } => cmd_verify(&instance, &colouring),
        Command::BuildCover(args) => cmd_build_cover(args),
        Command::EglSweep(args) => cmd_egl_sweep(args, execution),
    }
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> CliResult<CoverInstance> {
    let inst = read_instance(open(path)?)?;
    log::debug!("loaded {} with {} parts", path.display(), inst.num_parts());
    Ok(inst)
}

fn require_seed(seed: Option<u64>, what: &str) -> CliResult<u64> {
    seed.ok_or_else(|| CliError::usage(format!("{what} is stochastic; pass --seed")))
}

/// Write `text` to `path`, or to stdout.
fn emit(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_json_line(path: Option<&Path>, value: &impl Serialize) -> CliResult {
    let mut text = serde_json::to_string(value).expect("report serialises");
    text.push('\n');
    emit(path, &text)
}

fn write_report(path: Option<&Path>, value: &impl Serialize) -> CliResult {
    if let Some(p) = path {
        let mut text = serde_json::to_string_pretty(value).expect("report serialises");
        text.push('\n');
        emit(Some(p), &text)?;
    }
    Ok(())
}

fn cmd_validate(path: &Path) -> CliResult {
    let data: InstanceData =
        serde_json::from_reader(open(path)?).map_err(|e| CliError::from(Error::Format(e)))?;
    let violations = transversal::validate(&data);
    write_json_line(None, &json!({ "valid": violations.is_empty(), "violations": violations }))?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Domain {
            kind: "invalid_instance",
            message: format!("{} violation(s), first: {}", violations.len(), violations[0]),
            detail: Value::Null,
        })
    }
}

fn cmd_generate(args: GenerateArgs) -> CliResult {
    let spec = match (&args.spec, args.family) {
        (Some(path), _) => serde_json::from_reader(open(path)?).map_err(|e| CliError::from(Error::Format(e)))?,
        (None, Some(family)) => {
            let seed = require_seed(args.seed, "generate")?;
            match family {
                Family::RandomCover => GenSpec::RandomCover {
                    parts: args.parts,
                    list_size: args.list_size,
                    edge_prob: args.edge_prob,
                    base_density: args.base_density,
                    max_multiplicity: args.multiplicity as usize,
                    seed,
                },
                Family::ListCover => GenSpec::ListCover {
                    parts: args.parts,
                    base_density: args.base_density,
                    palette: args.palette,
                    list_size: args.list_size,
                    seed,
                },
                Family::SingleConflict => GenSpec::SingleConflict {
                    parts: args.parts,
                    base_density: args.base_density,
                    multiplicity: args.multiplicity,
                    list_size: args.list_size,
                    seed,
                },
                Family::Egl => GenSpec::Egl {
                    n: args.n,
                    k: args.k,
                    pair_edge_prob: args.pair_edge_prob,
                    seed,
                },
            }
        }
        (None, None) => unreachable!("clap requires --family or --spec"),
    };
    let generated = spec.generate()?;
    emit(args.output.out.as_deref(), &to_canonical_json(&generated.instance))?;
    write_report(
        args.output.report.as_deref(),
        &json!({
            "spec": spec,
            "instance_digest": instance_digest(&generated.instance),
            "parts": generated.instance.num_parts(),
            "stats": generated.stats,
        }),
    )
}

fn measured_gamma(inst: &CoverInstance) -> f64 {
    let s = stats(inst);
    let d = s.avg_degree_f64();
    if d > 0.0 {
        s.max_colour_multiplicity as f64 / d
    } else {
        1.0
    }
}

fn cmd_reduce(args: ReduceArgs) -> CliResult {
    let inst = load_instance(&args.instance)?;
    let seed = require_seed(args.seed, "reduce")?;
    let params = ReduceParams {
        epsilon: args.epsilon,
        gamma: args.gamma.unwrap_or_else(|| measured_gamma(&inst)),
        d: args.d.unwrap_or_else(|| stats(&inst).avg_degree_f64()),
        seed,
        max_attempts: args.max_attempts,
        strict: args.mode.strict,
    };
    let result = reduce(&inst, &params)?;
    emit(args.output.out.as_deref(), &to_canonical_json(&result.instance))?;
    write_report(
        args.output.report.as_deref(),
        &json!({
            "instance_digest": instance_digest(&inst),
            "output_digest": instance_digest(&result.instance),
            "params": params,
            "trace": result.trace,
            "embedding": result.embedding,
        }),
    )
}

fn cmd_nibble(args: NibbleArgs, execution: Execution) -> CliResult {
    let inst = load_instance(&args.instance)?;
    let seed = require_seed(args.seed, "nibble")?;
    let s = stats(&inst);
    let d = args.d.unwrap_or_else(|| s.avg_degree_f64());
    let lambda = args.lambda.unwrap_or(s.min_list_size as f64);
    let epsilon = args.epsilon.unwrap_or(lambda / d - 1.0);
    if !(d > 1.0) {
        return Err(CliError::usage(format!("d = {d}: pass --d above 1")));
    }
    if !(epsilon > 0.0) {
        return Err(CliError::usage(format!(
            "measured epsilon {epsilon:.4} is not positive; pass --epsilon"
        )));
    }
    let mut params = NibbleParams::new(d, lambda, epsilon, seed);
    if let Some(p) = args.p {
        params.p = p;
    }
    params.max_attempts = args.max_attempts;
    params.strict = args.mode.strict;

    if let Some(trials) = args.trials {
        let options = EstimateOptions {
            evaluate_events: true,
            keep_trials: true,
            execution,
            ..EstimateOptions::default()
        };
        let mut report = monte_carlo_check(&inst, &params, trials, &options)?;
        let records = report.trial_records.take().unwrap_or_default();
        let mut csv = csv::Writer::from_writer(Vec::new());
        csv.write_record(["trial", "part", "useable_cols", "expected_useable", "bad_events", "omega_star"])
            .map_err(|e| CliError::usage(e.to_string()))?;
        for r in &records {
            for (v, part) in report.parts.iter().enumerate() {
                csv.serialize((
                    r.trial,
                    v,
                    r.useable_cols[v],
                    part.closed_form,
                    r.bad_events.get(v).copied().unwrap_or(0),
                    r.omega_star.get(v).copied().unwrap_or(false),
                ))
                .map_err(|e| CliError::usage(e.to_string()))?;
            }
        }
        let bytes = csv.into_inner().map_err(|e| CliError::usage(e.to_string()))?;
        emit(args.output.out.as_deref(), &String::from_utf8(bytes).expect("csv is utf-8"))?;
        return write_report(args.output.report.as_deref(), &report);
    }

    let round = nibble_round(&inst, &params)?;
    emit(args.output.out.as_deref(), &to_canonical_json(&round.residual))?;
    write_report(
        args.output.report.as_deref(),
        &json!({
            "instance_digest": instance_digest(&inst),
            "params": params,
            "attempts": round.attempts,
            "accepted": round.accepted,
            "colouring": ColouringFile::from_colouring(&round.colouring),
            "target_list_size": round.target_list_size,
            "target_avg_degree": round.target_avg_degree,
            "achieved_avg_degree": round.achieved_avg_degree,
            "short_lists": round.short_lists,
            "bad_events": round.report.triggered_bad_events,
            "residual_stats": stats(&round.residual),
            "embedding": round.embedding,
        }),
    )
}

fn cmd_solve(args: SolveArgs) -> CliResult {
    let inst = load_instance(&args.instance)?;
    let out = args.output.out.as_deref();
    let report = args.output.report.as_deref();
    match args.engine {
        Engine::Exact => match find_transversal_exact(&inst, SearchBudget::find(args.max_nodes)) {
            SearchOutcome::Found(c) => {
                write_report(report, &json!({ "engine": "exact", "outcome": "found" }))?;
                write_json_line(out, &ColouringFile::from_colouring(&c))
            }
            SearchOutcome::None => {
                write_report(report, &json!({ "engine": "exact", "outcome": "none" }))?;
                Err(CliError::domain("none", "the instance has no independent transversal"))
            }
            SearchOutcome::BudgetExhausted => {
                write_report(report, &json!({ "engine": "exact", "outcome": "budget_exhausted" }))?;
                Err(CliError::domain(
                    "budget_exhausted",
                    format!("search stopped after {} nodes", args.max_nodes),
                ))
            }
        },
        Engine::Lll => {
            let params = FinisherParams {
                max_resamples: args.max_resamples,
                seed: require_seed(args.seed, "the lll engine")?,
                enforce_precondition: args.mode.strict,
                list_factor: 4.0,
            };
            match finish(&inst, &params)? {
                FinishOutcome::Found { colouring, resamples } => {
                    write_report(
                        report,
                        &json!({ "engine": "lll", "outcome": "found", "resamples": resamples, "params": params }),
                    )?;
                    write_json_line(out, &ColouringFile::from_colouring(&colouring))
                }
                FinishOutcome::ResampleLimit { resamples } => {
                    write_report(
                        report,
                        &json!({ "engine": "lll", "outcome": "attempts_exhausted", "resamples": resamples, "params": params }),
                    )?;
                    Err(CliError::domain(
                        "attempts_exhausted",
                        format!("no transversal within {resamples} resamples"),
                    ))
                }
            }
        }
        Engine::Pipeline => {
            let seed = require_seed(args.seed, "the pipeline engine")?;
            let s = stats(&inst);
            let measured_eps = s.min_list_size as f64 / s.avg_degree_f64() - 1.0;
            let mut params = PipelineParams::new(
                args.epsilon
                    .unwrap_or(if measured_eps > 0.0 && measured_eps.is_finite() { measured_eps } else { 0.5 }),
                args.gamma.unwrap_or_else(|| measured_gamma(&inst)),
                seed,
            );
            params.max_attempts = args.max_attempts;
            params.max_resamples = args.max_resamples;
            params.strict = args.mode.strict;
            params.timings = args.timings;
            match run_pipeline(&inst, &params)? {
                PipelineOutcome::Found { colouring, report: r } => {
                    write_report(report, &r)?;
                    write_json_line(out, &ColouringFile::from_colouring(&colouring))
                }
                PipelineOutcome::Failed { stage, report: r } => {
                    write_report(report, &r)?;
                    Err(CliError::Domain {
                        kind: "attempts_exhausted",
                        message: format!("pipeline failed at stage {stage}"),
                        detail: json!({ "stage": stage, "error": r.error }),
                    })
                }
            }
        }
    }
}

fn cmd_verify(instance: &Path, colouring: &Path) -> CliResult {
    let inst = load_instance(instance)?;
    let file: ColouringFile =
        serde_json::from_reader(open(colouring)?).map_err(|e| CliError::from(Error::Format(e)))?;
    let c = file.to_colouring(inst.num_parts())?;
    if let Some(bad) = c.colours().find(|c| c.slot >= inst.list_len(c.part)) {
        return Err(CliError::from(Error::InvalidArgument(format!(
            "colour {bad} is outside its list"
        ))));
    }
    let conflicts: Vec<_> = c.conflicts(&inst);
    let uncoloured: Vec<usize> = (0..inst.num_parts()).filter(|&p| c.get(p).is_none()).collect();
    let valid = is_independent_transversal(&inst, &c);
    let verdict = json!({ "valid": valid, "conflicts": conflicts, "uncoloured": uncoloured });
    write_json_line(None, &verdict)?;
    if valid {
        Ok(())
    } else {
        Err(CliError::Domain {
            kind: "not_a_transversal",
            message: format!(
                "{} conflicting pair(s), {} uncoloured part(s)",
                conflicts.len(),
                uncoloured.len()
            ),
            detail: verdict,
        })
    }
}

fn cmd_build_cover(args: BuildCoverArgs) -> CliResult {
    let reader = open(&args.assignment)?;
    let fmt = |e| CliError::from(Error::Format(e));
    let (inst, extra) = match args.kind {
        AssignmentKind::List => {
            let a: ListAssignment = serde_json::from_reader(reader).map_err(fmt)?;
            (build_list_cover(&a)?, Value::Null)
        }
        AssignmentKind::Correspondence => {
            let a: CorrespondenceAssignment = serde_json::from_reader(reader).map_err(fmt)?;
            (build_dp_cover(&a)?, Value::Null)
        }
        AssignmentKind::SingleConflict => {
            let a: CorrespondenceAssignment = serde_json::from_reader(reader).map_err(fmt)?;
            let sc = build_single_conflict_cover(&a)?;
            let identity = json!({ "holds": sc.identity_holds(), "per_part": sc.degree_identity });
            (sc.instance, identity)
        }
    };
    emit(args.output.out.as_deref(), &to_canonical_json(&inst))?;
    write_report(
        args.output.report.as_deref(),
        &json!({ "instance_digest": instance_digest(&inst), "stats": stats(&inst), "degree_identity": extra }),
    )
}

fn cmd_egl_sweep(args: EglSweepArgs, execution: Execution) -> CliResult {
    let seed = require_seed(args.seed, "egl-sweep")?;
    if args.n_min > args.n_max {
        return Err(CliError::usage("--n-min exceeds --n-max"));
    }
    let ns: Vec<usize> = (args.n_min..=args.n_max).collect();
    let points = egl_sweep(&ns, args.k, args.pair_edge_prob, args.samples, seed, args.max_nodes, execution)?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["n", "k", "n_over_k2", "samples", "found", "none", "undecided", "frequency"])
        .map_err(|e| CliError::usage(e.to_string()))?;
    for p in &points {
        let freq = p.frequency().map(|f| format!("{f:.4}")).unwrap_or_default();
        csv.serialize((p.n, p.k, p.n_over_k2, p.samples, p.found, p.none, p.undecided, freq))
            .map_err(|e| CliError::usage(e.to_string()))?;
    }
    let bytes = csv.into_inner().map_err(|e| CliError::usage(e.to_string()))?;
    emit(args.out.as_deref(), &String::from_utf8(bytes).expect("csv is utf-8"))
}
