//! The `aspectmine` command line. Exit status: 0 on success, 1 on usage or
//! input errors, 2 on internal errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use aspectmine::assess::{
    auto_label_from_ground_truth, compute_metrics, labeled_seeds, write_metrics_csv, SeedRegistry,
};
use aspectmine::combine::{intersect_fanin_grouped, refine_report, union_seeds};
use aspectmine::concepts::GroupedCallsConfig;
use aspectmine::facts::{FilterConfig, ProgramFacts};
use aspectmine::fanin::FanInConfig;
use aspectmine::forge::{generate, CorpusSpec, GroundTruth};
use aspectmine::redirect::RedirectionConfig;
use aspectmine::report::write_atomic;
use aspectmine::{Catalog, Report};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::session::Session;

pub const STATE_DIR_ENV: &str = "AMINE_STATE_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "aspectmine",
    version,
    about = "Mine crosscutting concern seeds from program facts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fan-in analysis.
    Fanin(FaninArgs),
    /// Grouped calls analysis (formal concepts of the call relation).
    Grouped(GroupedArgs),
    /// Redirections finder.
    Redirect(RedirectArgs),
    /// Combine reports by intersection, caller refinement or seed union.
    Combine(CombineArgs),
    /// Precision, absolute recall and seed quality of a labeled report.
    Metrics(MetricsArgs),
    /// Generate a synthetic corpus with planted concerns.
    Gen(GenArgs),
    /// Label a report from a corpus' ground truth.
    Autolabel(AutolabelArgs),
    /// Serve the triage HTTP API.
    Serve(ServeArgs),
}

#[derive(Args, Debug)]
struct MineArgs {
    /// Facts document (`facts/1`).
    #[arg(long)]
    facts: PathBuf,
    /// `default`, `none`, or a filter configuration file.
    #[arg(long, default_value = "default")]
    filters: String,
    /// Report path, or `-` for standard output.
    #[arg(long)]
    out: PathBuf,
    /// Report name; defaults to the technique.
    #[arg(long)]
    name: Option<String>,
    /// Threshold profile: 1 or 2.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    profile: u8,
}

#[derive(Args, Debug)]
struct FaninArgs {
    #[command(flatten)]
    common: MineArgs,
    #[arg(long)]
    min_callers: Option<usize>,
}

#[derive(Args, Debug)]
struct GroupedArgs {
    #[command(flatten)]
    common: MineArgs,
    #[arg(long)]
    min_callers: Option<usize>,
    #[arg(long)]
    min_callees: Option<usize>,
    #[arg(long)]
    max_context_objects: Option<usize>,
    #[arg(long)]
    max_context_attributes: Option<usize>,
}

#[derive(Args, Debug)]
struct RedirectArgs {
    #[command(flatten)]
    common: MineArgs,
    #[arg(long)]
    min_redirectors: Option<usize>,
    /// Ratio (`0.5`) or percentage (`50%`).
    #[arg(long, value_parser = parse_ratio)]
    min_percentage: Option<f64>,
    /// Keep only pairs whose methods share a name.
    #[arg(long)]
    name_match: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Intersect,
    Refine,
    Union,
}

#[derive(Args, Debug)]
struct CombineArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Fan-in report (intersect, refine).
    #[arg(long)]
    fanin: Option<PathBuf>,
    /// Grouped calls report (intersect, refine).
    #[arg(long)]
    grouped: Option<PathBuf>,
    /// Reports whose seeds are united (union); repeatable.
    #[arg(long = "report")]
    reports: Vec<PathBuf>,
    /// Seed registry (union).
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    /// Also write per-candidate rows as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also write the metrics report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Receives `facts.json` and `truth.json`.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct AutolabelArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Seed registry to create or extend.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[arg(long, env = STATE_DIR_ENV, default_value = "amine-state")]
    state: PathBuf,
}

fn parse_ratio(s: &str) -> Result<f64, String> {
    let (num, scale) = match s.strip_suffix('%') {
        Some(p) => (p, 100.0),
        None => (s, 1.0),
    };
    num.trim()
        .parse::<f64>()
        .map(|v| v / scale)
        .map_err(|e| format!("`{s}` is not a ratio: {e}"))
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        CliError::Internal(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

/// Runs the command line and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Fanin(a) => fanin(a),
        Command::Grouped(a) => grouped(a),
        Command::Redirect(a) => redirect(a),
        Command::Combine(a) => combine(a),
        Command::Metrics(a) => metrics(a),
        Command::Gen(a) => gen(a),
        Command::Autolabel(a) => autolabel(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            2
        }
    }
}

fn load_facts(path: &Path) -> Result<ProgramFacts, CliError> {
    ProgramFacts::load(path).map_err(CliError::input)
}

fn load_filters(spec: &str, default: FilterConfig) -> Result<FilterConfig, CliError> {
    match spec {
        "default" => Ok(default),
        "none" => Ok(FilterConfig::none()),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{path}: {e}")))?;
            serde_json::from_str(&text).map_err(|e| CliError::input(format!("{path}: {e}")))
        }
    }
}

fn load_report(path: &Path) -> Result<Report, CliError> {
    Report::load(path).map_err(CliError::input)
}

fn write_output(path: &Path, text: &str) -> CliResult {
    if path == Path::new("-") {
        print!("{text}");
        return Ok(());
    }
    write_atomic(path, text.as_bytes()).map_err(CliError::internal)
}

fn finish_report(report: Report, args: &MineArgs) -> CliResult {
    let report = match &args.name {
        Some(n) => report.with_name(n.clone()),
        None => report,
    };
    eprintln!("{}: {} candidates", report.name, report.candidates.len());
    write_output(&args.out, &report.to_json())
}

fn fanin(a: FaninArgs) -> CliResult {
    let facts = load_facts(&a.common.facts)?;
    let filter = load_filters(&a.common.filters, FilterConfig::call_analysis_default())?;
    let mut cfg = FanInConfig::default();
    if let Some(m) = a.min_callers {
        cfg.min_callers = m;
    }
    let report = Report::fanin(&facts, &filter, &cfg).map_err(CliError::input)?;
    finish_report(report, &a.common)
}

fn grouped(a: GroupedArgs) -> CliResult {
    let facts = load_facts(&a.common.facts)?;
    let filter = load_filters(&a.common.filters, FilterConfig::call_analysis_default())?;
    let mut cfg = GroupedCallsConfig::profile(a.common.profile);
    if let Some(m) = a.min_callers {
        cfg.min_callers = m;
    }
    if let Some(m) = a.min_callees {
        cfg.min_callees = m;
    }
    if let Some(m) = a.max_context_objects {
        cfg.max_context_objects = m;
    }
    if let Some(m) = a.max_context_attributes {
        cfg.max_context_attributes = m;
    }
    let report = Report::grouped(&facts, &filter, &cfg).map_err(CliError::input)?;
    finish_report(report, &a.common)
}

fn redirect(a: RedirectArgs) -> CliResult {
    let facts = load_facts(&a.common.facts)?;
    let filter = load_filters(&a.common.filters, FilterConfig::redirection_default())?;
    let mut cfg = RedirectionConfig::default();
    if let Some(m) = a.min_redirectors {
        cfg.min_redirectors = m;
    }
    if let Some(p) = a.min_percentage {
        cfg.min_percentage = p;
    }
    cfg.require_name_match = a.name_match;
    let report = Report::redirections(&facts, &filter, &cfg).map_err(CliError::input)?;
    finish_report(report, &a.common)
}

fn combine(a: CombineArgs) -> CliResult {
    match a.mode {
        Mode::Intersect | Mode::Refine => {
            let (Some(fi), Some(gc)) = (&a.fanin, &a.grouped) else {
                return Err(CliError::input("--fanin and --grouped are required for this mode"));
            };
            let (fi, gc) = (load_report(fi)?, load_report(gc)?);
            let out = match a.mode {
                Mode::Intersect => intersect_fanin_grouped(&fi, &gc),
                _ => refine_report(&fi, &gc),
            }
            .map_err(CliError::input)?;
            eprintln!("{}: {} candidates", out.name, out.candidates.len());
            write_output(&a.out, &out.to_json())
        }
        Mode::Union => {
            let Some(labels) = &a.labels else {
                return Err(CliError::input("--labels is required for union"));
            };
            if a.reports.is_empty() {
                return Err(CliError::input("union needs at least one --report"));
            }
            let registry = SeedRegistry::load(labels).map_err(CliError::input)?;
            let mut sets = Vec::new();
            for p in &a.reports {
                let r = load_report(p)?;
                sets.push((r.name.clone(), labeled_seeds(&r, &registry)));
            }
            let union = union_seeds(&sets);
            eprintln!("union: {} distinct seeds", union.seed_count);
            let text = serde_json::to_string_pretty(&union).map_err(CliError::internal)? + "\n";
            write_output(&a.out, &text)
        }
    }
}

fn metrics(a: MetricsArgs) -> CliResult {
    let report = load_report(&a.report)?;
    let registry = SeedRegistry::load(&a.labels).map_err(CliError::input)?;
    let m = compute_metrics(&report, &registry);
    println!(
        "{}: precision {}, absolute recall {}, {} candidates",
        m.technique, m.precision_display, m.absolute_recall, m.candidate_count
    );
    if let Some(path) = &a.out {
        let text = serde_json::to_string_pretty(&m).map_err(CliError::internal)? + "\n";
        write_output(path, &text)?;
    }
    if let Some(path) = &a.csv {
        let mut buf = Vec::new();
        write_metrics_csv(&report, &registry, &mut buf).map_err(CliError::internal)?;
        write_output(path, &String::from_utf8(buf).map_err(CliError::internal)?)?;
    }
    Ok(())
}

fn gen(a: GenArgs) -> CliResult {
    let spec = CorpusSpec::load(&a.spec).map_err(CliError::input)?;
    let corpus = generate(&spec, a.seed).map_err(CliError::input)?;
    std::fs::create_dir_all(&a.out_dir).map_err(CliError::internal)?;
    write_output(&a.out_dir.join("facts.json"), &corpus.facts.to_canonical_json())?;
    write_output(&a.out_dir.join("truth.json"), &corpus.truth.to_json())?;
    eprintln!(
        "{} methods, {} calls, {} planted concerns, fingerprint {}",
        corpus.facts.method_count(),
        corpus.facts.calls().len(),
        corpus.truth.concerns.len(),
        corpus.facts.fingerprint()
    );
    Ok(())
}

fn autolabel(a: AutolabelArgs) -> CliResult {
    let report = load_report(&a.report)?;
    let truth = GroundTruth::load(&a.truth).map_err(CliError::input)?;
    let fresh = auto_label_from_ground_truth(&report, &truth).map_err(CliError::input)?;
    let mut registry = SeedRegistry::load_or_default(&a.out).map_err(CliError::input)?;
    let catalog = Catalog::from_reports([&report]);
    for label in fresh.labels.into_values() {
        registry.label(&catalog, label).map_err(CliError::internal)?;
    }
    let seeds = report
        .candidates
        .iter()
        .filter(|e| {
            registry
                .get(&e.id)
                .is_some_and(|l| l.verdict == aspectmine::assess::Verdict::Seed)
        })
        .count();
    eprintln!(
        "{}: {seeds} of {} candidates are seeds",
        report.name,
        report.candidates.len()
    );
    registry.save(&a.out).map_err(CliError::internal)
}

fn serve(a: ServeArgs) -> CliResult {
    let _ = env_logger::try_init();
    std::fs::create_dir_all(&a.state).map_err(|e| CliError::input(format!("{}: {e}", a.state.display())))?;
    let session = Session::open(&a.state).map_err(CliError::input)?;
    let app = crate::api::router(Arc::new(session));
    let runtime = tokio::runtime::Runtime::new().map_err(CliError::internal)?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind((a.host.as_str(), a.port))
            .await
            .map_err(|e| CliError::input(format!("cannot bind {}:{}: {e}", a.host, a.port)))?;
        log::info!(
            "serving {} on {}",
            a.state.display(),
            listener.local_addr().map_err(CliError::internal)?
        );
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(CliError::internal)
    })
}
