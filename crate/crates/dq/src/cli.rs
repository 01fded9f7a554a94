//! The `dq` command line. Exit codes: 0 success, 1 usage error, 2 data error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use dq_core::analytics::{betweenness, hits, pagerank, project, AnalyticsError, HitsParams, PageRankParams, ScoreMap};
use dq_core::ingest::{
    generate_scenario, replay_messages, AnalyticParams, Broker, ReplayError, ScenarioConfig, ScenarioMessage,
};
use dq_core::qualify::{emit_dq, mint_run_id, AnalyticExecution, ScoreRecord};
use dq_core::query::{execute, Clause, Comparator, PatternTerm, QueryPattern, SortDirection};
use dq_core::vocab::{decide_strategy, AnalyticDescriptor, Normalization, RelationshipKind, StateKind};
use dq_core::{QuadStore, Timestamp};

use crate::nquads::{parse_nquads, parse_pattern_terms, serialize_nquads, ParseMode, ParseOptions};
use crate::report_csv::{write_series_csv, write_summary_csv};
use crate::scenario_file::{read_scenario, write_scenario};
use crate::store_dir::StoreDir;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dq", version, about = "Direct-qualification quad store and relevance analytics")]
pub struct Cli {
    /// Store directory (quads.nq plus documents/).
    #[arg(long, global = true, env = "DQ_STORE_DIR", default_value = "dq-store")]
    pub store: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse an N-Quads file into the store.
    Load {
        path: PathBuf,
        /// Skip malformed lines instead of failing.
        #[arg(long)]
        lenient: bool,
    },
    /// Run an analytic over the document graph and record its scores.
    Analyze {
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        #[arg(long, default_value_t = 0.85)]
        damping: f64,
        #[arg(long, default_value_t = 1e-10)]
        epsilon: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        /// Execution time (xsd:dateTime); defaults to now.
        #[arg(long)]
        at: Option<String>,
    },
    /// Match clause patterns and print bindings as TSV.
    Query {
        /// Clause `S P O G`; positions are ?vars or N-Quads terms. Repeatable.
        #[arg(long = "where", required = true)]
        clauses: Vec<String>,
        /// Numeric filter such as `?score >= 0.5`. Repeatable.
        #[arg(long = "filter")]
        filters: Vec<String>,
        /// `?var`, `?var asc` or `?var desc`.
        #[arg(long)]
        order_by: Option<String>,
        /// Keep at most this many rows
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Replay a scenario and write reports, the store export and payloads.
    Replay {
        /// Scenario configuration (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Replay these JSON-lines messages instead of generating them.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Output directory; must not already hold a store
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ReplayAlgorithm::Pagerank, ReplayAlgorithm::Hits, ReplayAlgorithm::Betweenness])]
        algorithms: Vec<ReplayAlgorithm>,
    },
    /// Print the store as canonical N-Quads.
    Export {
        /// Write here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Pagerank,
    Hits,
    Betweenness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReplayAlgorithm {
    Pagerank,
    Hits,
    Betweenness,
    Vsm,
}

impl From<Algorithm> for ReplayAlgorithm {
    fn from(a: Algorithm) -> Self {
        match a {
            Algorithm::Pagerank => ReplayAlgorithm::Pagerank,
            Algorithm::Hits => ReplayAlgorithm::Hits,
            Algorithm::Betweenness => ReplayAlgorithm::Betweenness,
        }
    }
}

impl Algorithm {
    fn descriptor(self) -> AnalyticDescriptor {
        ReplayAlgorithm::from(self).descriptor()
    }
}

impl ReplayAlgorithm {
    fn descriptor(self) -> AnalyticDescriptor {
        match self {
            ReplayAlgorithm::Pagerank => AnalyticDescriptor::pagerank(),
            ReplayAlgorithm::Hits => AnalyticDescriptor::hits(),
            ReplayAlgorithm::Betweenness => AnalyticDescriptor::betweenness(),
            ReplayAlgorithm::Vsm => AnalyticDescriptor::vsm(),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn data(message: impl std::fmt::Display) -> CliError {
    CliError::Data(message.to_string())
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |e| data(format!("{}: {e}", path.display()))
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "dq: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let store_dir = StoreDir::new(&cli.store);
    match cli.command {
        Command::Load { path, lenient } => cmd_load(&store_dir, &path, lenient, stdout, stderr),
        Command::Analyze {
            algorithm,
            damping,
            epsilon,
            max_iter,
            at,
        } => {
            let params = AnalyticParams {
                pagerank: PageRankParams {
                    damping,
                    epsilon,
                    max_iter,
                },
                hits: HitsParams { epsilon, max_iter },
            };
            cmd_analyze(&store_dir, algorithm, &params, at.as_deref(), stdout)
        }
        Command::Query {
            clauses,
            filters,
            order_by,
            limit,
        } => {
            let query = build_query(&clauses, &filters, order_by.as_deref(), limit)?;
            cmd_query(&store_dir, &query, stdout)
        }
        Command::Replay {
            config,
            scenario,
            out,
            algorithms,
        } => cmd_replay(config.as_deref(), scenario.as_deref(), &out, &algorithms, stdout),
        Command::Export { output } => {
            let text = serialize_nquads(&load_store(&store_dir)?.snapshot());
            match output {
                Some(path) => fs::write(&path, text).map_err(io_error(&path)),
                None => stdout.write_all(text.as_bytes()).map_err(data),
            }
        }
    }
}

fn load_store(store_dir: &StoreDir) -> Result<QuadStore, CliError> {
    store_dir.load().map_err(data)
}

fn cmd_load(
    store_dir: &StoreDir,
    path: &Path,
    lenient: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let bytes = fs::read(path).map_err(io_error(path))?;
    let options = ParseOptions {
        mode: if lenient { ParseMode::Lenient } else { ParseMode::Strict },
        ..ParseOptions::default()
    };
    let parsed = parse_nquads(&bytes, options).map_err(|e| data(format!("{}: {e}", path.display())))?;
    for skipped in &parsed.skipped {
        let _ = writeln!(stderr, "{}: skipped {skipped}", path.display());
    }
    let mut store = load_store(store_dir)?;
    store.extend(&parsed.quads);
    store_dir.save(&store).map_err(data)?;
    writeln!(stdout, "{} quads", parsed.quads.len()).map_err(data)
}

fn analytics_error(e: AnalyticsError) -> CliError {
    match e {
        AnalyticsError::InvalidParameter(_) => usage(e.to_string()),
        _ => data(e),
    }
}

fn records_from(map: &ScoreMap, descriptor: &AnalyticDescriptor, run: &dq_core::Iri) -> Vec<ScoreRecord> {
    let n = map.len() as f64;
    map.iter()
        .map(|(v, s)| {
            let raw = if descriptor.normalization() == Normalization::Probability { s * n } else { s };
            ScoreRecord::monotonic(v.clone(), run.clone(), raw, s)
        })
        .collect()
}

fn cmd_analyze(
    store_dir: &StoreDir,
    algorithm: Algorithm,
    params: &AnalyticParams,
    at: Option<&str>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let executed_at = match at {
        Some(text) => Timestamp::parse(text).ok_or_else(|| usage(format!("--at: not a timestamp: {text}")))?,
        None => Timestamp::from_millis(chrono::Utc::now().timestamp_millis()),
    };
    let mut store = load_store(store_dir)?;
    let snapshot = store.snapshot();
    let graph = project(&snapshot);
    if graph.vertex_count() == 0 {
        return Err(data(AnalyticsError::EmptyGraph));
    }
    let descriptor = algorithm.descriptor();
    let map = match algorithm {
        Algorithm::Pagerank => pagerank(&graph, &params.pagerank).map_err(analytics_error)?,
        Algorithm::Hits => hits(&graph, &params.hits).map_err(analytics_error)?.authorities,
        Algorithm::Betweenness => betweenness(&graph),
    };
    let run_id = mint_run_id(&store, descriptor.algorithm());
    let records = records_from(&map, &descriptor, &run_id);
    let execution = AnalyticExecution {
        run_id: run_id.clone(),
        descriptor,
        inputs: graph.vertices().iter().cloned().collect::<BTreeSet<_>>(),
        executed_at,
        store_revision: snapshot.revision(),
    };
    let strategy = decide_strategy(RelationshipKind::Relationship, StateKind::Continuant);
    emit_dq(&mut store, &execution, &records, strategy).map_err(data)?;
    store_dir.save(&store).map_err(data)?;

    let mut ranked: Vec<&ScoreRecord> = records.iter().collect();
    ranked.sort_by(|a, b| {
        b.normalized_score
            .total_cmp(&a.normalized_score)
            .then_with(|| a.target.cmp(&b.target))
    });
    let mut out = format!("run\t{}\nrank\tdocument\trawScore\tnormalizedScore\n", run_id.as_str());
    for (i, r) in ranked.iter().take(10).enumerate() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            i + 1,
            r.target.as_str(),
            r.raw_score,
            r.normalized_score
        ));
    }
    stdout.write_all(out.as_bytes()).map_err(data)
}

fn strip_var(text: &str) -> Result<&str, CliError> {
    text.strip_prefix('?')
        .filter(|v| !v.is_empty())
        .ok_or_else(|| usage(format!("expected a ?variable, got {text:?}")))
}

/// Builds a query from command-line strings.
pub fn build_query(
    clauses: &[String],
    filters: &[String],
    order_by: Option<&str>,
    limit: Option<usize>,
) -> Result<QueryPattern, CliError> {
    let mut parsed = Vec::with_capacity(clauses.len());
    for text in clauses {
        let terms = parse_pattern_terms(text).map_err(|e| usage(format!("--where {text:?}: {e}")))?;
        let terms: [PatternTerm; 4] = terms
            .try_into()
            .map_err(|_| usage(format!("--where {text:?}: expected subject, predicate, object and graph")))?;
        parsed.push(Clause(terms));
    }
    let mut query = QueryPattern::new(parsed);
    for text in filters {
        let parts: Vec<&str> = text.split_whitespace().collect();
        let [var, op, value] = parts.as_slice() else {
            return Err(usage(format!("--filter {text:?}: expected `?var OP number`")));
        };
        let comparator =
            Comparator::from_symbol(op).ok_or_else(|| usage(format!("--filter {text:?}: unknown comparator {op}")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| usage(format!("--filter {text:?}: {value} is not a number")))?;
        query = query.filter(strip_var(var)?, comparator, value);
    }
    if let Some(text) = order_by {
        let parts: Vec<&str> = text.split_whitespace().collect();
        let (var, direction) = match parts.as_slice() {
            [var] => (*var, SortDirection::Asc),
            [var, dir] if dir.eq_ignore_ascii_case("asc") => (*var, SortDirection::Asc),
            [var, dir] if dir.eq_ignore_ascii_case("desc") => (*var, SortDirection::Desc),
            _ => return Err(usage(format!("--order-by {text:?}: expected `?var [asc|desc]`"))),
        };
        query = query.order_by(strip_var(var)?, direction);
    }
    if let Some(limit) = limit {
        query = query.limit(limit);
    }
    query.validate().map_err(|e| usage(e.to_string()))?;
    Ok(query)
}

fn cmd_query(store_dir: &StoreDir, query: &QueryPattern, stdout: &mut dyn Write) -> Result<(), CliError> {
    let store = load_store(store_dir)?;
    let result = execute(&store, query).map_err(|e| usage(e.to_string()))?;
    let mut out = result
        .variables
        .iter()
        .map(|v| format!("?{v}"))
        .collect::<Vec<_>>()
        .join("\t");
    out.push('\n');
    for row in &result.rows {
        let cells: Vec<String> = result
            .variables
            .iter()
            .map(|v| row.get(v).map(ToString::to_string).unwrap_or_default())
            .collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    stdout.write_all(out.as_bytes()).map_err(data)
}

pub const REPORT_CSV: &str = "report.csv";
pub const SERIES_CSV: &str = "series.csv";
pub const TABLES_TXT: &str = "tables.txt";
pub const SCENARIO_JSONL: &str = "scenario.jsonl";

fn cmd_replay(
    config: Option<&Path>,
    scenario: Option<&Path>,
    out: &Path,
    algorithms: &[ReplayAlgorithm],
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg: ScenarioConfig = match config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_error(path))?;
            serde_json::from_str(&text).map_err(|e| data(format!("{}: {e}", path.display())))?
        }
        None => ScenarioConfig::default(),
    };
    cfg.validate().map_err(|e| usage(format!("config: {e}")))?;
    let messages: Vec<ScenarioMessage> = match scenario {
        Some(path) => {
            let file = fs::File::open(path).map_err(io_error(path))?;
            read_scenario(BufReader::new(file)).map_err(|e| data(format!("{}: {e}", path.display())))?
        }
        None => generate_scenario(&cfg).map_err(|e| usage(format!("config: {e}")))?,
    };

    let store_dir = StoreDir::new(out);
    if store_dir.quads_path().exists() || !store_dir.documents().keys().map_err(data)?.is_empty() {
        return Err(usage(format!("{}: output directory already holds a store", out.display())));
    }
    fs::create_dir_all(out).map_err(io_error(out))?;

    let descriptors: Vec<AnalyticDescriptor> = algorithms.iter().map(|a| a.descriptor()).collect();
    let every = usize::try_from(cfg.resample_every).unwrap_or(usize::MAX);
    let broker = Broker::new(QuadStore::new(), store_dir.documents());
    let outcome = replay_messages(broker, &messages, every, &descriptors, &AnalyticParams::default(), |_| {})
        .map_err(|e| match e {
            ReplayError::Config(_) | ReplayError::ZeroCadence | ReplayError::UnsupportedAlgorithm(_) => {
                usage(e.to_string())
            }
            _ => data(e),
        })?;

    store_dir.save(outcome.broker.store()).map_err(data)?;
    let write = |name: &str, bytes: &[u8]| {
        let path = out.join(name);
        fs::write(&path, bytes).map_err(io_error(&path))
    };
    let mut buf = Vec::new();
    write_summary_csv(&outcome.report, &mut buf).map_err(data)?;
    write(REPORT_CSV, &buf)?;
    buf.clear();
    write_series_csv(&outcome.report, &mut buf).map_err(data)?;
    write(SERIES_CSV, &buf)?;
    buf.clear();
    write_scenario(&messages, &mut buf).map_err(data)?;
    write(SCENARIO_JSONL, &buf)?;
    let tables: Vec<String> = descriptors
        .iter()
        .map(|d| outcome.report.render_table(d.algorithm(), 5))
        .collect();
    write(TABLES_TXT, tables.join("\n").as_bytes())?;

    writeln!(
        stdout,
        "{} messages\t{} resamples\t{} quads",
        messages.len(),
        outcome.resamples.len(),
        outcome.broker.store().len()
    )
    .map_err(data)
}
