//! `novelty`: analyze books into novelty trajectories, cluster them, and
//! report corpus statistics.
//!
//! Exit status: 0 success, 1 data or domain failure, 2 usage or
//! configuration error.

mod plot;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use novelty_core::clustering::KMeansOptions;
use novelty_core::stats::{compare_corpora, correlate_records, summarize_corpus, NumericField};
use novelty_core::store::{cluster_store, export, export_trajectories, ingest, ExportField, ExportFormat, IngestOptions};
use novelty_core::{CurveClass, Error, Manifest, ProviderKind, RecordFilter, RunConfig, Store};
use serde_json::json;

#[derive(Parser)]
#[command(name = "novelty", version, about = "Semantic novelty trajectories of books")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Store directory
    #[arg(long, env = "NOVELTY_STORE", global = true)]
    store: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mock", global = true)]
    provider: ProviderArg,
    /// Base URL of the embedding service (service provider)
    #[arg(long, global = true)]
    service_url: Option<String>,
    /// Directory of `<book_id>.nvec` vector files (file provider)
    #[arg(long, global = true)]
    vector_dir: Option<PathBuf>,
    /// Embedding dimension
    #[arg(long, default_value_t = novelty_core::embedding::DEFAULT_DIMENSION, global = true)]
    dim: usize,
    /// Texts per embedding request
    #[arg(long, default_value_t = novelty_core::embedding::DEFAULT_BATCH_SIZE, global = true)]
    batch_size: usize,
    /// Seed for clustering and the mock embedder
    #[arg(long, default_value_t = novelty_core::config::DEFAULT_SEED, global = true)]
    seed: u64,
    /// PAA segments
    #[arg(long, default_value_t = novelty_core::descriptors::DEFAULT_SEGMENTS, global = true)]
    segments: usize,
    /// SAX alphabet size
    #[arg(long, default_value_t = novelty_core::descriptors::DEFAULT_ALPHABET, global = true)]
    alphabet: usize,
    /// Slope threshold separating rising/falling from flat curves
    #[arg(long, default_value_t = novelty_core::descriptors::DEFAULT_EPSILON, global = true, allow_hyphen_values = true)]
    epsilon: f64,
    /// Number of clusters
    #[arg(long, default_value_t = novelty_core::clustering::DEFAULT_K, global = true)]
    k: usize,
    /// Worker threads (default: available cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Machine-readable JSON output
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProviderArg {
    Mock,
    File,
    Service,
}

#[derive(Args, Default)]
struct FilterArgs {
    #[arg(long)]
    corpus: Option<String>,
    #[arg(long)]
    genre: Option<String>,
    /// Red, Blue or Green
    #[arg(long)]
    curve: Option<String>,
    /// Cluster label
    #[arg(long)]
    cluster: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Segment, embed and describe every book in a manifest
    Analyze {
        manifest: PathBuf,
        /// Keep books already in the store instead of recomputing them
        #[arg(long)]
        skip_existing: bool,
    },
    /// Cluster PAA vectors (per corpus unless --unified) and label clusters
    Cluster {
        #[command(flatten)]
        filter: FilterArgs,
        /// Pool all corpora into one model
        #[arg(long)]
        unified: bool,
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        /// Directory for model files (default: <store>/models)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Corpus summaries, comparisons and correlations
    Stats {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, num_args = 2, value_names = ["CORPUS_A", "CORPUS_B"], conflicts_with = "correlate")]
        compare: Option<Vec<String>>,
        #[arg(long, num_args = 2, value_names = ["FIELD_X", "FIELD_Y"])]
        correlate: Option<Vec<String>>,
        #[arg(long, requires = "correlate")]
        control: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: StatsFormat,
        /// Write the report to a file instead of standard output
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Long-form trajectory CSV for one book or a filtered set, and an
    /// optional SVG chart of a single book
    Plot {
        book_id: Option<String>,
        #[command(flatten)]
        filter: FilterArgs,
        /// CSV destination (default: standard output)
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Export per-book records
    Export {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, default_value = "csv")]
        format: String,
        /// Comma-separated field names (default: all)
        #[arg(long, value_delimiter = ',')]
        fields: Vec<String>,
        /// One row per paragraph instead of one per book
        #[arg(long)]
        long_form: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatsFormat {
    Text,
    Csv,
    Json,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::UnknownField(_) => 2,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::from(e).into()
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run_config(g: &GlobalArgs) -> Result<RunConfig, Failure> {
    let store = g.store.clone().ok_or_else(|| Failure::usage("no store given (use --store or NOVELTY_STORE)"))?;
    let mut cfg = RunConfig::new(store);
    cfg.provider.kind = match g.provider {
        ProviderArg::Mock => ProviderKind::Mock,
        ProviderArg::File => ProviderKind::File,
        ProviderArg::Service => ProviderKind::Service,
    };
    cfg.provider.dimension = g.dim;
    cfg.provider.service_url = g.service_url.clone();
    cfg.provider.vector_dir = g.vector_dir.clone();
    cfg.provider.batch_size = g.batch_size;
    cfg.provider.seed = Some(g.seed);
    cfg.segments = g.segments;
    cfg.alphabet = g.alphabet;
    cfg.epsilon = g.epsilon;
    cfg.k = g.k;
    cfg.seed = g.seed;
    if let Some(j) = g.jobs {
        cfg.jobs = j;
    }
    cfg.validate()?;
    Ok(cfg)
}

impl FilterArgs {
    fn build(&self) -> Result<RecordFilter, Failure> {
        let curve = match &self.curve {
            Some(c) => Some(c.parse::<CurveClass>().map_err(|e| Failure::usage(e.to_string()))?),
            None => None,
        };
        Ok(RecordFilter { corpus: self.corpus.clone(), genre: self.genre.clone(), curve, cluster: self.cluster.clone() })
    }
}

fn run(cli: Cli) -> CmdResult {
    let cfg = run_config(&cli.global)?;
    let json = cli.global.json;
    match cli.command {
        Command::Analyze { manifest, skip_existing } => cmd_analyze(&cfg, &manifest, skip_existing, json),
        Command::Cluster { filter, unified, restarts, out } => {
            if restarts == 0 {
                return Err(Failure::usage("--restarts must be positive"));
            }
            cmd_cluster(&cfg, &filter.build()?, unified, restarts, out, json)
        }
        Command::Stats { filter, compare, correlate, control, format, output } => {
            let format = if json { StatsFormat::Json } else { format };
            let filter = filter.build()?;
            let mut out = output_writer(output.as_deref())?;
            let code = match (compare, correlate) {
                (Some(pair), _) => cmd_compare(&cfg, &filter, &pair[0], &pair[1], format, &mut out),
                (None, Some(pair)) => cmd_correlate(&cfg, &filter, &pair[0], &pair[1], control.as_deref(), format, &mut out),
                (None, None) => cmd_summary(&cfg, &filter, format, &mut out),
            }?;
            out.flush()?;
            Ok(code)
        }
        Command::Plot { book_id, filter, output, svg } => {
            cmd_plot(&cfg, book_id.as_deref(), &filter.build()?, output, svg, json)
        }
        Command::Export { filter, format, fields, long_form, output } => {
            let format: ExportFormat = format.parse()?;
            let fields = if fields.is_empty() { ExportField::ALL.to_vec() } else { ExportField::parse_list(&fields)? };
            cmd_export(&cfg, &filter.build()?, format, &fields, long_form, output, json)
        }
    }
}

fn output_writer(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(value: &serde_json::Value) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_analyze(cfg: &RunConfig, manifest: &Path, skip_existing: bool, json: bool) -> CmdResult {
    let params = cfg.descriptor_params()?;
    let provider = cfg.provider.build()?;
    let manifest = Manifest::from_path(manifest)?;
    let mut store = Store::open(&cfg.store)?;
    let opts = IngestOptions { params, jobs: cfg.jobs, skip_existing };
    let report = ingest(&mut store, &manifest, provider.as_ref(), &opts)?;

    if json {
        print_json(&serde_json::to_value(&report).map_err(Error::from)?)?;
    } else {
        println!("processed: {}", report.processed);
        println!("failed: {}", report.failed);
        println!("skipped: {}", report.skipped);
        for f in &report.failures {
            println!("  {}: {}", f.book_id, f.error);
        }
    }
    Ok(u8::from(report.failed > 0))
}

fn model_file_name(model_id: &str) -> String {
    let stem: String =
        model_id.chars().map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' }).collect();
    format!("{stem}.json")
}

fn cmd_cluster(
    cfg: &RunConfig,
    filter: &RecordFilter,
    unified: bool,
    restarts: usize,
    out: Option<PathBuf>,
    json: bool,
) -> CmdResult {
    let opts = KMeansOptions { restarts, ..KMeansOptions::new(cfg.k, cfg.seed) };
    let mut store = Store::open(&cfg.store)?;
    let runs = cluster_store(&mut store, filter, unified, &opts)?;

    let dir = out.unwrap_or_else(|| cfg.store.join("models"));
    fs::create_dir_all(&dir)?;
    let mut summaries = Vec::new();
    for run in &runs {
        let path = dir.join(model_file_name(&run.model_id));
        fs::write(&path, run.model.to_json()? + "\n")?;
        let prevalence = run.prevalence();
        if !json {
            println!("model {} ({} books, inertia {:.6}) -> {}", run.model_id, run.members.len(), run.model.inertia, path.display());
            for (label, count, pct) in &prevalence {
                println!("  {label:<20}{count:>8}{pct:>8.1}%");
            }
        }
        summaries.push(json!({
            "model_id": run.model_id,
            "path": path,
            "books": run.members.len(),
            "inertia": run.model.inertia,
            "prevalence": prevalence
                .iter()
                .map(|(label, count, pct)| json!({"label": label, "count": count, "percent": pct}))
                .collect::<Vec<_>>(),
        }));
    }
    if json {
        print_json(&json!({ "models": summaries }))?;
    }
    Ok(0)
}

fn cmd_summary(cfg: &RunConfig, filter: &RecordFilter, format: StatsFormat, out: &mut dyn Write) -> CmdResult {
    let store = Store::open_read_only(&cfg.store)?;
    let summary = summarize_corpus(store.records(), filter)?;
    match format {
        StatsFormat::Text => write!(out, "{}", summary.render())?,
        StatsFormat::Csv => summary.write_csv(out)?,
        StatsFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &summary).map_err(Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(0)
}

fn cmd_compare(
    cfg: &RunConfig,
    filter: &RecordFilter,
    a: &str,
    b: &str,
    format: StatsFormat,
    out: &mut dyn Write,
) -> CmdResult {
    let store = Store::open_read_only(&cfg.store)?;
    let side = |corpus: &str| {
        let f = RecordFilter { corpus: Some(corpus.to_owned()), ..filter.clone() };
        summarize_corpus(store.records(), &f).map_err(|e| match e {
            Error::EmptySelection => Failure { code: 1, message: format!("no records for corpus `{corpus}`") },
            e => e.into(),
        })
    };
    let (mut sa, mut sb) = (side(a)?, side(b)?);
    sa.label = a.to_owned();
    sb.label = b.to_owned();
    let report = compare_corpora(&sa, &sb);
    match format {
        StatsFormat::Text => write!(out, "{}", report.render())?,
        StatsFormat::Csv => report.write_csv(out)?,
        StatsFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &report).map_err(Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(0)
}

fn cmd_correlate(
    cfg: &RunConfig,
    filter: &RecordFilter,
    x: &str,
    y: &str,
    control: Option<&str>,
    format: StatsFormat,
    out: &mut dyn Write,
) -> CmdResult {
    let parse = |s: &str| s.parse::<NumericField>().map_err(Failure::from);
    let (fx, fy) = (parse(x)?, parse(y)?);
    let fz = control.map(parse).transpose()?;
    let store = Store::open_read_only(&cfg.store)?;
    let selected = store.query(filter);
    let report = correlate_records(selected.iter().copied(), fx, fy, fz).map_err(|e| match e {
        Error::EmptySelection => Failure { code: 1, message: format!("0 usable records ({} skipped)", selected.len()) },
        e => e.into(),
    })?;
    match format {
        StatsFormat::Text => {
            writeln!(out, "usable records: {}", report.usable)?;
            writeln!(out, "skipped: {}", report.skipped)?;
            writeln!(out, "r({x}, {y}) = {:.6}", report.r)?;
            if let (Some(p), Some(z)) = (report.partial_r, control) {
                writeln!(out, "partial r({x}, {y} | {z}) = {p:.6}")?;
            }
        }
        StatsFormat::Csv => {
            writeln!(out, "statistic,value")?;
            writeln!(out, "usable,{}", report.usable)?;
            writeln!(out, "skipped,{}", report.skipped)?;
            writeln!(out, "r,{}", report.r)?;
            if let Some(p) = report.partial_r {
                writeln!(out, "partial_r,{p}")?;
            }
        }
        StatsFormat::Json => {
            let doc = json!({
                "x": x, "y": y, "control": control,
                "usable": report.usable, "skipped": report.skipped,
                "r": report.r, "partial_r": report.partial_r,
            });
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(0)
}

fn cmd_plot(
    cfg: &RunConfig,
    book_id: Option<&str>,
    filter: &RecordFilter,
    output: Option<PathBuf>,
    svg: Option<PathBuf>,
    json: bool,
) -> CmdResult {
    let store = Store::open_read_only(&cfg.store)?;
    let records = match book_id {
        Some(id) => {
            let r = store.get(id).ok_or_else(|| Failure { code: 1, message: format!("unknown book_id `{id}`") })?;
            vec![r]
        }
        None => store.query(filter),
    };
    if records.is_empty() {
        return Err(Error::EmptySelection.into());
    }

    if let Some(path) = &svg {
        let [record] = records.as_slice() else {
            return Err(Failure::usage(format!("--svg needs a single book, selection has {}", records.len())));
        };
        fs::write(path, plot::render_svg(record))?;
    }
    let mut out = output_writer(output.as_deref())?;
    if json {
        let docs: Vec<serde_json::Value> = records
            .iter()
            .map(|r| {
                let d = r.descriptors.as_ref();
                json!({
                    "book_id": r.book_id,
                    "curve": d.map(|d| d.curve.name()),
                    "slope": d.map(|d| d.slope),
                    "paa": d.and_then(|d| d.paa.clone()),
                    "trajectory": r.trajectory,
                })
            })
            .collect();
        let doc = if book_id.is_some() { docs.into_iter().next().unwrap() } else { serde_json::Value::Array(docs) };
        serde_json::to_writer_pretty(&mut out, &doc).map_err(Error::from)?;
        writeln!(out)?;
    } else {
        export_trajectories(records.iter().copied(), ExportFormat::Csv, &mut out)?;
    }
    out.flush()?;
    Ok(0)
}

fn cmd_export(
    cfg: &RunConfig,
    filter: &RecordFilter,
    format: ExportFormat,
    fields: &[ExportField],
    long_form: bool,
    output: Option<PathBuf>,
    json: bool,
) -> CmdResult {
    let store = Store::open_read_only(&cfg.store)?;
    let records = store.query(filter);
    let format = if json { ExportFormat::Jsonl } else { format };
    let mut buf = Vec::new();
    if long_form {
        export_trajectories(records.iter().copied(), format, &mut buf)?;
    } else {
        export(records.iter().copied(), format, fields, &mut buf)?;
    }
    if json {
        // one JSON array instead of JSON lines
        let lines: Vec<&[u8]> = buf.split(|&b| b == b'\n').filter(|l| !l.is_empty()).collect();
        let mut doc = b"[".to_vec();
        doc.extend(lines.join(&b',').iter());
        doc.extend(b"]\n");
        buf = doc;
    }
    let mut out = output_writer(output.as_deref())?;
    out.write_all(&buf)?;
    out.flush()?;
    Ok(0)
}
