use std::fs::File;
use std::io::{self, BufReader, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use pennant_core::{
    build_pennant, emit_json, emit_svg, load_index, normalize_id, parse_corpus, save_index, CoMentionIndex,
    CorpusFormat, DocumentRecord, IndexError, IngestReport, LabelPolicy, Mode, PennantError, PlotSpec, RenderError,
};
use pennant_service::{AppState, ServiceConfig, MAX_K};

use crate::{Format, ScoringArgs};

pub const EXIT_FATAL: u8 = 1;
pub const EXIT_DEGENERATE: u8 = 2;
pub const EXIT_UNKNOWN_SEED: u8 = 3;

/// A failed command: exit code, log message, and an optional JSON line for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    pub json: Option<String>,
}

impl Failure {
    fn fatal(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FATAL,
            message: message.into(),
            json: None,
        }
    }

    fn degenerate(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DEGENERATE,
            message: message.into(),
            json: None,
        }
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn read_corpus(path: &Path) -> Result<(Vec<DocumentRecord>, IngestReport), Failure> {
    let file = File::open(path).map_err(|e| Failure::fatal(format!("cannot open {}: {e}", path.display())))?;
    let (records, report) = parse_corpus(BufReader::new(file), CorpusFormat::Jsonl)
        .map_err(|e| Failure::fatal(format!("{}: {e}", path.display())))?;
    for r in &report.rejects {
        tracing::warn!("{}:{}: {}", path.display(), r.line, r.reason);
    }
    Ok((records, report))
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    let result = match out {
        Some(path) => std::fs::write(path, bytes),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush())
        }
    };
    result.map_err(|e| Failure::fatal(format!("write failed: {e}")))
}

fn open_index(path: &Path) -> Result<CoMentionIndex, Failure> {
    load_index(path).map_err(|e| match e {
        IndexError::Io(e) => Failure::fatal(format!("cannot read {}: {e}", path.display())),
        e => Failure::fatal(format!("{}: {e}", path.display())),
    })
}

pub fn ingest(corpus: &Path, report_path: Option<&Path>) -> CmdResult {
    let (_, report) = read_corpus(corpus)?;
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    write_output(report_path, json.as_bytes())?;
    tracing::info!(
        "accepted {} records, rejected {}",
        report.records_accepted,
        report.records_rejected
    );
    if report.records_accepted == 0 {
        return Err(Failure::degenerate("no records accepted"));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn build_index(corpus: &Path, mode: Mode, out: &Path) -> CmdResult {
    let (records, _) = read_corpus(corpus)?;
    let index = pennant_core::build_index(&records, mode).map_err(|e| match e {
        IndexError::EmptyCorpus => Failure::degenerate("empty corpus"),
        e => Failure::fatal(e.to_string()),
    })?;
    save_index(&index, out).map_err(|e| Failure::fatal(format!("cannot write {}: {e}", out.display())))?;
    write_output(None, format!("n_docs={} n_keys={}\n", index.n_docs(), index.n_keys()).as_bytes())?;
    if index.n_keys() == 0 {
        return Err(Failure::degenerate(format!("corpus has no {mode} mentions; index has no keys")));
    }
    Ok(ExitCode::SUCCESS)
}

fn label_policy(s: &str) -> Result<LabelPolicy, Failure> {
    match s {
        "all" => Ok(LabelPolicy::All),
        "none" => Ok(LabelPolicy::None),
        n => n
            .parse()
            .map(LabelPolicy::TopN)
            .map_err(|_| Failure::degenerate(format!("invalid --labels {n:?}"))),
    }
}

pub fn pennant(
    index_path: &Path,
    seed: &str,
    scoring: &ScoringArgs,
    format: Format,
    labels: &str,
    out: Option<&Path>,
) -> CmdResult {
    let index = open_index(index_path)?;
    let seed = normalize_id(seed);
    let config = scoring.config(index.mode());
    let diagram = build_pennant(&index, &seed, &config).map_err(|e| match e {
        PennantError::SeedNotFound(s) => Failure {
            code: EXIT_UNKNOWN_SEED,
            message: format!("seed {s:?} not found"),
            json: Some(serde_json::json!({ "error": "seed not found", "seed": s }).to_string()),
        },
        e => Failure::degenerate(e.to_string()),
    })?;
    let body = match format {
        Format::Json => emit_json(&diagram),
        Format::Svg => {
            let spec = PlotSpec {
                label_policy: label_policy(labels)?,
                ..PlotSpec::default()
            };
            emit_svg(&diagram, &spec).map_err(|e| match e {
                RenderError::DegenerateAxis => Failure::degenerate("degenerate axis: corpus has a single document"),
                e => Failure::degenerate(e.to_string()),
            })?
        }
    };
    write_output(out, body.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

pub fn stats(index_path: &Path) -> CmdResult {
    let index = open_index(index_path)?;
    let mode = index.mode();
    let state = AppState::new(vec![index], pennant_core::PennantConfig::with_mode(mode), MAX_K)
        .map_err(|e| Failure::fatal(e.to_string()))?;
    let mut json = serde_json::to_string_pretty(&state.stats()).expect("stats serialize");
    json.push('\n');
    write_output(None, json.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

pub fn serve(
    index: PathBuf,
    index2: Option<PathBuf>,
    bind: SocketAddr,
    static_dir: Option<PathBuf>,
    cors_origin: Option<String>,
    scoring: &ScoringArgs,
) -> CmdResult {
    let mut config = ServiceConfig::new(bind, std::iter::once(index).chain(index2).collect());
    config.defaults = scoring.config(Mode::Citation);
    config.static_dir = static_dir;
    config.cors_origin = cors_origin;
    config
        .defaults
        .validate()
        .map_err(|e| Failure::degenerate(e.to_string()))?;

    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::fatal(e.to_string()))?;
    runtime
        .block_on(pennant_service::serve(config, async {
            let _ = tokio::signal::ctrl_c().await;
            tracing::info!("shutting down");
        }))
        .map_err(|e| Failure::fatal(e.to_string()))?;
    Ok(ExitCode::SUCCESS)
}
