//! `pennant`: ingest corpora, build indexes, emit pennant diagrams, serve the API.
//!
//! Exit codes: 0 success, 1 I/O or other fatal error, 2 empty or degenerate
//! input (including invalid arguments), 3 unknown seed.

mod commands;

use std::io::IsTerminal;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pennant_core::{IdfStyle, Mode, PennantConfig, SectorPolicy};

#[derive(Debug, Parser)]
#[command(name = "pennant", version, about = "Pennant-diagram recommendations over citation and descriptor corpora")]
struct Cli {
    /// Only log errors.
    #[arg(long, global = true)]
    quiet: bool,

    #[arg(long, global = true, default_value = "info", value_name = "LEVEL")]
    log_level: tracing::Level,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a JSONL corpus and write an ingest report.
    Ingest {
        #[arg(long)]
        corpus: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build a co-mention index file from a corpus.
    BuildIndex {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit the pennant diagram for a seed.
    Pennant {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        seed: String,
        #[command(flatten)]
        scoring: ScoringArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// SVG labels: a count of top-ranked points, `all`, or `none`.
        #[arg(long, default_value = "25")]
        labels: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print index statistics as JSON.
    Stats {
        #[arg(long)]
        index: PathBuf,
    },
    /// Serve the HTTP API (and optionally a static UI bundle).
    Serve {
        #[arg(long)]
        index: PathBuf,
        /// Second index, in the other mode.
        #[arg(long)]
        index2: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
        /// Allowed CORS origin (`*` for any). Off by default.
        #[arg(long)]
        cors_origin: Option<String>,
        #[command(flatten)]
        scoring: ScoringArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Svg,
}

/// Scoring parameters. Flags override `PENNANT_*` variables, which override
/// the built-in defaults.
#[derive(Debug, Clone, Args)]
struct ScoringArgs {
    #[arg(long, env = "PENNANT_K")]
    k: Option<usize>,
    #[arg(long, env = "PENNANT_MIN_TF")]
    min_tf: Option<u32>,
    #[arg(long, env = "PENNANT_LOG_BASE")]
    log_base: Option<f64>,
    #[arg(long, value_parser = parse_idf_style)]
    idf_style: Option<IdfStyle>,
    /// `terciles` or explicit ease bounds `b1,b2`.
    #[arg(long, value_parser = parse_sectors, allow_hyphen_values = true)]
    sectors: Option<SectorPolicy>,
}

impl ScoringArgs {
    fn config(&self, mode: Mode) -> PennantConfig {
        let d = PennantConfig::with_mode(mode);
        PennantConfig {
            mode,
            k: self.k.unwrap_or(d.k),
            min_tf: self.min_tf.unwrap_or(d.min_tf),
            log_base: self.log_base.unwrap_or(d.log_base),
            idf_style: self.idf_style.unwrap_or(d.idf_style),
            sector_policy: self.sectors.unwrap_or(d.sector_policy),
        }
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_idf_style(s: &str) -> Result<IdfStyle, String> {
    s.parse()
}

fn parse_sectors(s: &str) -> Result<SectorPolicy, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { tracing::Level::ERROR } else { cli.log_level };
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_max_level(level)
        .with_target(false)
        .with_ansi(std::io::stderr().is_terminal())
        .init();

    let result = match cli.command {
        Command::Ingest { corpus, report } => commands::ingest(&corpus, report.as_deref()),
        Command::BuildIndex { corpus, mode, out } => commands::build_index(&corpus, mode, &out),
        Command::Pennant {
            index,
            seed,
            scoring,
            format,
            labels,
            out,
        } => commands::pennant(&index, &seed, &scoring, format, &labels, out.as_deref()),
        Command::Stats { index } => commands::stats(&index),
        Command::Serve {
            index,
            index2,
            bind,
            static_dir,
            cors_origin,
            scoring,
        } => commands::serve(index, index2, bind, static_dir, cors_origin, &scoring),
    };

    match result {
        Ok(code) => code,
        Err(failure) => {
            if let Some(json) = &failure.json {
                eprintln!("{json}");
            }
            tracing::error!("{}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
