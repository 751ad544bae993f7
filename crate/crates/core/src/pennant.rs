//! Pennant diagrams: candidate co-mention counts, logged tf*idf coordinates,
//! ranking and sector classification.
//!
//! For a seed `s` and candidate `c` with co-mention count `tf` and global count
//! `df` in a corpus of `N` documents:
//!
//! * cognitive effect `ce = log_b(tf)` (x axis),
//! * ease of processing `ease = log_b(N / df)` (y axis; or `log_b(1 / df)`
//!   under [`IdfStyle::InverseDf`]).
//!
//! Larger ease means less predicted processing effort. Because `tf <= df`,
//! every point satisfies `ce + ease <= log_b(N)`, which gives the diagram its
//! pennant outline. Sectors split the ease axis: A on top (specific, "see also"
//! material), then B, then C (broadest).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index::{CoMentionIndex, KeyOrdinal, Mode};

#[derive(Debug, Error, PartialEq)]
pub enum PennantError {
    #[error("seed not found")]
    SeedNotFound(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("config mode {config} does not match index mode {index}")]
    ModeMismatch { config: Mode, index: Mode },
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdfStyle {
    /// `log(N / df)`
    #[default]
    NOverDf,
    /// `log(1 / df)`, the same axis shifted down by `log(N)`.
    InverseDf,
}

impl FromStr for IdfStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "n_over_df" => Ok(IdfStyle::NOverDf),
            "inverse_df" => Ok(IdfStyle::InverseDf),
            other => Err(format!("unknown idf style {other:?} (expected n_over_df or inverse_df)")),
        }
    }
}

/// How the two ease-axis sector boundaries are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SectorPolicy {
    /// Three equal-width bands over the achievable ease range.
    #[default]
    TercilesOfRange,
    Absolute { b1: f64, b2: f64 },
}

impl FromStr for SectorPolicy {
    type Err = String;

    /// Accepts `terciles` (or `terciles_of_range`) and `b1,b2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "terciles" || s == "terciles_of_range" {
            return Ok(SectorPolicy::TercilesOfRange);
        }
        let (b1, b2) = s
            .split_once(',')
            .ok_or_else(|| format!("invalid sectors {s:?} (expected terciles or b1,b2)"))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid sector bound {v:?}"))
        };
        Ok(SectorPolicy::Absolute {
            b1: parse(b1)?,
            b2: parse(b2)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PennantConfig {
    pub mode: Mode,
    pub k: usize,
    pub min_tf: u32,
    pub log_base: f64,
    pub idf_style: IdfStyle,
    pub sector_policy: SectorPolicy,
}

impl Default for PennantConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Citation,
            k: 100,
            min_tf: 1,
            log_base: 2.0,
            idf_style: IdfStyle::NOverDf,
            sector_policy: SectorPolicy::TercilesOfRange,
        }
    }
}

impl PennantConfig {
    pub fn with_mode(mode: Mode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), PennantError> {
        let bad = |m: String| Err(PennantError::InvalidConfig(m));
        if self.k < 1 {
            return bad("k must be at least 1".into());
        }
        if self.min_tf < 1 {
            return bad("min_tf must be at least 1".into());
        }
        if !(self.log_base.is_finite() && self.log_base > 1.0) {
            return bad(format!("log_base must be a finite number > 1, got {}", self.log_base));
        }
        if let SectorPolicy::Absolute { b1, b2 } = self.sector_policy {
            if !(b1.is_finite() && b2.is_finite() && b1 < b2) {
                return bad(format!("sector bounds must satisfy b1 < b2, got ({b1}, {b2})"));
            }
            // under inverse_df the whole ease axis is non-positive
            if self.idf_style == IdfStyle::NOverDf && b1 < 0.0 {
                return bad(format!("sector bound b1 must be >= 0, got {b1}"));
            }
        }
        Ok(())
    }

    fn log(&self, x: f64) -> f64 {
        x.ln() / self.log_base.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sector {
    A,
    B,
    C,
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::A => "A",
            Sector::B => "B",
            Sector::C => "C",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PennantPoint {
    #[serde(rename = "id")]
    pub candidate: String,
    pub tf: u32,
    pub df: u32,
    pub ce: f64,
    pub ease: f64,
    pub sector: Sector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
}

/// A ranked pennant around one seed. Field order is the JSON key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PennantDiagram {
    pub seed: String,
    pub mode: Mode,
    pub n_docs: u64,
    pub config: PennantConfig,
    pub sector_bounds: (f64, f64),
    pub points: Vec<PennantPoint>,
}

impl PennantDiagram {
    /// `(log_b N, log_b N)`: the largest achievable ce and the width of the
    /// ease range.
    pub fn axis_max(&self) -> (f64, f64) {
        let top = self.config.log(self.n_docs as f64);
        (top, top)
    }

    /// Achievable ease interval: `[0, log_b N]`, or `[-log_b N, 0]` for
    /// inverse df.
    pub fn ease_range(&self) -> (f64, f64) {
        ease_range(self.n_docs, &self.config)
    }
}

fn ease_range(n_docs: u64, config: &PennantConfig) -> (f64, f64) {
    let top = config.log(n_docs as f64);
    match config.idf_style {
        IdfStyle::NOverDf => (0.0, top),
        IdfStyle::InverseDf => (-top, 0.0),
    }
}

/// Sector boundaries `(b1, b2)` on the ease axis for a corpus of `n_docs`.
pub fn sector_bounds(n_docs: u64, config: &PennantConfig) -> (f64, f64) {
    match config.sector_policy {
        SectorPolicy::Absolute { b1, b2 } => (b1, b2),
        SectorPolicy::TercilesOfRange => {
            let (lo, hi) = ease_range(n_docs, config);
            let third = (hi - lo) / 3.0;
            (lo + third, lo + 2.0 * third)
        }
    }
}

/// `ease >= b2` is A, `b1 <= ease < b2` is B, anything lower is C.
pub fn classify_sector(ease: f64, sector_bounds: (f64, f64)) -> Sector {
    let (b1, b2) = sector_bounds;
    if ease >= b2 {
        Sector::A
    } else if ease >= b1 {
        Sector::B
    } else {
        Sector::C
    }
}

/// Tercile sector decided in integers: with `ease = log(N/df)` and range
/// `[0, log N]`, `ease >= 2/3 log N` iff `N >= df^3`, and `ease >= 1/3 log N`
/// iff `N^2 >= df^3`. Independent of base and idf style, and exact on the
/// boundaries where floating-point logs can land either side.
fn tercile_sector(df: u32, n_docs: u64) -> Sector {
    let n = u128::from(n_docs);
    let cube = u128::from(df).pow(3);
    if n >= cube {
        Sector::A
    } else if n * n >= cube {
        Sector::B
    } else {
        Sector::C
    }
}

/// `(ce, ease)` for one candidate. Requires `1 <= tf <= df <= N`.
pub fn score(tf: u32, df: u32, n_docs: u64, config: &PennantConfig) -> Result<(f64, f64), PennantError> {
    if !(1 <= tf && tf <= df && u64::from(df) <= n_docs) {
        return Err(PennantError::Domain(format!(
            "expected 1 <= tf <= df <= N, got tf={tf} df={df} N={n_docs}"
        )));
    }
    if !(config.log_base.is_finite() && config.log_base > 1.0) {
        return Err(PennantError::Domain(format!("log base {} is not > 1", config.log_base)));
    }
    let ce = config.log(f64::from(tf));
    let ease = match config.idf_style {
        IdfStyle::NOverDf => config.log(n_docs as f64 / f64::from(df)),
        // 0.0 - x keeps df = 1 at +0.0 rather than -0.0
        IdfStyle::InverseDf => 0.0 - config.log(f64::from(df)),
    };
    Ok((ce, ease))
}

/// Counts co-mentions of the seed by walking the forward lists of the seed's
/// citing documents. Returns `(key, tf)` in key order, seed excluded.
fn candidate_counts(index: &CoMentionIndex, seed: KeyOrdinal) -> Vec<(KeyOrdinal, u32)> {
    let mut counts = vec![0u32; index.n_keys()];
    let mut touched = Vec::new();
    for &doc in index.postings_row(seed) {
        for &k in index.forward_row(doc) {
            let c = &mut counts[k as usize];
            if *c == 0 {
                touched.push(k);
            }
            *c += 1;
        }
    }
    touched.sort_unstable();
    touched
        .into_iter()
        .filter(|&k| k != seed)
        .map(|k| (k, counts[k as usize]))
        .collect()
}

fn seed_ordinal(index: &CoMentionIndex, seed: &str) -> Result<KeyOrdinal, PennantError> {
    index
        .key_ordinal(seed)
        .ok_or_else(|| PennantError::SeedNotFound(seed.to_string()))
}

/// Every key co-mentioned with `seed` at least once, with its count, in
/// ascending key order.
pub fn candidates(index: &CoMentionIndex, seed: &str) -> Result<Vec<(String, u32)>, PennantError> {
    let seed = seed_ordinal(index, seed)?;
    Ok(candidate_counts(index, seed)
        .into_iter()
        .map(|(k, tf)| (index.key(k).to_string(), tf))
        .collect())
}

/// Builds the ranked pennant for `seed`.
///
/// Points are ordered by ce descending, ease descending, id ascending, which on
/// integer counts is tf descending, df ascending, key ascending. A seed with no
/// admissible candidates yields an empty diagram.
pub fn build_pennant(
    index: &CoMentionIndex,
    seed: &str,
    config: &PennantConfig,
) -> Result<PennantDiagram, PennantError> {
    config.validate()?;
    if config.mode != index.mode() {
        return Err(PennantError::ModeMismatch {
            config: config.mode,
            index: index.mode(),
        });
    }
    let seed_ord = seed_ordinal(index, seed)?;
    let n_docs = index.n_docs() as u64;

    let mut ranked: Vec<(KeyOrdinal, u32, u32)> = candidate_counts(index, seed_ord)
        .into_iter()
        .filter(|&(_, tf)| tf >= config.min_tf)
        .map(|(k, tf)| (k, tf, index.postings_row(k).len() as u32))
        .collect();
    let order = |a: &(KeyOrdinal, u32, u32), b: &(KeyOrdinal, u32, u32)| {
        b.1.cmp(&a.1).then(a.2.cmp(&b.2)).then(a.0.cmp(&b.0))
    };
    if ranked.len() > config.k {
        ranked.select_nth_unstable_by(config.k - 1, order);
        ranked.truncate(config.k);
    }
    ranked.sort_unstable_by(order);

    let bounds = sector_bounds(n_docs, config);
    let points = ranked
        .into_iter()
        .map(|(k, tf, df)| {
            let (ce, ease) = score(tf, df, n_docs, config)?;
            let sector = match config.sector_policy {
                SectorPolicy::TercilesOfRange => tercile_sector(df, n_docs),
                SectorPolicy::Absolute { .. } => classify_sector(ease, bounds),
            };
            let candidate = index.key(k).to_string();
            let title = match index.mode() {
                Mode::Citation => index
                    .doc_ordinal(&candidate)
                    .and_then(|d| index.doc(d).title.clone()),
                Mode::Descriptor => None,
            };
            Ok(PennantPoint {
                candidate,
                tf,
                df,
                ce,
                ease,
                sector,
                title,
            })
        })
        .collect::<Result<Vec<_>, PennantError>>()?;

    Ok(PennantDiagram {
        seed: seed.to_string(),
        mode: index.mode(),
        n_docs,
        config: *config,
        sector_bounds: bounds,
        points,
    })
}
