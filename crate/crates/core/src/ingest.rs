//! Corpus parsing and ID normalization.
//!
//! A corpus is UTF-8 JSONL, one citing document per line:
//!
//! ```text
//! {"id": "d1", "title": "...", "references": ["W1", "W2"], "descriptors": ["t"], "year": 2013}
//! ```
//!
//! Only `id` is required. Bad lines are rejected individually and reported; the
//! only fatal condition is an I/O error on the underlying reader.

use std::collections::HashSet;
use std::io::{self, BufRead};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to read corpus: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusFormat {
    #[default]
    Jsonl,
}

/// One citing document after normalization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    #[serde(rename = "id")]
    pub doc_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default)]
    pub references: Vec<String>,
    #[serde(default)]
    pub descriptors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i64>,
}

impl DocumentRecord {
    pub fn new(doc_id: impl Into<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            title: None,
            references: Vec::new(),
            descriptors: Vec::new(),
            year: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub records_accepted: usize,
    pub records_rejected: usize,
    pub rejects: Vec<Reject>,
    pub duplicate_doc_ids: Vec<String>,
}

impl IngestReport {
    fn reject(&mut self, line: usize, reason: &str) {
        self.records_rejected += 1;
        self.rejects.push(Reject {
            line,
            reason: reason.to_string(),
        });
    }
}

/// Wire shape of a corpus line; nulls are accepted wherever a field is optional.
#[derive(Deserialize)]
struct RawLine {
    id: Option<String>,
    title: Option<String>,
    references: Option<Vec<String>>,
    descriptors: Option<Vec<String>>,
    year: Option<i64>,
}

/// NFC-normalizes, trims, and collapses internal whitespace runs to one space.
/// Case is preserved.
pub fn normalize_id(raw: &str) -> String {
    let composed: String = raw.nfc().collect();
    let mut out = String::with_capacity(composed.len());
    for (i, word) in composed.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Normalizes each ID, dropping empties and later duplicates (first occurrence
/// keeps its position).
fn normalize_list(raw: Vec<String>) -> Vec<String> {
    let mut seen = HashSet::with_capacity(raw.len());
    raw.iter()
        .map(|s| normalize_id(s))
        .filter(|s| !s.is_empty() && seen.insert(s.clone()))
        .collect()
}

/// Parses a corpus stream. Line numbers in the report are 1-based and count
/// blank lines.
pub fn parse_corpus<R: BufRead>(
    mut reader: R,
    format: CorpusFormat,
) -> Result<(Vec<DocumentRecord>, IngestReport), IngestError> {
    let CorpusFormat::Jsonl = format;
    let mut records = Vec::new();
    let mut report = IngestReport::default();
    let mut seen_ids = HashSet::new();
    let mut buf = Vec::new();
    let mut line_no = 0usize;

    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;

        let Ok(text) = std::str::from_utf8(&buf) else {
            report.reject(line_no, "invalid utf-8");
            continue;
        };
        let text = text.trim();
        if text.is_empty() {
            continue;
        }

        let raw: RawLine = match serde_json::from_str(text) {
            Ok(raw) => raw,
            Err(_) => {
                report.reject(line_no, "parse error");
                continue;
            }
        };
        let Some(id) = raw.id else {
            report.reject(line_no, "missing id");
            continue;
        };
        let doc_id = normalize_id(&id);
        if doc_id.is_empty() {
            report.reject(line_no, "empty id");
            continue;
        }
        if !seen_ids.insert(doc_id.clone()) {
            report.reject(line_no, "duplicate doc_id");
            report.duplicate_doc_ids.push(doc_id);
            continue;
        }

        records.push(DocumentRecord {
            doc_id,
            title: raw.title,
            references: normalize_list(raw.references.unwrap_or_default()),
            descriptors: normalize_list(raw.descriptors.unwrap_or_default()),
            year: raw.year,
        });
        report.records_accepted += 1;
    }

    Ok((records, report))
}
