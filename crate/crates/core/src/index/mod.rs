//! Immutable co-mention index.
//!
//! Documents get dense ordinals in input order and mention keys get ordinals in
//! byte-lexicographic order, so postings (key -> citing documents) and forward
//! lists (document -> mentioned keys) are both sorted integer runs. Both sides
//! are kept in compressed-row form.

mod intersect;
mod persist;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::DocumentRecord;

pub use intersect::{intersect, intersection_count};
pub use persist::{load_index, save_index, IndexHeader, FORMAT_VERSION};

pub type DocOrdinal = u32;
pub(crate) type KeyOrdinal = u32;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("duplicate doc_id {0:?}")]
    DuplicateDocId(String),
    #[error("corpus too large for 32-bit ordinals")]
    TooLarge,
    #[error("unsupported index version {0}")]
    UnsupportedVersion(u32),
    #[error("corrupt index: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// What the index counts: cited works or assigned descriptors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Citation,
    Descriptor,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Citation => "citation",
            Mode::Descriptor => "descriptor",
        }
    }

    fn mentions(self, record: &DocumentRecord) -> &[String] {
        match self {
            Mode::Citation => &record.references,
            Mode::Descriptor => &record.descriptors,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "citation" => Ok(Mode::Citation),
            "descriptor" => Ok(Mode::Descriptor),
            other => Err(format!("unknown mode {other:?} (expected citation or descriptor)")),
        }
    }
}

/// Display metadata for one citing document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocEntry {
    pub doc_id: String,
    pub title: Option<String>,
    pub year: Option<i64>,
}

/// Documents mentioning one key, ascending by ordinal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PostingList<'a> {
    pub key: &'a str,
    pub docs: &'a [DocOrdinal],
}

impl PostingList<'_> {
    pub fn df(&self) -> u32 {
        self.docs.len() as u32
    }
}

/// Compressed rows: row `i` is `data[offsets[i]..offsets[i + 1]]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct Csr {
    pub offsets: Vec<usize>,
    pub data: Vec<u32>,
}

impl Csr {
    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn n_rows(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Transpose into `n_cols` rows. Rows of the result come out ascending
    /// because the source rows are visited in order.
    pub fn transpose(&self, n_cols: usize) -> Csr {
        let mut counts = vec![0usize; n_cols + 1];
        for &c in &self.data {
            counts[c as usize + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let offsets = counts.clone();
        let mut cursor = counts;
        let mut data = vec![0u32; self.data.len()];
        for r in 0..self.n_rows() {
            for &c in self.row(r) {
                let slot = &mut cursor[c as usize];
                data[*slot] = r as u32;
                *slot += 1;
            }
        }
        Csr { offsets, data }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoMentionIndex {
    mode: Mode,
    docs: Vec<DocEntry>,
    keys: Vec<String>,
    postings: Csr,
    forward: Csr,
    doc_lookup: HashMap<String, DocOrdinal>,
}

/// Builds an index over `records` in the given mode. Records without any
/// mention still count toward `n_docs`. Mention lists are deduplicated and
/// empty strings ignored, so un-normalized input is tolerated.
pub fn build_index(records: &[DocumentRecord], mode: Mode) -> Result<CoMentionIndex, IndexError> {
    if records.is_empty() {
        return Err(IndexError::EmptyCorpus);
    }
    if records.len() >= u32::MAX as usize {
        return Err(IndexError::TooLarge);
    }

    let mut doc_lookup = HashMap::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        if doc_lookup.insert(r.doc_id.clone(), i as DocOrdinal).is_some() {
            return Err(IndexError::DuplicateDocId(r.doc_id.clone()));
        }
    }

    let mut all: Vec<&str> = records
        .iter()
        .flat_map(|r| mode.mentions(r))
        .map(String::as_str)
        .filter(|s| !s.is_empty())
        .collect();
    all.sort_unstable();
    all.dedup();
    if all.len() >= u32::MAX as usize {
        return Err(IndexError::TooLarge);
    }
    let key_ids: HashMap<&str, KeyOrdinal> = all
        .iter()
        .enumerate()
        .map(|(i, k)| (*k, i as KeyOrdinal))
        .collect();

    let mut forward = Csr {
        offsets: Vec::with_capacity(records.len() + 1),
        data: Vec::new(),
    };
    forward.offsets.push(0);
    for r in records {
        let start = forward.data.len();
        forward.data.extend(
            mode.mentions(r)
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| key_ids[s.as_str()]),
        );
        let row = &mut forward.data[start..];
        row.sort_unstable();
        let mut w = 0;
        for i in 0..row.len() {
            if i == 0 || row[i] != row[w - 1] {
                row[w] = row[i];
                w += 1;
            }
        }
        forward.data.truncate(start + w);
        forward.offsets.push(forward.data.len());
    }

    let keys: Vec<String> = all.into_iter().map(str::to_owned).collect();
    let postings = forward.transpose(keys.len());
    let docs = records
        .iter()
        .map(|r| DocEntry {
            doc_id: r.doc_id.clone(),
            title: r.title.clone(),
            year: r.year,
        })
        .collect();

    Ok(CoMentionIndex {
        mode,
        docs,
        keys,
        postings,
        forward,
        doc_lookup,
    })
}

impl CoMentionIndex {
    /// Assembles an index from a document table, a sorted key dictionary and
    /// its postings, validating every structural invariant.
    pub(crate) fn from_postings(
        mode: Mode,
        docs: Vec<DocEntry>,
        keys: Vec<String>,
        postings: Csr,
    ) -> Result<Self, String> {
        if docs.is_empty() {
            return Err("no documents".into());
        }
        if postings.n_rows() != keys.len() {
            return Err("key count does not match postings".into());
        }
        if keys.windows(2).any(|w| w[0] >= w[1]) {
            return Err("key dictionary not strictly sorted".into());
        }
        for (k, key) in keys.iter().enumerate() {
            let row = postings.row(k);
            if row.is_empty() {
                return Err(format!("empty posting list for {key:?}"));
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("posting list for {key:?} not ascending"));
            }
            if *row.last().unwrap() as usize >= docs.len() {
                return Err(format!("posting for {key:?} out of range"));
            }
        }
        let mut doc_lookup = HashMap::with_capacity(docs.len());
        for (i, d) in docs.iter().enumerate() {
            if doc_lookup.insert(d.doc_id.clone(), i as DocOrdinal).is_some() {
                return Err(format!("duplicate doc_id {:?}", d.doc_id));
            }
        }
        let forward = postings.transpose(docs.len());
        Ok(Self {
            mode,
            docs,
            keys,
            postings,
            forward,
            doc_lookup,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Number of documents, the `N` of idf.
    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn n_keys(&self) -> usize {
        self.keys.len()
    }

    /// Total number of (document, key) incidences.
    pub fn n_mentions(&self) -> usize {
        self.postings.data.len()
    }

    pub fn docs(&self) -> &[DocEntry] {
        &self.docs
    }

    pub fn doc(&self, ordinal: DocOrdinal) -> &DocEntry {
        &self.docs[ordinal as usize]
    }

    pub fn doc_ordinal(&self, doc_id: &str) -> Option<DocOrdinal> {
        self.doc_lookup.get(doc_id).copied()
    }

    /// All keys in ascending order.
    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub(crate) fn key_ordinal(&self, key: &str) -> Option<KeyOrdinal> {
        self.keys
            .binary_search_by(|k| k.as_str().cmp(key))
            .ok()
            .map(|i| i as KeyOrdinal)
    }

    pub(crate) fn key(&self, ordinal: KeyOrdinal) -> &str {
        &self.keys[ordinal as usize]
    }

    pub(crate) fn postings_row(&self, ordinal: KeyOrdinal) -> &[DocOrdinal] {
        self.postings.row(ordinal as usize)
    }

    pub(crate) fn forward_row(&self, doc: DocOrdinal) -> &[KeyOrdinal] {
        self.forward.row(doc as usize)
    }

    pub(crate) fn postings_csr(&self) -> &Csr {
        &self.postings
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.key_ordinal(key).is_some()
    }

    pub fn postings(&self, key: &str) -> Option<PostingList<'_>> {
        self.key_ordinal(key).map(|k| PostingList {
            key: self.key(k),
            docs: self.postings_row(k),
        })
    }

    pub fn iter_postings(&self) -> impl Iterator<Item = PostingList<'_>> {
        (0..self.keys.len()).map(move |k| PostingList {
            key: &self.keys[k],
            docs: self.postings.row(k),
        })
    }

    /// Documents mentioning `key`; empty for unknown keys.
    pub fn citing_set(&self, key: &str) -> &[DocOrdinal] {
        self.key_ordinal(key)
            .map_or(&[][..], |k| self.postings_row(k))
    }

    pub fn df(&self, key: &str) -> u32 {
        self.citing_set(key).len() as u32
    }

    /// Keys mentioned by one document, ascending.
    pub fn forward(&self, doc: DocOrdinal) -> impl Iterator<Item = &str> + '_ {
        self.forward_row(doc).iter().map(move |&k| self.key(k))
    }

    /// Number of documents mentioning both `a` and `b`.
    pub fn co_mention_count(&self, a: &str, b: &str) -> u32 {
        intersection_count(self.citing_set(a), self.citing_set(b)) as u32
    }
}
