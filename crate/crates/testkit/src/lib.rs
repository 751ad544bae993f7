//! Test support shared by the workspace: fixture corpora, random and synthetic
//! corpus generators, and a naive quadratic reference implementation of the
//! pennant computation.
//!
//! Nothing in here depends on `pennant-core`. The reference path recounts
//! everything from raw records with hash sets and uses base-2 logarithms, so it
//! shares neither data structures nor arithmetic with the indexed path.

use std::collections::{BTreeSet, HashSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

/// A citing document as plain strings.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDoc {
    pub id: String,
    pub title: Option<String>,
    pub references: Vec<String>,
    pub descriptors: Vec<String>,
}

impl RawDoc {
    pub fn new(id: &str, references: &[&str]) -> Self {
        Self {
            id: id.to_string(),
            title: None,
            references: references.iter().map(|s| s.to_string()).collect(),
            descriptors: Vec::new(),
        }
    }

    pub fn mentions(&self, descriptor_mode: bool) -> &[String] {
        if descriptor_mode {
            &self.descriptors
        } else {
            &self.references
        }
    }
}

/// The six-document citation fixture:
/// d1:{S,A}, d2:{S,A,B}, d3:{S,B}, d4:{A}, d5:{B,C}, d6:{S,C}.
pub fn corpus6() -> Vec<RawDoc> {
    vec![
        RawDoc::new("d1", &["S", "A"]),
        RawDoc::new("d2", &["S", "A", "B"]),
        RawDoc::new("d3", &["S", "B"]),
        RawDoc::new("d4", &["A"]),
        RawDoc::new("d5", &["B", "C"]),
        RawDoc::new("d6", &["S", "C"]),
    ]
}

/// Serializes documents to the corpus JSONL format, one object per line.
pub fn to_jsonl(docs: &[RawDoc]) -> String {
    let mut out = String::new();
    for d in docs {
        let mut obj = serde_json::Map::new();
        obj.insert("id".into(), d.id.clone().into());
        if let Some(t) = &d.title {
            obj.insert("title".into(), t.clone().into());
        }
        obj.insert("references".into(), d.references.clone().into());
        obj.insert("descriptors".into(), d.descriptors.clone().into());
        out.push_str(&serde_json::Value::Object(obj).to_string());
        out.push('\n');
    }
    out
}

/// Random corpus with at most `max_docs` documents over at most `max_keys`
/// distinct reference keys (`k00`..) and as many descriptor keys (`t00`..).
/// Mention lists may contain duplicates; every document mentions at least one key.
pub fn random_corpus(rng: &mut impl Rng, max_docs: usize, max_keys: usize) -> Vec<RawDoc> {
    let n_docs = rng.random_range(1..=max_docs);
    let n_keys = rng.random_range(1..=max_keys);
    let refs: Vec<String> = (0..n_keys).map(|i| format!("k{i:02}")).collect();
    let descs: Vec<String> = (0..n_keys).map(|i| format!("t{i:02}")).collect();
    let max_len = rng.random_range(1..=n_keys.min(8));
    (0..n_docs)
        .map(|i| {
            let nr = rng.random_range(1..=max_len);
            let nd = rng.random_range(0..=max_len);
            RawDoc {
                id: format!("doc{i:04}"),
                title: if rng.random_bool(0.5) { Some(format!("Title {i}")) } else { None },
                references: (0..nr).map(|_| refs.choose(rng).unwrap().clone()).collect(),
                descriptors: (0..nd).map(|_| descs.choose(rng).unwrap().clone()).collect(),
            }
        })
        .collect()
}

/// Large deterministic corpus for throughput checks: `n_docs` documents citing
/// `total_refs` references in total, drawn Zipf-like from `n_works` works.
pub fn synthetic_corpus(n_docs: usize, total_refs: usize, n_works: usize, seed: u64) -> Vec<RawDoc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zipf = Zipf::new(n_works as f64, 1.07).expect("valid zipf");
    let per_doc = total_refs / n_docs;
    (0..n_docs)
        .map(|i| {
            let mut seen = HashSet::with_capacity(per_doc);
            let mut references = Vec::with_capacity(per_doc);
            while references.len() < per_doc {
                let w = zipf.sample(&mut rng) as usize;
                if seen.insert(w) {
                    references.push(format!("W{w}"));
                }
            }
            RawDoc {
                id: format!("D{i}"),
                title: None,
                references,
                descriptors: Vec::new(),
            }
        })
        .collect()
}

/// Naive recounts over raw records.
pub mod oracle {
    use super::*;

    fn mention_set(doc: &RawDoc, descriptor_mode: bool) -> HashSet<&str> {
        doc.mentions(descriptor_mode)
            .iter()
            .map(|s| s.as_str())
            .collect()
    }

    pub fn all_keys(docs: &[RawDoc], descriptor_mode: bool) -> BTreeSet<String> {
        docs.iter()
            .flat_map(|d| d.mentions(descriptor_mode).iter().cloned())
            .collect()
    }

    pub fn df(docs: &[RawDoc], descriptor_mode: bool, key: &str) -> u32 {
        docs.iter()
            .filter(|d| mention_set(d, descriptor_mode).contains(key))
            .count() as u32
    }

    pub fn tf(docs: &[RawDoc], descriptor_mode: bool, a: &str, b: &str) -> u32 {
        docs.iter()
            .filter(|d| {
                let s = mention_set(d, descriptor_mode);
                s.contains(a) && s.contains(b)
            })
            .count() as u32
    }

    /// Citing documents (by position in `docs`) mentioning `key`.
    pub fn citing(docs: &[RawDoc], descriptor_mode: bool, key: &str) -> Vec<usize> {
        docs.iter()
            .enumerate()
            .filter(|(_, d)| mention_set(d, descriptor_mode).contains(key))
            .map(|(i, _)| i)
            .collect()
    }

    #[derive(Debug, Clone)]
    pub struct Params {
        pub k: usize,
        pub min_tf: u32,
        pub base: f64,
        pub inverse_df: bool,
        pub absolute: Option<(f64, f64)>,
    }

    impl Default for Params {
        fn default() -> Self {
            Self {
                k: 100,
                min_tf: 1,
                base: 2.0,
                inverse_df: false,
                absolute: None,
            }
        }
    }

    #[derive(Debug, Clone, PartialEq)]
    pub struct Point {
        pub id: String,
        pub tf: u32,
        pub df: u32,
        pub ce: f64,
        pub ease: f64,
        pub sector: char,
    }

    /// Ease-axis sector bounds the reference expects.
    pub fn bounds(n_docs: usize, p: &Params) -> (f64, f64) {
        if let Some(b) = p.absolute {
            return b;
        }
        let top = (n_docs as f64).log2() / p.base.log2();
        let shift = if p.inverse_df { top } else { 0.0 };
        (top / 3.0 - shift, 2.0 * top / 3.0 - shift)
    }

    /// Full pennant recomputed by brute force. `None` if the seed is unknown.
    pub fn pennant(docs: &[RawDoc], descriptor_mode: bool, seed: &str, p: &Params) -> Option<Vec<Point>> {
        let keys = all_keys(docs, descriptor_mode);
        if !keys.contains(seed) {
            return None;
        }
        let n = docs.len() as f64;
        let lb = p.base.log2();
        let (b1, b2) = bounds(docs.len(), p);
        // tolerance absorbs rounding at mathematically exact boundaries
        let eps = if p.absolute.is_some() { 0.0 } else { 1e-9 };
        let mut pts: Vec<Point> = keys
            .iter()
            .filter(|k| k.as_str() != seed)
            .filter_map(|k| {
                let tf = tf(docs, descriptor_mode, seed, k);
                if tf == 0 || tf < p.min_tf {
                    return None;
                }
                let df = df(docs, descriptor_mode, k);
                let ce = (tf as f64).log2() / lb;
                let ease = if p.inverse_df {
                    -(df as f64).log2() / lb
                } else {
                    (n.log2() - (df as f64).log2()) / lb
                };
                let sector = if ease >= b2 - eps {
                    'A'
                } else if ease >= b1 - eps {
                    'B'
                } else {
                    'C'
                };
                Some(Point {
                    id: k.clone(),
                    tf,
                    df,
                    ce,
                    ease,
                    sector,
                })
            })
            .collect();
        pts.sort_by(|a, b| {
            b.ce.partial_cmp(&a.ce)
                .unwrap()
                .then(b.ease.partial_cmp(&a.ease).unwrap())
                .then(a.id.cmp(&b.id))
        });
        pts.truncate(p.k);
        Some(pts)
    }
}
