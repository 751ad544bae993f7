//! Pennant-diagram recommendations over co-mention statistics.
//!
//! The pipeline is: [`ingest`] a JSONL corpus into [`DocumentRecord`]s, build an
//! immutable [`CoMentionIndex`] in citation or descriptor [`Mode`], then ask
//! [`build_pennant`] for the diagram around a seed. Each candidate that is
//! co-mentioned with the seed gets a cognitive-effect coordinate `log(tf)` and
//! an ease-of-processing coordinate `log(N/df)`, and falls into one of three
//! specificity sectors. [`render`] turns a diagram into JSON or SVG.

pub mod index;
pub mod ingest;
pub mod pennant;
pub mod render;

pub use index::{
    build_index, load_index, save_index, CoMentionIndex, DocEntry, DocOrdinal, IndexError,
    IndexHeader, Mode, PostingList, FORMAT_VERSION,
};
pub use ingest::{normalize_id, parse_corpus, CorpusFormat, DocumentRecord, IngestError, IngestReport, Reject};
pub use pennant::{
    build_pennant, candidates, classify_sector, score, IdfStyle, PennantConfig, PennantDiagram,
    PennantError, PennantPoint, Sector, SectorPolicy,
};
pub use render::{emit_json, emit_svg, parse_json, LabelPolicy, Margins, PlotSpec, RenderError};
