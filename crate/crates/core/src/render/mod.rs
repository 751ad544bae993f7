//! Output formats for pennant diagrams.

mod json;
mod svg;

use thiserror::Error;

pub use json::{emit_json, parse_json};
pub use svg::{emit_svg, LabelPolicy, Margins, PlotSpec};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("degenerate axis")]
    DegenerateAxis,
    #[error("invalid plot spec: {0}")]
    InvalidSpec(String),
    #[error("invalid diagram json: {0}")]
    Json(#[from] serde_json::Error),
}
