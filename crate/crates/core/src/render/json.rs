use super::RenderError;
use crate::pennant::PennantDiagram;

/// Serializes a diagram as one JSON document followed by a newline.
///
/// Key order follows the struct declarations, so equal diagrams always give
/// identical bytes. Floats use the shortest representation that parses back
/// to the same `f64`.
pub fn emit_json(diagram: &PennantDiagram) -> String {
    let mut out = serde_json::to_string(diagram).expect("diagram serializes");
    out.push('\n');
    out
}

pub fn parse_json(text: &str) -> Result<PennantDiagram, RenderError> {
    Ok(serde_json::from_str(text)?)
}
