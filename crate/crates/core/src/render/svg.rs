//! Static SVG pennant plot.
//!
//! Both axes span the achievable range for the corpus (`[0, log_b N]`, or
//! `[-log_b N, 0]` for ease under inverse df) rather than the data extent, so
//! plots for different seeds over the same index line up. Coordinates are
//! printed with three decimals and band edges are snapped before printing so
//! the three sector rectangles tile the plot area exactly.

use std::fmt::Write as _;

use super::RenderError;
use crate::pennant::{IdfStyle, PennantDiagram, Sector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margins {
    pub top: f64,
    pub right: f64,
    pub bottom: f64,
    pub left: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelPolicy {
    /// Label the first `n` points in rank order.
    TopN(usize),
    All,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub width: f64,
    pub height: f64,
    pub margins: Margins,
    pub label_policy: LabelPolicy,
    /// Fills for sectors A, B, C.
    pub sector_fills: [String; 3],
    pub font_size: f64,
}

impl Default for PlotSpec {
    fn default() -> Self {
        Self {
            width: 960.0,
            height: 640.0,
            margins: Margins {
                top: 30.0,
                right: 30.0,
                bottom: 60.0,
                left: 70.0,
            },
            label_policy: LabelPolicy::TopN(25),
            sector_fills: ["#d0d0d0".into(), "#e4e4e4".into(), "#f5f5f5".into()],
            font_size: 12.0,
        }
    }
}

impl PlotSpec {
    pub fn validate(&self) -> Result<(), RenderError> {
        let m = &self.margins;
        let all = [self.width, self.height, m.top, m.right, m.bottom, m.left, self.font_size];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(RenderError::InvalidSpec("dimensions must be finite and non-negative".into()));
        }
        if self.width <= m.left + m.right || self.height <= m.top + m.bottom {
            return Err(RenderError::InvalidSpec("margins leave no plot area".into()));
        }
        Ok(())
    }

    fn label_count(&self, n_points: usize) -> usize {
        match self.label_policy {
            LabelPolicy::TopN(n) => n.min(n_points),
            LabelPolicy::All => n_points,
            LabelPolicy::None => 0,
        }
    }
}

/// Affine map from data space into the plot rectangle; y grows upward.
struct Frame {
    x0: f64,
    x1: f64,
    y_top: f64,
    y_bottom: f64,
    ce_max: f64,
    ease_lo: f64,
    ease_hi: f64,
}

impl Frame {
    fn x(&self, ce: f64) -> f64 {
        snap(self.x0 + ce / self.ce_max * (self.x1 - self.x0))
    }

    fn y(&self, ease: f64) -> f64 {
        let t = (ease - self.ease_lo) / (self.ease_hi - self.ease_lo);
        snap(self.y_bottom - t * (self.y_bottom - self.y_top))
    }
}

fn snap(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

fn num(v: f64) -> String {
    let s = format!("{:.3}", snap(v));
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn sector_class(s: Sector) -> &'static str {
    match s {
        Sector::A => "sector-a",
        Sector::B => "sector-b",
        Sector::C => "sector-c",
    }
}

pub fn emit_svg(diagram: &PennantDiagram, spec: &PlotSpec) -> Result<String, RenderError> {
    spec.validate()?;
    let (ce_max, _) = diagram.axis_max();
    let (ease_lo, ease_hi) = diagram.ease_range();
    if !(ce_max.is_finite() && ce_max > 0.0) {
        return Err(RenderError::DegenerateAxis);
    }
    let m = &spec.margins;
    let f = Frame {
        x0: snap(m.left),
        x1: snap(spec.width - m.right),
        y_top: snap(m.top),
        y_bottom: snap(spec.height - m.bottom),
        ce_max,
        ease_lo,
        ease_hi,
    };
    let fs = spec.font_size;
    let mut s = String::new();

    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="{fs}">"#,
        w = num(spec.width),
        h = num(spec.height),
        fs = num(fs),
    );
    let _ = writeln!(s, "<title>pennant for {} ({})</title>", escape(&diagram.seed), diagram.mode);

    // sector bands, top to bottom
    let (b1, b2) = diagram.sector_bounds;
    let clamp = |b: f64| b.clamp(ease_lo, ease_hi);
    let y_b2 = f.y(clamp(b2));
    let y_b1 = f.y(clamp(b1));
    let bands = [
        (Sector::A, f.y_top, y_b2, &spec.sector_fills[0]),
        (Sector::B, y_b2, y_b1, &spec.sector_fills[1]),
        (Sector::C, y_b1, f.y_bottom, &spec.sector_fills[2]),
    ];
    let _ = writeln!(s, r#"<g class="sectors">"#);
    for (sector, top, bottom, fill) in &bands {
        let _ = writeln!(
            s,
            r#"<rect class="sector {cls}" x="{x}" y="{y}" width="{w}" height="{h}" fill="{fill}"/>"#,
            cls = sector_class(*sector),
            x = num(f.x0),
            y = num(*top),
            w = num(f.x1 - f.x0),
            h = num(bottom - top),
            fill = escape(fill),
        );
    }
    for (sector, top, bottom, _) in &bands {
        if bottom - top > 0.0 {
            let _ = writeln!(
                s,
                r#"<text class="sector-label" x="{x}" y="{y}" text-anchor="end" font-weight="bold">{sector}</text>"#,
                x = num(f.x1 - 6.0),
                y = num((top + bottom) / 2.0 + fs / 3.0),
            );
        }
    }
    let _ = writeln!(s, "</g>");

    // axes, ticks at whole log units, and the ce + ease = log N envelope
    let _ = writeln!(s, r##"<g class="axes" stroke="#333" fill="none">"##);
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{yb}" x2="{x1}" y2="{yb}"/>"#,
        x0 = num(f.x0),
        x1 = num(f.x1),
        yb = num(f.y_bottom),
    );
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{yt}" x2="{x0}" y2="{yb}"/>"#,
        x0 = num(f.x0),
        yt = num(f.y_top),
        yb = num(f.y_bottom),
    );
    let _ = writeln!(
        s,
        r#"<line class="envelope" x1="{x0}" y1="{yt}" x2="{x1}" y2="{yb}" stroke-dasharray="4 4"/>"#,
        x0 = num(f.x0),
        x1 = num(f.x1),
        yt = num(f.y_top),
        yb = num(f.y_bottom),
    );
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g class="ticks" fill="#333">"##);
    for t in (0..=ce_max.floor() as i64).map(|t| t as f64) {
        let x = f.x(t);
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" text-anchor="middle">{t}</text>"#,
            x = num(x),
            y = num(f.y_bottom + fs + 4.0),
        );
    }
    for t in (ease_lo.ceil() as i64..=ease_hi.floor() as i64).map(|t| t as f64) {
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" text-anchor="end">{t}</text>"#,
            x = num(f.x0 - 6.0),
            y = num(f.y(t) + fs / 3.0),
        );
    }
    let ease_title = match diagram.config.idf_style {
        IdfStyle::NOverDf => "ease of processing (log N/df)",
        IdfStyle::InverseDf => "ease of processing (log 1/df)",
    };
    let _ = writeln!(
        s,
        r#"<text class="axis-title" x="{x}" y="{y}" text-anchor="middle">cognitive effect (log tf)</text>"#,
        x = num((f.x0 + f.x1) / 2.0),
        y = num(spec.height - fs),
    );
    let _ = writeln!(
        s,
        r#"<text class="axis-title" x="{x}" y="{y}" text-anchor="middle" transform="rotate(-90 {x} {y})">{ease_title}</text>"#,
        x = num(fs * 1.5),
        y = num((f.y_top + f.y_bottom) / 2.0),
    );
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r##"<g class="markers" stroke="#222" stroke-width="0.5">"##);
    for p in &diagram.points {
        let fill = match p.sector {
            Sector::A => "#1f4e79",
            Sector::B => "#4f81bd",
            Sector::C => "#9dc3e6",
        };
        let _ = writeln!(
            s,
            r#"<circle class="marker {cls}" cx="{cx}" cy="{cy}" r="4" fill="{fill}" data-id="{id}"/>"#,
            cls = sector_class(p.sector),
            cx = num(f.x(p.ce)),
            cy = num(f.y(p.ease)),
            id = escape(&p.candidate),
        );
    }
    let _ = writeln!(s, "</g>");

    let n_labels = spec.label_count(diagram.points.len());
    let _ = writeln!(s, r##"<g class="labels" fill="#111">"##);
    for p in diagram.points.iter().take(n_labels) {
        let _ = writeln!(
            s,
            r#"<text class="label" x="{x}" y="{y}">{id}</text>"#,
            x = num(f.x(p.ce) + 5.0),
            y = num(f.y(p.ease) - 5.0),
            id = escape(&p.candidate),
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    Ok(s)
}
