//! Static SVG badges for an [`AnnotationDocument`].
//!
//! Every number drawn as text is the document's own display string, so the
//! badges never show a value the report does not contain. Output depends
//! only on the document; `created_at` is never drawn.

use std::fmt::Write as _;

use crate::annotation::{AnnotationDocument, CondCell, DependenceSection, Prob};
use crate::dependence::Magnitude;

/// Pattern id used to fill cells whose value is undefined.
pub const UNDEFINED_HATCH_ID: &str = "undefined-hatch";

const FONT: &str = "DejaVu Sans,Verdana,Geneva,sans-serif";
const INK: &str = "#263238";
const HEADER_FILL: &str = "#37474f";
const CELL_RGB: &str = "#1e88e5";
const BAR_FILL: &str = "#5c6bc0";
const TARGET_BAR_FILL: &str = "#26a69a";

const CELL_W: f64 = 64.0;
const CELL_H: f64 = 22.0;
const LABEL_W: f64 = 150.0;
const BAR_MAX_H: f64 = 100.0;
const BAR_W: f64 = 28.0;
const BAR_GAP: f64 = 14.0;

fn magnitude_color(m: Magnitude) -> &'static str {
    match m {
        Magnitude::VerySmall => "#43a047",
        Magnitude::Small => "#c0ca33",
        Magnitude::Medium => "#fb8c00",
        Magnitude::Large => "#e53935",
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadgeSet {
    pub dependence: String,
    pub diverseness: String,
    pub inclusiveness: String,
    pub likelihood: String,
}

impl BadgeSet {
    /// `(file name, svg)` pairs, named after the dataset.
    pub fn files(&self, dataset_name: &str) -> Vec<(String, &str)> {
        let stem = file_stem(dataset_name);
        vec![
            (format!("{stem}.dependence.svg"), self.dependence.as_str()),
            (format!("{stem}.diverseness.svg"), self.diverseness.as_str()),
            (
                format!("{stem}.inclusiveness.svg"),
                self.inclusiveness.as_str(),
            ),
            (format!("{stem}.likelihood.svg"), self.likelihood.as_str()),
        ]
    }
}

/// Dataset name reduced to characters safe in a file name.
pub fn file_stem(name: &str) -> String {
    let stem: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if stem.is_empty() || stem.chars().all(|c| c == '.') {
        "dataset".to_string()
    } else {
        stem
    }
}

pub fn render_badges(document: &AnnotationDocument) -> BadgeSet {
    BadgeSet {
        dependence: dependence_badge(document),
        diverseness: diverseness_badge(document),
        inclusiveness: inclusiveness_badge(document),
        likelihood: likelihood_badge(document),
    }
}

pub fn escape_xml(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
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

struct Svg {
    out: String,
}

impl Svg {
    fn new(width: f64, height: f64, title: &str) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" role="img" aria-label="{}">"#,
            escape_xml(title)
        );
        let _ = writeln!(out, "<title>{}</title>", escape_xml(title));
        let _ = writeln!(
            out,
            r##"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" rx="6" fill="#fafafa" stroke="#b0bec5"/>"##
        );
        let mut svg = Svg { out };
        svg.rect(0.0, 0.0, width, 24.0, HEADER_FILL, "header");
        svg.text(8.0, 16.0, title, 12.0, "#ffffff", "start", "bold");
        svg
    }

    fn hatch_defs(&mut self) {
        let _ = writeln!(
            self.out,
            r##"<defs><pattern id="{UNDEFINED_HATCH_ID}" patternUnits="userSpaceOnUse" width="6" height="6" patternTransform="rotate(45)"><rect width="6" height="6" fill="#eceff1"/><line x1="0" y1="0" x2="0" y2="6" stroke="#90a4ae" stroke-width="3"/></pattern></defs>"##
        );
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, class: &str) {
        let _ = writeln!(
            self.out,
            r#"<rect class="{class}" x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#
        );
    }

    #[allow(clippy::too_many_arguments)]
    fn text(
        &mut self,
        x: f64,
        y: f64,
        body: &str,
        size: f64,
        fill: &str,
        anchor: &str,
        weight: &str,
    ) {
        let _ = writeln!(
            self.out,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="{FONT}" font-size="{size:.0}" font-weight="{weight}" fill="{fill}" text-anchor="{anchor}">{}</text>"#,
            escape_xml(body)
        );
    }

    fn raw(&mut self, fragment: &str) {
        self.out.push_str(fragment);
        self.out.push('\n');
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

/// Point on the gauge arc for a fraction in [0, 1] (0 = left, 1 = right).
fn gauge_point(cx: f64, cy: f64, r: f64, fraction: f64) -> (f64, f64) {
    let angle = std::f64::consts::PI * (1.0 - fraction.clamp(0.0, 1.0));
    (cx + r * angle.cos(), cy - r * angle.sin())
}

/// Upper end of the gauge scale.
const GAUGE_MAX_W: f64 = 0.6;

fn dependence_badge(doc: &AnnotationDocument) -> String {
    let (width, height) = (240.0, 170.0);
    let mut svg = Svg::new(width, height, &format!("DEPENDENCE: {}", doc.meta.name));
    let (cx, cy, r) = (120.0, 120.0, 70.0);

    let bounds = [0.0, 0.1, 0.3, 0.5, GAUGE_MAX_W];
    for (i, m) in Magnitude::ALL.iter().enumerate() {
        let (x0, y0) = gauge_point(cx, cy, r, bounds[i] / GAUGE_MAX_W);
        let (x1, y1) = gauge_point(cx, cy, r, bounds[i + 1] / GAUGE_MAX_W);
        let active = doc.dependence.magnitude() == Some(*m);
        let color = if doc.dependence.magnitude().is_some() {
            magnitude_color(*m)
        } else {
            "#b0bec5"
        };
        svg.raw(&format!(
            r#"<path class="gauge-segment{}" d="M {x0:.2} {y0:.2} A {r:.2} {r:.2} 0 0 1 {x1:.2} {y1:.2}" fill="none" stroke="{color}" stroke-width="{}"/>"#,
            if active { " active" } else { "" },
            if active { 18 } else { 12 },
        ));
    }

    match &doc.dependence {
        DependenceSection::Computed {
            contingency_coefficient,
            effect_size_w,
            magnitude,
            ..
        } => {
            let (nx, ny) = gauge_point(cx, cy, r - 14.0, effect_size_w.value / GAUGE_MAX_W);
            svg.raw(&format!(
                r#"<line class="needle" x1="{cx:.2}" y1="{cy:.2}" x2="{nx:.2}" y2="{ny:.2}" stroke="{INK}" stroke-width="3" stroke-linecap="round"/>"#
            ));
            svg.raw(&format!(
                r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="5" fill="{INK}"/>"#
            ));
            svg.text(
                cx,
                cy + 22.0,
                magnitude.label(),
                14.0,
                magnitude_color(*magnitude),
                "middle",
                "bold",
            );
            svg.text(
                cx,
                cy + 40.0,
                &format!(
                    "w = {}   C = {}",
                    effect_size_w.display, contingency_coefficient.display
                ),
                11.0,
                INK,
                "middle",
                "normal",
            );
        }
        DependenceSection::NotComputable { .. } => {
            svg.text(cx, cy + 22.0, "not computable", 13.0, INK, "middle", "bold");
        }
    }
    svg.finish()
}

fn diverseness_badge(doc: &AnnotationDocument) -> String {
    let target = &doc.diverseness.target;
    let protected = &doc.diverseness.protected;
    let bars = target.len() + protected.len();
    let group_gap = 30.0;
    let width = 40.0 + bars as f64 * (BAR_W + BAR_GAP) + group_gap;
    let base = 40.0 + BAR_MAX_H + 20.0;
    let height = base + 90.0;
    let mut svg = Svg::new(
        width.max(200.0),
        height,
        &format!("DIVERSENESS: {}", doc.meta.name),
    );

    let mut x = 24.0;
    let groups = [(target, TARGET_BAR_FILL, "Y="), (protected, BAR_FILL, "")];
    for (group, fill, prefix) in groups {
        for level in group.iter() {
            let p = level.p.value().unwrap_or(0.0);
            let h = p * BAR_MAX_H;
            svg.rect(x, base - h, BAR_W, h, fill, "bar");
            svg.text(
                x + BAR_W / 2.0,
                base - h - 4.0,
                &level.p.display(),
                9.0,
                INK,
                "middle",
                "normal",
            );
            let lx = x + BAR_W / 2.0;
            let ly = base + 10.0;
            let _ = writeln!(
                svg.out,
                r#"<text x="{lx:.2}" y="{ly:.2}" font-family="{FONT}" font-size="9" fill="{INK}" text-anchor="end" transform="rotate(-60 {lx:.2} {ly:.2})">{}</text>"#,
                escape_xml(&format!("{prefix}{}", level.level))
            );
            x += BAR_W + BAR_GAP;
        }
        x += group_gap;
    }
    svg.raw(&format!(
        r#"<line x1="16" y1="{base:.2}" x2="{:.2}" y2="{base:.2}" stroke="{INK}" stroke-width="1"/>"#,
        x - group_gap
    ));
    svg.finish()
}

fn cell_fill(svg: &mut Svg, x: f64, y: f64, p: Prob) {
    match p {
        Prob::Defined(v) => {
            let _ = writeln!(
                svg.out,
                r##"<rect class="cell" x="{x:.2}" y="{y:.2}" width="{CELL_W:.2}" height="{CELL_H:.2}" fill="{CELL_RGB}" fill-opacity="{:.3}" stroke="#ffffff"/>"##,
                0.08 + 0.92 * v.clamp(0.0, 1.0)
            );
            let ink = if v > 0.55 { "#ffffff" } else { INK };
            svg.text(
                x + CELL_W / 2.0,
                y + 15.0,
                &p.display(),
                10.0,
                ink,
                "middle",
                "normal",
            );
        }
        Prob::Undefined => {
            let _ = writeln!(
                svg.out,
                r##"<rect class="cell undefined" x="{x:.2}" y="{y:.2}" width="{CELL_W:.2}" height="{CELL_H:.2}" fill="url(#{UNDEFINED_HATCH_ID})" stroke="#ffffff"/>"##
            );
            svg.text(
                x + CELL_W / 2.0,
                y + 15.0,
                &p.display(),
                9.0,
                INK,
                "middle",
                "italic",
            );
        }
    }
}

/// Level × target grid starting at `top`; returns the y just below it.
fn grid(
    svg: &mut Svg,
    top: f64,
    caption: &str,
    levels: &[String],
    column_labels: [&str; 2],
    lookup: impl Fn(&str, u8) -> Prob,
) -> f64 {
    svg.text(10.0, top + 14.0, caption, 11.0, INK, "start", "bold");
    let header_y = top + 22.0;
    for (j, label) in column_labels.iter().enumerate() {
        let x = LABEL_W + j as f64 * CELL_W;
        svg.text(
            x + CELL_W / 2.0,
            header_y + 14.0,
            label,
            10.0,
            INK,
            "middle",
            "bold",
        );
    }
    let mut y = header_y + CELL_H;
    for level in levels {
        svg.text(LABEL_W - 8.0, y + 15.0, level, 10.0, INK, "end", "normal");
        for t in 0..2u8 {
            let x = LABEL_W + t as f64 * CELL_W;
            cell_fill(svg, x, y, lookup(level, t));
        }
        y += CELL_H;
    }
    y
}

fn grid_width() -> f64 {
    LABEL_W + 2.0 * CELL_W + 16.0
}

fn inclusiveness_badge(doc: &AnnotationDocument) -> String {
    let levels = &doc.meta.protected_levels;
    let height = 24.0 + 22.0 + CELL_H * (levels.len() as f64 + 1.0) + 20.0;
    let mut svg = Svg::new(
        grid_width(),
        height,
        &format!("INCLUSIVENESS: {}", doc.meta.name),
    );
    svg.hatch_defs();
    grid(
        &mut svg,
        28.0,
        "P(A ∩ Y)",
        levels,
        ["Y=0", "Y=1"],
        |level, t| doc.joint(t, level).unwrap_or(Prob::Undefined),
    );
    svg.finish()
}

fn lookup(cells: &[CondCell], level: &str, t: u8) -> Prob {
    cells
        .iter()
        .find(|c| c.protected == level && c.target == t)
        .map(|c| c.p)
        .unwrap_or(Prob::Undefined)
}

fn likelihood_badge(doc: &AnnotationDocument) -> String {
    let levels = &doc.meta.protected_levels;
    let block = 22.0 + CELL_H * (levels.len() as f64 + 1.0) + 12.0;
    let height = 28.0 + 2.0 * block + 10.0;
    let mut svg = Svg::new(
        grid_width(),
        height,
        &format!("TRAINING LIKELIHOOD: {}", doc.meta.name),
    );
    svg.hatch_defs();
    let tl = &doc.training_likelihood;
    let below = grid(
        &mut svg,
        28.0,
        "P(Y | A)",
        levels,
        ["Y=0", "Y=1"],
        |level, t| lookup(&tl.target_given_protected, level, t),
    );
    grid(
        &mut svg,
        below + 12.0,
        "P(A | Y)",
        levels,
        ["Y=0", "Y=1"],
        |level, t| lookup(&tl.protected_given_target, level, t),
    );
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_stems_are_sanitized() {
        assert_eq!(file_stem("compas two/years"), "compas_two_years");
        assert_eq!(file_stem(""), "dataset");
        assert_eq!(file_stem(".."), "dataset");
        assert_eq!(file_stem("adult-1.0"), "adult-1.0");
    }

    #[test]
    fn escaping() {
        assert_eq!(escape_xml("<=50K & \"x\""), "&lt;=50K &amp; &quot;x&quot;");
    }

    #[test]
    fn gauge_endpoints() {
        let (x, y) = gauge_point(100.0, 100.0, 50.0, 0.0);
        assert!((x - 50.0).abs() < 1e-9 && (y - 100.0).abs() < 1e-9);
        let (x, y) = gauge_point(100.0, 100.0, 50.0, 1.0);
        assert!((x - 150.0).abs() < 1e-9 && (y - 100.0).abs() < 1e-9);
        let (x, y) = gauge_point(100.0, 100.0, 50.0, 0.5);
        assert!((x - 100.0).abs() < 1e-9 && (y - 50.0).abs() < 1e-9);
    }
}
