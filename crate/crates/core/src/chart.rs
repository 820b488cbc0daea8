//! Small-multiples SVG rendering of cumulative overnight (blue) and
//! intraday (green) curves.
//!
//! Linear panels span -100% at the bottom to the largest cumulative
//! overnight value at the top, with zero marked at the left edge and final
//! values labeled at the right. Log panels plot log10(1 + value). Output is
//! a pure function of the inputs: rendering the same curves twice yields
//! byte-identical SVG.

use chrono::NaiveDate;
use serde::Deserialize;

use crate::returns::CumulativeCurve;

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 230.0;
const MARGIN_LEFT: f64 = 52.0;
const MARGIN_RIGHT: f64 = 66.0;
const MARGIN_TOP: f64 = 26.0;
const MARGIN_BOTTOM: f64 = 24.0;
const OVERNIGHT_COLOR: &str = "blue";
const INTRADAY_COLOR: &str = "green";

/// Vertical scale of a panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleMode {
    Linear,
    Log,
}

impl ScaleMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(ScaleMode::Linear),
            "log" => Some(ScaleMode::Log),
            _ => None,
        }
    }
}

/// How one panel is drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelSpec {
    pub symbol: String,
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    pub scale: ScaleMode,
    pub end_labels: bool,
}

/// A panel's spec plus the two curves it plots.
#[derive(Debug, Clone)]
pub struct Panel {
    pub spec: PanelSpec,
    pub overnight: CumulativeCurve,
    pub intraday: CumulativeCurve,
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt_pct(v: f64) -> String {
    format!("{:+.0}%", v * 100.0)
}

struct PanelGeometry {
    x0: f64,
    y0: f64,
    plot_w: f64,
    plot_h: f64,
}

impl PanelGeometry {
    fn at(col: usize, row: usize) -> Self {
        PanelGeometry {
            x0: col as f64 * PANEL_W + MARGIN_LEFT,
            y0: row as f64 * PANEL_H + MARGIN_TOP,
            plot_w: PANEL_W - MARGIN_LEFT - MARGIN_RIGHT,
            plot_h: PANEL_H - MARGIN_TOP - MARGIN_BOTTOM,
        }
    }
}

fn in_range(spec: &PanelSpec, d: NaiveDate) -> bool {
    spec.start.is_none_or(|s| d >= s) && spec.end.is_none_or(|e| d <= e)
}

fn filtered(points: &[crate::returns::CurvePoint], spec: &PanelSpec) -> Vec<(NaiveDate, f64)> {
    points
        .iter()
        .filter(|p| in_range(spec, p.date))
        .map(|p| (p.date, p.value))
        .collect()
}

fn render_panel(svg: &mut String, panel: &Panel, idx: usize, col: usize, row: usize) {
    let g = PanelGeometry::at(col, row);
    let title_x = g.x0;
    let title_y = row as f64 * PANEL_H + 16.0;
    svg.push_str(&format!(
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" font-weight="bold">{}</text>"#,
        title_x,
        title_y,
        escape_xml(&panel.spec.symbol)
    ));

    let overnight = filtered(&panel.overnight.points, &panel.spec);
    let intraday = filtered(&panel.intraday.points, &panel.spec);

    // frame
    svg.push_str(&format!(
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444" stroke-width="0.8"/>"##,
        g.x0, g.y0, g.plot_w, g.plot_h
    ));

    if overnight.is_empty() || intraday.is_empty() {
        svg.push_str(&format!(
            r##"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" fill="#888" text-anchor="middle">no data</text>"##,
            g.x0 + g.plot_w / 2.0,
            g.y0 + g.plot_h / 2.0
        ));
        return;
    }

    let first_date = overnight
        .iter()
        .chain(intraday.iter())
        .map(|(d, _)| *d)
        .min()
        .unwrap();
    let last_date = overnight
        .iter()
        .chain(intraday.iter())
        .map(|(d, _)| *d)
        .max()
        .unwrap();
    let day_span = ((last_date - first_date).num_days() as f64).max(1.0);
    let x_of = |d: NaiveDate| g.x0 + (d - first_date).num_days() as f64 / day_span * g.plot_w;

    // vertical domain in transformed units
    let transform = |v: f64| match panel.spec.scale {
        ScaleMode::Linear => v,
        ScaleMode::Log => (1.0 + v).log10(),
    };
    let (bottom, top) = match panel.spec.scale {
        ScaleMode::Linear => {
            let max_on = overnight.iter().map(|(_, v)| *v).fold(f64::MIN, f64::max);
            (-1.0, max_on.max(0.0))
        }
        ScaleMode::Log => {
            let all = overnight.iter().chain(intraday.iter()).map(|(_, v)| transform(*v));
            let min = all.clone().fold(f64::MAX, f64::min);
            let max = all.fold(f64::MIN, f64::max);
            let pad = ((max - min) * 0.05).max(0.01);
            (min - pad, max + pad)
        }
    };
    let y_of = |v: f64| {
        let t = (transform(v) - bottom) / (top - bottom);
        g.y0 + (1.0 - t) * g.plot_h
    };

    // zero line, marked at left
    if bottom <= 0.0 && 0.0 <= top {
        let y = y_of(0.0);
        svg.push_str(&format!(
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999" stroke-width="0.6" stroke-dasharray="3 3"/>"##,
            g.x0,
            y,
            g.x0 + g.plot_w,
            y
        ));
        svg.push_str(&format!(
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end" dominant-baseline="middle">0</text>"#,
            g.x0 - 4.0,
            y
        ));
    }
    if panel.spec.scale == ScaleMode::Linear {
        svg.push_str(&format!(
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end" dominant-baseline="middle">-100%</text>"#,
            g.x0 - 4.0,
            g.y0 + g.plot_h
        ));
    }

    // date span labels
    svg.push_str(&format!(
        r##"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="9" fill="#555">{}</text>"##,
        g.x0,
        g.y0 + g.plot_h + 13.0,
        first_date
    ));
    svg.push_str(&format!(
        r##"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="9" fill="#555" text-anchor="end">{}</text>"##,
        g.x0 + g.plot_w,
        g.y0 + g.plot_h + 13.0,
        last_date
    ));

    // clip curves to the plot area; values may exceed the overnight-anchored top
    svg.push_str(&format!(
        r#"<clipPath id="clip{idx}"><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/></clipPath>"#,
        g.x0, g.y0, g.plot_w, g.plot_h
    ));

    for (points, color) in [(&overnight, OVERNIGHT_COLOR), (&intraday, INTRADAY_COLOR)] {
        let mut d = String::new();
        for (i, (date, v)) in points.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            d.push_str(&format!("{}{:.2} {:.2}", cmd, x_of(*date), y_of(*v)));
        }
        svg.push_str(&format!(
            r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.3" clip-path="url(#clip{idx})"/>"#
        ));
    }

    if panel.spec.end_labels {
        for (points, color) in [(&overnight, OVERNIGHT_COLOR), (&intraday, INTRADAY_COLOR)] {
            let (date, v) = *points.last().unwrap();
            let y = y_of(v).clamp(g.y0, g.y0 + g.plot_h);
            svg.push_str(&format!(
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" fill="{color}" dominant-baseline="middle">{}</text>"#,
                x_of(date) + 4.0,
                y,
                fmt_pct(v)
            ));
        }
    }
}

/// Render panels into a self-contained SVG grid with `columns` panels per row.
pub fn render_grid(panels: &[Panel], columns: usize) -> String {
    let columns = columns.max(1);
    let rows = panels.len().div_ceil(columns);
    let width = PANEL_W * columns.min(panels.len().max(1)) as f64;
    let height = PANEL_H * rows.max(1) as f64;

    let mut svg = format!(
        r#"<svg version="1.1" xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    svg.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut svg, panel, i, i % columns, i / columns);
    }
    svg.push_str("</svg>");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::returns::{CurvePoint, Leg};

    fn curve(leg: Leg, values: &[(&str, f64)]) -> CumulativeCurve {
        CumulativeCurve {
            leg,
            points: values
                .iter()
                .map(|(d, v)| CurvePoint {
                    date: d.parse().unwrap(),
                    value: *v,
                })
                .collect(),
        }
    }

    fn spec(scale: ScaleMode) -> PanelSpec {
        PanelSpec {
            symbol: "TEST".into(),
            start: None,
            end: None,
            scale,
            end_labels: true,
        }
    }

    fn sample_panel(scale: ScaleMode) -> Panel {
        Panel {
            spec: spec(scale),
            overnight: curve(
                Leg::Overnight,
                &[("2020-01-02", 0.01), ("2020-01-03", 0.05), ("2020-01-06", 0.12)],
            ),
            intraday: curve(
                Leg::Intraday,
                &[("2020-01-02", -0.01), ("2020-01-03", -0.04), ("2020-01-06", -0.09)],
            ),
        }
    }

    /// Minimal well-formedness check: tags nest and attributes are quoted.
    fn assert_well_formed_xml(s: &str) {
        let mut stack: Vec<String> = Vec::new();
        let mut rest = s;
        while let Some(start) = rest.find('<') {
            let end = rest[start..].find('>').expect("unclosed tag") + start;
            let tag = &rest[start + 1..end];
            rest = &rest[end + 1..];
            if let Some(name) = tag.strip_prefix('/') {
                assert_eq!(stack.pop().as_deref(), Some(name), "mismatched close");
            } else if !tag.ends_with('/') && !tag.starts_with('?') && !tag.starts_with('!') {
                let name = tag.split_whitespace().next().unwrap().to_string();
                stack.push(name);
            }
            assert_eq!(tag.matches('"').count() % 2, 0, "unbalanced quotes in {tag}");
        }
        assert!(stack.is_empty(), "unclosed tags: {stack:?}");
    }

    #[test]
    fn two_paths_per_panel_and_deterministic() {
        let panels = vec![sample_panel(ScaleMode::Linear), sample_panel(ScaleMode::Linear)];
        let a = render_grid(&panels, 2);
        let b = render_grid(&panels, 2);
        assert_eq!(a, b);
        assert_eq!(a.matches("<path").count(), 4);
        assert_well_formed_xml(&a);
    }

    #[test]
    fn linear_panel_labels_minus_hundred_percent() {
        let svg = render_grid(&[sample_panel(ScaleMode::Linear)], 1);
        assert!(svg.contains("-100%"));
        assert!(svg.contains(">0<"));
    }

    #[test]
    fn log_panel_omits_minus_hundred_anchor() {
        let svg = render_grid(&[sample_panel(ScaleMode::Log)], 1);
        assert!(!svg.contains("-100%"));
        assert_well_formed_xml(&svg);
    }

    #[test]
    fn end_labels_show_final_values() {
        let svg = render_grid(&[sample_panel(ScaleMode::Linear)], 1);
        assert!(svg.contains("+12%"));
        assert!(svg.contains("-9%"));
    }

    #[test]
    fn empty_curve_renders_placeholder() {
        let panel = Panel {
            spec: spec(ScaleMode::Linear),
            overnight: curve(Leg::Overnight, &[]),
            intraday: curve(Leg::Intraday, &[]),
        };
        let svg = render_grid(&[panel], 1);
        assert!(svg.contains("no data"));
        assert_eq!(svg.matches("<path").count(), 0);
        assert_well_formed_xml(&svg);
    }

    #[test]
    fn symbol_text_is_escaped() {
        let mut panel = sample_panel(ScaleMode::Linear);
        panel.spec.symbol = "S&P <500>".into();
        let svg = render_grid(&[panel], 1);
        assert!(svg.contains("S&amp;P &lt;500&gt;"));
        assert_well_formed_xml(&svg);
    }

    #[test]
    fn date_range_filter_applies() {
        let mut panel = sample_panel(ScaleMode::Linear);
        panel.spec.start = Some("2020-01-03".parse().unwrap());
        let svg = render_grid(&[panel], 1);
        assert!(svg.contains("2020-01-03"));
        assert!(!svg.contains("2020-01-02"));
    }
}
