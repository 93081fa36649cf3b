//! Report emission: JSON envelopes, CSV tables, and hand-drawn SVG line
//! charts. Every document embeds the invocation and seed that produced it,
//! and identical inputs yield byte-identical bytes, so outputs can be
//! diffed and replayed.

use serde::Serialize;

use crate::error::Result;

/// JSON envelope: `{"invocation": ..., "seed": ..., "report": ...}`.
/// serde_json maps are sorted, so key order is canonical.
pub fn json_document<T: Serialize>(invocation: &str, seed: u64, payload: &T) -> Result<String> {
    #[derive(Serialize)]
    struct Envelope<'a, T> {
        invocation: &'a str,
        seed: u64,
        report: &'a T,
    }
    let mut out = serde_json::to_string_pretty(&Envelope {
        invocation,
        seed,
        report: payload,
    })?;
    out.push('\n');
    Ok(out)
}

/// Canonical cell format: shortest round-trip decimal, so table values can
/// be pasted back without loss.
pub fn fmt_float(v: f64) -> String {
    format!("{v}")
}

fn csv_cell(raw: &str) -> String {
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

/// CSV with `# invocation:` and `# seed:` comment lines ahead of the header.
pub fn csv_document(invocation: &str, seed: u64, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# invocation: {invocation}\n"));
    out.push_str(&format!("# seed: {seed}\n"));
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| csv_cell(c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// One named series of a chart.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
    /// Stroke color; the second series is conventionally a dashed reference.
    pub color: &'a str,
    pub dashed: bool,
}

const SVG_W: f64 = 720.0;
const SVG_H: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 30.0;
const MARGIN_T: f64 = 50.0;
const MARGIN_B: f64 = 60.0;

fn px(v: f64) -> String {
    format!("{v:.2}")
}

/// Polyline line chart drawn directly, with axes, tick labels at the data
/// extremes, and a legend. No plotting stack, no system fonts queried.
pub fn svg_chart(
    invocation: &str,
    seed: u64,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (x, y) in all {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if !x0.is_finite() {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let plot_w = SVG_W - MARGIN_L - MARGIN_R;
    let plot_h = SVG_H - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| MARGIN_T + plot_h - (y - y0) / (y1 - y0) * plot_h;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">\n"
    ));
    out.push_str(&format!(
        "  <desc>invocation: {invocation}; seed: {seed}</desc>\n"
    ));
    out.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"28\" font-family=\"monospace\" font-size=\"16\" text-anchor=\"middle\">{title}</text>\n",
        px(SVG_W / 2.0)
    ));
    // Axes.
    out.push_str(&format!(
        "  <line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n  <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = px(MARGIN_L),
        r = px(SVG_W - MARGIN_R),
        t = px(MARGIN_T),
        b = px(SVG_H - MARGIN_B),
    ));
    // Extreme tick labels.
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"{anchor}\">{x:.4}</text>\n",
            px(sx(x)),
            px(SVG_H - MARGIN_B + 18.0)
        ));
    }
    for y in [y0, y1] {
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"end\">{y:.4}</text>\n",
            px(MARGIN_L - 8.0),
            px(sy(y) + 4.0)
        ));
    }
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">{x_label}</text>\n",
        px(MARGIN_L + plot_w / 2.0),
        px(SVG_H - 16.0)
    ));
    out.push_str(&format!(
        "  <text x=\"18\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {y})\">{y_label}</text>\n",
        px(MARGIN_T + plot_h / 2.0),
        y = px(MARGIN_T + plot_h / 2.0)
    ));
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|(x, y)| format!("{},{}", px(sx(*x)), px(sy(*y))))
            .collect();
        let dash = if s.dashed {
            " stroke-dasharray=\"6 4\""
        } else {
            ""
        };
        out.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{dash} points=\"{}\"/>\n",
            s.color,
            pts.join(" ")
        ));
        let ly = MARGIN_T + 16.0 * (i as f64 + 1.0);
        out.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1.5\"{dash}/>\n",
            px(MARGIN_L + plot_w - 150.0),
            px(ly),
            px(MARGIN_L + plot_w - 120.0),
            px(ly),
            s.color
        ));
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">{}</text>\n",
            px(MARGIN_L + plot_w - 112.0),
            px(ly + 4.0),
            s.label
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_envelope_embeds_invocation_and_seed() {
        let doc = json_document("prog run --x 1", 7, &vec![1, 2, 3]).unwrap();
        assert!(doc.contains("\"invocation\": \"prog run --x 1\""));
        assert!(doc.contains("\"seed\": 7"));
        assert!(doc.ends_with("}\n"));
    }

    #[test]
    fn csv_has_comment_header_and_rows() {
        let doc = csv_document(
            "prog table",
            0,
            &["n", "value"],
            &[
                vec!["1".into(), "2.5".into()],
                vec!["2".into(), "3.5".into()],
            ],
        );
        let lines: Vec<&str> = doc.lines().collect();
        assert_eq!(lines[0], "# invocation: prog table");
        assert_eq!(lines[1], "# seed: 0");
        assert_eq!(lines[2], "n,value");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn csv_cells_with_commas_are_quoted() {
        let doc = csv_document(
            "prog table",
            0,
            &["name", "family"],
            &[vec!["a".into(), "pool 1..=8, 6 vectors".into()]],
        );
        assert!(doc.contains("a,\"pool 1..=8, 6 vectors\""));
    }

    #[test]
    fn float_cells_round_trip() {
        for v in [1.0, 0.1, 9.832291115332103, 1e-12, -3.25] {
            assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn svg_is_deterministic_and_well_formed() {
        let pts = [(1.0, 1.0), (2.0, 1.5), (3.0, 2.2)];
        let s = Series {
            label: "r(N)",
            points: &pts,
            color: "#1f77b4",
            dashed: false,
        };
        let a = svg_chart("prog plot", 0, "growth", "N", "ratio", &[s]);
        let s2 = Series {
            label: "r(N)",
            points: &pts,
            color: "#1f77b4",
            dashed: false,
        };
        let b = svg_chart("prog plot", 0, "growth", "N", "ratio", &[s2]);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<polyline").count(), 1);
        assert!(a.contains("invocation: prog plot; seed: 0"));
    }

    #[test]
    fn degenerate_ranges_do_not_divide_by_zero() {
        let pts = [(2.0, 5.0)];
        let s = Series {
            label: "flat",
            points: &pts,
            color: "#000",
            dashed: false,
        };
        let doc = svg_chart("prog plot", 1, "flat", "x", "y", &[s]);
        assert!(!doc.contains("NaN"));
    }
}
