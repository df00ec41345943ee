//! Minimal SVG line and bar charts.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(out: &mut String, title: &str, desc: &str) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<desc>{}</desc>
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        escape(desc),
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN / 2.0, MARGIN / 1.5);
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>
<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>
<text x="{}" y="{}" text-anchor="middle">{}</text>
<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 18.0,
        escape(x_label),
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Line chart; with `log2` both axes are drawn in log₂ and non-positive
/// points are skipped.
pub fn line_chart(
    title: &str,
    desc: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    log2: bool,
) -> String {
    let map = |v: f64| if log2 { v.log2() } else { v };
    let keep = |&(x, y): &(f64, f64)| !log2 || (x > 0.0 && y > 0.0);
    let pts = || {
        series
            .iter()
            .flat_map(|s| s.points.iter().copied().filter(keep))
    };
    let (xmin, xmax) = range(pts().map(|p| map(p.0)));
    let (ymin, ymax) = range(pts().map(|p| map(p.1)));
    let sx = |x: f64| MARGIN + (map(x) - xmin) / (xmax - xmin) * (WIDTH - 1.5 * MARGIN);
    let sy = |y: f64| {
        HEIGHT - MARGIN - (map(y) - ymin) / (ymax - ymin) * (HEIGHT - MARGIN - MARGIN / 1.5)
    };

    let mut out = String::new();
    header(&mut out, title, desc);
    let (xl, yl) = if log2 {
        (format!("log2 {x_label}"), format!("log2 {y_label}"))
    } else {
        (x_label.to_string(), y_label.to_string())
    };
    axes(&mut out, &xl, &yl);
    for (label, v, x, y) in [
        ("min", xmin, MARGIN, HEIGHT - MARGIN + 16.0),
        ("max", xmax, WIDTH - MARGIN / 2.0, HEIGHT - MARGIN + 16.0),
    ] {
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{y}" text-anchor="middle" data-tick="{label}">{v:.3}</text>"#
        );
    }
    for (v, y) in [(ymin, HEIGHT - MARGIN), (ymax, MARGIN / 1.5)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{y}" text-anchor="end">{v:.3}</text>"#,
            MARGIN - 4.0
        );
    }
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .filter(|p| keep(p))
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            path.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            WIDTH - 200.0,
            MARGIN + 16.0 * i as f64,
            escape(&s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Vertical bar chart over labeled categories.
pub fn bar_chart(
    title: &str,
    desc: &str,
    x_label: &str,
    y_label: &str,
    bars: &[(String, f64)],
) -> String {
    let ymax = bars.iter().map(|b| b.1).fold(0.0, f64::max).max(1e-12);
    let plot_w = WIDTH - 1.5 * MARGIN;
    let plot_h = HEIGHT - MARGIN - MARGIN / 1.5;
    let slot = plot_w / bars.len().max(1) as f64;

    let mut out = String::new();
    header(&mut out, title, desc);
    axes(&mut out, x_label, y_label);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">{ymax:.3}</text>"#,
        MARGIN - 4.0,
        MARGIN / 1.5
    );
    let label_every = bars.len().div_ceil(16).max(1);
    for (i, (label, v)) in bars.iter().enumerate() {
        let h = v / ymax * plot_h;
        let x = MARGIN + i as f64 * slot;
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            x + 0.1 * slot,
            HEIGHT - MARGIN - h,
            0.8 * slot,
            h,
            COLORS[0]
        );
        if i % label_every == 0 {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
                x + 0.5 * slot,
                HEIGHT - MARGIN + 16.0,
                escape(label)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }

    #[test]
    fn log_chart_skips_zeros() {
        let s = Series {
            name: "q".into(),
            points: vec![(4.0, 0.0), (8.0, 0.25), (16.0, 0.125)],
        };
        let svg = line_chart("t", "d", "x", "y", &[s], true);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn bars_for_each_category() {
        let bars: Vec<(String, f64)> = (0..4).map(|i| (i.to_string(), 0.25)).collect();
        let svg = bar_chart("pmf", "d", "y", "p", &bars);
        assert_eq!(svg.matches("<rect ").count(), 5);
    }
}
