//! Minimal standalone SVG renderings of reports.

use super::asymmetry::AsymmetryRow;
use super::report::EvalReport;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Confusion matrix heatmap; darker grey means more recordings.
pub fn confusion_svg(report: &EvalReport) -> String {
    let m = report.confusion();
    let n = report.labels.len();
    let cell = 24usize;
    let margin = 140usize;
    let size = margin + n * cell + 10;
    let max = m.iter().flatten().copied().max().unwrap_or(0).max(1);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" font-family=\"sans-serif\" font-size=\"10\">\n"
    );
    out.push_str(&format!(
        "<text x=\"4\" y=\"14\">accuracy {:.2}%</text>\n",
        100.0 * report.accuracy()
    ));
    for (i, label) in report.labels.iter().enumerate() {
        let y = margin + i * cell + cell / 2 + 3;
        out.push_str(&format!("<text x=\"{}\" y=\"{y}\" text-anchor=\"end\">{}</text>\n", margin - 4, escape(label)));
        let x = margin + i * cell + cell / 2 + 3;
        out.push_str(&format!(
            "<text x=\"{x}\" y=\"{}\" transform=\"rotate(-90 {x} {})\">{}</text>\n",
            margin - 4,
            margin - 4,
            escape(label)
        ));
    }
    for (i, row) in m.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            let shade = 255 - (255 * count / max) as u8;
            let (x, y) = (margin + j * cell, margin + i * cell);
            out.push_str(&format!(
                "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"rgb({shade},{shade},{shade})\" stroke=\"#ccc\"/>\n"
            ));
            if count > 0 {
                let colour = if shade < 128 { "#fff" } else { "#000" };
                out.push_str(&format!(
                    "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"{colour}\">{count}</text>\n",
                    x + cell / 2,
                    y + cell / 2 + 3
                ));
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Horizontal bar chart of per-label asymmetry scores.
pub fn asymmetry_svg(rows: &[AsymmetryRow]) -> String {
    let bar = 18usize;
    let label_w = 140.0;
    let plot_w = 400.0;
    let height = 20 + rows.len() * bar + 10;
    let max = rows.iter().map(|r| r.score).fold(0.0f64, f64::max).max(1e-9);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"10\">\n",
        label_w + plot_w + 70.0
    );
    for (i, r) in rows.iter().enumerate() {
        let y = 20 + i * bar;
        let w = plot_w * r.score / max;
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            label_w - 4.0,
            y + bar / 2 + 3,
            escape(&r.label)
        ));
        out.push_str(&format!(
            "<rect x=\"{label_w}\" y=\"{}\" width=\"{w:.2}\" height=\"{}\" fill=\"#555\"/>\n",
            y + 2,
            bar - 4
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{}\">{:.4}</text>\n",
            label_w + w + 4.0,
            y + bar / 2 + 3,
            r.score
        ));
    }
    out.push_str("</svg>\n");
    out
}
