//! Static SVG scatter plot of the technique comparison: runtime on a log
//! x-axis, best regional RMSE on the y-axis, marker area proportional to
//! regional model size, one labeled marker per technique.

use super::csvio::SummaryRow;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 100.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 70.0;
const MIN_RADIUS: f64 = 3.0;
const MAX_RADIUS: f64 = 20.0;

/// Times at or below zero cannot sit on a log axis; clamp here.
const ELAPSED_FLOOR: f64 = 1e-9;

const PALETTE: [&str; 8] = [
    "#4269d0", "#efb118", "#ff725c", "#6cc5b0", "#3ca951", "#ff8ab7", "#a463f2", "#97bbf5",
];

pub fn render_scatter_svg(rows: &[SummaryRow]) -> String {
    let xs: Vec<f64> = rows
        .iter()
        .map(|r| r.mean_elapsed.max(ELAPSED_FLOOR).log10())
        .collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.best_rmse).collect();

    let mut x_lo = xs.iter().cloned().fold(f64::INFINITY, f64::min).floor();
    let mut x_hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil();
    if !x_lo.is_finite() || !x_hi.is_finite() {
        x_lo = -3.0;
        x_hi = 0.0;
    }
    if x_hi - x_lo < 1.0 {
        // Degenerate spread (single point or identical times).
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    let y_max_data = ys.iter().cloned().fold(0.0_f64, f64::max);
    let y_hi = if y_max_data > 0.0 { y_max_data * 1.2 } else { 1e-3 };

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |lx: f64| MARGIN_LEFT + (lx - x_lo) / (x_hi - x_lo) * plot_w;
    let y_of = |v: f64| MARGIN_TOP + (1.0 - v / y_hi) * plot_h;

    let max_size = rows.iter().map(|r| r.model_size).max().unwrap_or(0).max(1);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Axes.
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    svg.push_str(&format!(
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\" stroke=\"black\"/>\n"
    ));

    // Decade ticks on the log x-axis.
    let mut dec = x_lo as i64;
    while dec <= x_hi as i64 {
        let px = x_of(dec as f64);
        svg.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{y0:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            y0 + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">1e{dec}</text>\n",
            y0 + 18.0
        ));
        dec += 1;
    }
    // Five linear ticks on y.
    for i in 0..=4 {
        let v = y_hi * i as f64 / 4.0;
        let py = y_of(v);
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{x0:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>\n",
            x0 - 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{v:.4}</text>\n",
            x0 - 8.0,
            py + 4.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">mean solver time per pixel (s, log scale)</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 25.0
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">best regional RMSE</text>\n",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    ));

    // Markers: area proportional to model size, never zero.
    for (i, row) in rows.iter().enumerate() {
        let px = x_of(xs[i]);
        let py = y_of(ys[i]);
        let r = (MAX_RADIUS * (row.model_size as f64 / max_size as f64).sqrt()).max(MIN_RADIUS);
        let color = PALETTE[i % PALETTE.len()];
        svg.push_str(&format!(
            "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"{r:.2}\" fill=\"{color}\" fill-opacity=\"0.7\" stroke=\"{color}\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{}</text>\n",
            px + r + 4.0,
            py + 4.0,
            row.technique
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
