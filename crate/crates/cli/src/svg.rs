//! Self-contained SVG figures: grouped bar chart of selection frequencies and
//! compliance heatmaps.

use std::fmt::Write;

use latsample_core::{ErrorClass, HeatmapResult, SelectionResult};

const PALETTE: [&str; 6] = [
    "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
];

pub const CELL_PX: usize = 14;
const HEAT_MARGIN_LEFT: usize = 70;
const HEAT_MARGIN_TOP: usize = 70;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// One group of bars per sample size, one bar per path.
pub fn selection_bars(result: &SelectionResult, labels: &[String], title: &str) -> String {
    let (width, height) = (640usize, 360usize);
    let (left, right, top, bottom) = (60.0, 20.0, 40.0, 60.0);
    let plot_w = width as f64 - left - right;
    let plot_h = height as f64 - top - bottom;
    let groups = result.sample_sizes.len().max(1);
    let paths = result.paths().max(1);
    let group_w = plot_w / groups as f64;
    let bar_w = group_w * 0.8 / paths as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2,
        escape(title)
    );
    for tick in 0..=4 {
        let f = tick as f64 / 4.0;
        let y = top + plot_h * (1.0 - f);
        let _ = writeln!(
            s,
            "<line x1=\"{left}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#ddd\"/>",
            left + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}%</text>"#,
            left - 6.0,
            y + 4.0,
            tick * 25
        );
    }
    for (g, &n0) in result.sample_sizes.iter().enumerate() {
        let x0 = left + g as f64 * group_w + group_w * 0.1;
        for (p, f) in result.frequencies(g).into_iter().enumerate() {
            let h = plot_h * f;
            let _ = writeln!(
                s,
                r#"<rect class="bar" data-sample-size="{n0}" data-path="{p}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"><title>{}: {:.2}%</title></rect>"#,
                x0 + p as f64 * bar_w,
                top + plot_h - h,
                bar_w,
                h,
                PALETTE[p % PALETTE.len()],
                escape(labels.get(p).map_or("", String::as_str)),
                100.0 * f
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{n0}</text>"#,
            left + (g as f64 + 0.5) * group_w,
            top + plot_h + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{}" text-anchor="middle">samples per path (n0)</text>"#,
        left + plot_w / 2.0,
        height - 24
    );
    for (p, label) in labels.iter().enumerate().take(paths) {
        let x = left + 10.0 + 150.0 * p as f64;
        let y = height as f64 - 8.0;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{y:.1}">{}</text>"#,
            y - 9.0,
            PALETTE[p % PALETTE.len()],
            x + 14.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Pixel size of a heatmap with `rows` ACOs and `cols` MACOs.
pub fn heatmap_size(rows: usize, cols: usize) -> (usize, usize) {
    (
        HEAT_MARGIN_LEFT + cols * CELL_PX + 20,
        HEAT_MARGIN_TOP + rows * CELL_PX + 40,
    )
}

/// ACO rows × MACO columns; white = declared compliant, grey = not.
/// False positives get a red dot, false negatives a blue one.
pub fn heatmap(result: &HeatmapResult, title: &str) -> String {
    let rows = result.acos.len();
    let cols = result.macos.len();
    let (width, height) = heatmap_size(rows, cols);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="9" data-rows="{rows}" data-cols="{cols}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{HEAT_MARGIN_LEFT}" y="16" font-size="13">{} (FP={} FN={})</text>"#,
        escape(title),
        result.fp(),
        result.fn_()
    );
    for (c, m) in result.macos.iter().enumerate() {
        let x = HEAT_MARGIN_LEFT + c * CELL_PX + CELL_PX / 2;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" transform="rotate(-60 {x} {})">{}</text>"#,
            HEAT_MARGIN_TOP - 4,
            HEAT_MARGIN_TOP - 4,
            escape(m)
        );
    }
    for (r, a) in result.acos.iter().enumerate() {
        let y = HEAT_MARGIN_TOP + r * CELL_PX;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            HEAT_MARGIN_LEFT - 4,
            y + CELL_PX - 4,
            escape(a)
        );
        for c in 0..cols {
            let cell = result.cell(r, c);
            let x = HEAT_MARGIN_LEFT + c * CELL_PX;
            let fill = if cell.decision { "#ffffff" } else { "#b0b0b0" };
            let _ = writeln!(
                s,
                r##"<rect class="cell" data-row="{r}" data-col="{c}" data-class="{}" x="{x}" y="{y}" width="{CELL_PX}" height="{CELL_PX}" fill="{fill}" stroke="#888" stroke-width="0.5"><title>{} -> {}: {:.4} sampled, {:.4} true</title></rect>"##,
                cell.class,
                escape(&cell.aco),
                escape(&cell.maco),
                cell.empirical_fraction,
                cell.true_fraction
            );
            let dot = match cell.class {
                ErrorClass::FalsePositive => Some("#d62728"),
                ErrorClass::FalseNegative => Some("#1f3fd6"),
                _ => None,
            };
            if let Some(color) = dot {
                let _ = writeln!(
                    s,
                    r#"<circle class="error" cx="{}" cy="{}" r="{}" fill="{color}"/>"#,
                    x + CELL_PX / 2,
                    y + CELL_PX / 2,
                    CELL_PX / 4
                );
            }
        }
    }
    let legend_y = HEAT_MARGIN_TOP + rows * CELL_PX + 20;
    let _ = writeln!(
        s,
        "<text x=\"{HEAT_MARGIN_LEFT}\" y=\"{legend_y}\">white: declared compliant, grey: not; red dot: FP, blue dot: FN</text>"
    );
    s.push_str("</svg>\n");
    s
}
