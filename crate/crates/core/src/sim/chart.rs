//! Minimal SVG charts for assignment reports.

use std::fmt::Write as _;

use super::SimReport;

const PALETTE: [&str; 6] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Grouped bars: mean positives per GT in each size bin, one bar per assigner.
pub fn bars_svg(report: &SimReport) -> String {
    let (width, height) = (640.0, 360.0);
    let (left, right, top, bottom) = (56.0, 150.0, 24.0, 40.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;
    let labels = &report.meta.bins.labels;
    let peak = report
        .assigners
        .iter()
        .flat_map(|a| a.bins.iter().map(|b| b.mean_positives_per_gt))
        .fold(0.0, f64::max);
    let y_max = if peak > 0.0 { peak * 1.1 } else { 1.0 };
    let group_w = plot_w / labels.len().max(1) as f64;
    let bar_w = group_w * 0.8 / report.assigners.len().max(1) as f64;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<line x1="{left}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        top + plot_h,
        left + plot_w,
        top + plot_h
    )
    .unwrap();
    writeln!(
        svg,
        r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{}" stroke="black"/>"#,
        top + plot_h
    )
    .unwrap();
    for tick in 0..=4 {
        let v = y_max * tick as f64 / 4.0;
        let y = top + plot_h - plot_h * tick as f64 / 4.0;
        writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{v:.2}</text>"#,
            left - 6.0,
            y + 4.0
        )
        .unwrap();
    }
    for (g, label) in labels.iter().enumerate() {
        let gx = left + group_w * g as f64 + group_w * 0.1;
        for (k, a) in report.assigners.iter().enumerate() {
            let v = a.bins.get(g).map_or(0.0, |b| b.mean_positives_per_gt);
            let h = plot_h * v / y_max;
            writeln!(
                svg,
                r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{}"/>"#,
                gx + bar_w * k as f64,
                top + plot_h - h,
                bar_w,
                h,
                PALETTE[k % PALETTE.len()]
            )
            .unwrap();
        }
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            left + group_w * (g as f64 + 0.5),
            top + plot_h + 18.0,
            escape(label)
        )
        .unwrap();
    }
    for (k, a) in report.assigners.iter().enumerate() {
        let y = top + 16.0 * k as f64;
        writeln!(
            svg,
            r#"<rect x="{}" y="{y}" width="10" height="10" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            width - right + 12.0,
            PALETTE[k % PALETTE.len()],
            width - right + 28.0,
            y + 9.0,
            a.assigner
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{}" y="14" text-anchor="middle">mean positives per GT</text>"#,
        left + plot_w / 2.0
    )
    .unwrap();
    svg.push_str("</svg>\n");
    svg
}

/// One pie per assigner showing each bin's share of positives.
pub fn pie_svg(report: &SimReport) -> String {
    let radius = 90.0;
    let cell = 2.0 * radius + 60.0;
    let width = cell * report.assigners.len().max(1) as f64;
    let height = cell + 20.0 * report.meta.bins.len() as f64 + 20.0;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    )
    .unwrap();
    for (k, a) in report.assigners.iter().enumerate() {
        let (cx, cy) = (cell * k as f64 + cell / 2.0, cell / 2.0 + 10.0);
        writeln!(
            svg,
            r#"<text x="{cx}" y="16" text-anchor="middle">{}</text>"#,
            a.assigner
        )
        .unwrap();
        let mut start = -std::f64::consts::FRAC_PI_2;
        for (b, bin) in a.bins.iter().enumerate() {
            let frac = bin.share_pct / 100.0;
            if frac <= 0.0 {
                continue;
            }
            let color = PALETTE[b % PALETTE.len()];
            if frac >= 1.0 - 1e-12 {
                writeln!(
                    svg,
                    r#"<circle cx="{cx}" cy="{cy}" r="{radius}" fill="{color}"/>"#
                )
                .unwrap();
                continue;
            }
            let end = start + frac * std::f64::consts::TAU;
            let (x0, y0) = (cx + radius * start.cos(), cy + radius * start.sin());
            let (x1, y1) = (cx + radius * end.cos(), cy + radius * end.sin());
            let large = if frac > 0.5 { 1 } else { 0 };
            writeln!(
                svg,
                r#"<path d="M{cx},{cy} L{x0:.2},{y0:.2} A{radius},{radius} 0 {large} 1 {x1:.2},{y1:.2} Z" fill="{color}" stroke="white"/>"#
            )
            .unwrap();
            start = end;
        }
        for (b, bin) in a.bins.iter().enumerate() {
            let y = cell + 20.0 * b as f64 + 10.0;
            writeln!(
                svg,
                r#"<rect x="{}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{y}">{} {:.1}%</text>"#,
                cx - 50.0,
                y - 9.0,
                PALETTE[b % PALETTE.len()],
                cx - 34.0,
                escape(&bin.label),
                bin.share_pct
            )
            .unwrap();
        }
    }
    svg.push_str("</svg>\n");
    svg
}
