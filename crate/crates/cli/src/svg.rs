//! Minimal self-contained SVG emission for B-plots: bars over the grid,
//! shaded one-sided acceptance strips per decile, tick marks at the deciles.

use std::fmt::Write;

pub struct Panel<'a> {
    pub title: &'a str,
    pub points: &'a [f64],
    pub bars: &'a [f64],
    /// Barrier level per decile bucket (1..=10), None when the bucket holds
    /// no grid points.
    pub barriers: &'a [Option<f64>; 10],
    /// Bucket index (1..=10) per grid point.
    pub buckets: &'a [u8],
}

const W: f64 = 900.0;
const PANEL_H: f64 = 320.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 30.0;

pub fn render(panels: &[Panel], metadata: &str) -> String {
    let height = PANEL_H * panels.len() as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg version="1.1" width="{W}" height="{height}" xmlns="http://www.w3.org/2000/svg">"#
    );
    let _ = writeln!(s, "<!-- {metadata} -->");
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        panel(&mut s, p, i as f64 * PANEL_H);
    }
    let _ = writeln!(s, "</svg>");
    s
}

fn panel(s: &mut String, p: &Panel, top: f64) {
    let lo = p
        .bars
        .iter()
        .copied()
        .chain(p.barriers.iter().flatten().copied())
        .fold(0.0f64, f64::min)
        .min(-1.0);
    let hi = p.bars.iter().copied().fold(0.0f64, f64::max).max(1.0);
    let (lo, hi) = (lo - 0.5, hi + 0.5);
    let plot_w = W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let xpix = |p_val: f64| MARGIN_L + p_val * plot_w;
    let ypix = |v: f64| top + MARGIN_T + (hi - v) / (hi - lo) * plot_h;

    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="monospace" font-size="14">{}</text>"#,
        MARGIN_L,
        top + 20.0,
        p.title
    );

    // shaded one-sided acceptance strips: the region from the barrier down
    // is where a bucket minimum signals a locally significant departure
    for k in 0..10 {
        if let Some(l) = p.barriers[k] {
            let x0 = xpix(k as f64 / 10.0);
            let x1 = xpix((k + 1) as f64 / 10.0);
            let y = ypix(l);
            let _ = writeln!(
                s,
                r##"<rect x="{x0:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="#f3c6c6"/>"##,
                x1 - x0,
                (top + MARGIN_T + plot_h - y).max(0.0)
            );
            let _ = writeln!(
                s,
                r##"<line x1="{x0:.1}" y1="{y:.1}" x2="{x1:.1}" y2="{y:.1}" stroke="#b22222" stroke-width="1" stroke-dasharray="4,3"/>"##
            );
        }
    }

    // zero line and decile ticks
    let y0 = ypix(0.0);
    let _ = writeln!(
        s,
        r##"<line x1="{}" y1="{y0:.1}" x2="{}" y2="{y0:.1}" stroke="#888" stroke-width="1"/>"##,
        xpix(0.0),
        xpix(1.0)
    );
    for k in 0..=10 {
        let x = xpix(k as f64 / 10.0);
        let yb = top + MARGIN_T + plot_h;
        let _ = writeln!(
            s,
            r##"<line x1="{x:.1}" y1="{yb:.1}" x2="{x:.1}" y2="{:.1}" stroke="#444" stroke-width="1"/>"##,
            yb + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" font-family="monospace" font-size="10" text-anchor="middle">{:.1}</text>"#,
            yb + 16.0,
            k as f64 / 10.0
        );
    }
    // y-axis labels at integers
    let mut v = lo.ceil();
    while v <= hi {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="10" text-anchor="end">{v}</text>"#,
            MARGIN_L - 6.0,
            ypix(v) + 3.0
        );
        v += 1.0;
    }

    // bars, flagged red when below their bucket barrier
    let bar_w = (plot_w / p.points.len() as f64 * 0.7).clamp(0.5, 8.0);
    for ((&pt, &bar), &bucket) in p.points.iter().zip(p.bars).zip(p.buckets) {
        let flagged = p.barriers[(bucket - 1) as usize].is_some_and(|l| bar < l);
        let color = if flagged { "#b22222" } else { "#4682b4" };
        let x = xpix(pt) - bar_w / 2.0;
        let (y, h) = if bar >= 0.0 {
            (ypix(bar), y0 - ypix(bar))
        } else {
            (y0, ypix(bar) - y0)
        };
        let _ = writeln!(
            s,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{bar_w:.2}" height="{h:.2}" fill="{color}"/>"#
        );
    }
}
