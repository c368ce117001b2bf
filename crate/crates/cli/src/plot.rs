//! Static SVG of a sweep. Curve styles are fixed so that plots diff cleanly:
//!
//! | curve       | color     | stroke     |
//! |-------------|-----------|------------|
//! | `cb_s`      | `#1f77b4` | solid      |
//! | `cb_in`     | `#ff7f0e` | dashed     |
//! | `cb_in_new` | `#2ca02c` | solid      |
//! | `cb_out`    | `#d62728` | dotted     |

use std::fmt::Write;

use wtfb::binary::SweepRow;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

pub const CURVES: [(&str, &str, &str); 4] = [
    ("cb_s", "#1f77b4", ""),
    ("cb_in", "#ff7f0e", "6 4"),
    ("cb_in_new", "#2ca02c", ""),
    ("cb_out", "#d62728", "2 3"),
];

fn value(row: &SweepRow, curve: usize) -> f64 {
    [row.cb_s, row.cb_in, row.cb_in_new, row.cb_out][curve]
}

/// `comment` lands in an XML comment at the top; it must not contain `--`.
pub fn sweep_svg(p1: f64, rows: &[SweepRow], comment: &str) -> String {
    let (x0, x1) = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) if b.p2 > a.p2 => (a.p2, b.p2),
        (Some(a), _) => (a.p2 - 0.01, a.p2 + 0.01),
        _ => (0.0, 0.5),
    };
    let top = rows.iter().flat_map(|r| (0..4).map(move |c| value(r, c))).fold(0.0f64, f64::max);
    // round the y range up to a tenth, at least 0.1
    let y1 = ((top * 10.0).ceil() / 10.0).max(0.1);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + (1.0 - y / y1) * plot_h;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, "<!-- {} -->", comment.replace("--", "- -"));
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for k in 0..=5 {
        let xv = x0 + (x1 - x0) * k as f64 / 5.0;
        let yv = y1 * k as f64 / 5.0;
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{b:.2}" x2="{px:.2}" y2="{t:.2}" stroke="black"/><text x="{px:.2}" y="{l:.2}" text-anchor="middle">{xv:.3}</text>"#,
            b = TOP + plot_h,
            t = TOP + plot_h - 5.0,
            l = TOP + plot_h + 18.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{py:.2}" x2="{r:.2}" y2="{py:.2}" stroke="black"/><text x="{l:.2}" y="{ty:.2}" text-anchor="end">{yv:.2}</text>"#,
            r = LEFT + 5.0,
            l = LEFT - 8.0,
            ty = py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">p2</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">bits per channel use</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="18" text-anchor="middle">p1 = {p1}</text>"#,
        LEFT + plot_w / 2.0
    );
    for (c, (name, color, dash)) in CURVES.iter().enumerate() {
        let points: Vec<String> =
            rows.iter().map(|r| format!("{:.2},{:.2}", sx(r.p2), sy(value(r, c)))).collect();
        let dash_attr = if dash.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{dash}""#) };
        let _ = writeln!(
            s,
            r#"<polyline id="{name}" fill="none" stroke="{color}" stroke-width="2"{dash_attr} points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 20.0 + 22.0 * c as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.0}" y2="{ly}" stroke="{color}" stroke-width="2"{dash_attr}/><text x="{:.0}" y="{:.0}">{name}</text>"#,
            lx + 30.0,
            lx + 38.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}
