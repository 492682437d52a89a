//! Self-contained SVG line chart of one trajectory.

use std::fmt::Write as _;

use novelty_core::BookRecord;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Novelty against paragraph index, with the PAA segments drawn as steps
/// and the curve class in the title.
pub fn render_svg(record: &BookRecord) -> String {
    let values = &record.trajectory;
    let n = values.len();
    let (mut lo, mut hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo < 1e-9 {
        lo -= 0.5;
        hi += 0.5;
    }
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let x = |i: f64| MARGIN + if n > 1 { i / (n - 1) as f64 * plot_w } else { plot_w / 2.0 };
    let y = |v: f64| MARGIN + (hi - v) / (hi - lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    let title = match &record.descriptors {
        Some(d) => format!("{}: {} (slope {:+.4})", record.book_id, d.curve, d.slope),
        None => record.book_id.clone(),
    };
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="25" font-size="14">{}</text>"#, escape(&title));

    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(s, r#"<path d="M{x0} {y0}V{y1}H{x1}" fill="none" stroke="black"/>"#);
    let _ = writeln!(s, r#"<text x="{x0}" y="{:.2}" text-anchor="start">0</text>"#, y1 + 18.0);
    let _ = writeln!(s, r#"<text x="{x1}" y="{:.2}" text-anchor="end">{}</text>"#, y1 + 18.0, n.saturating_sub(1));
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{hi:.3}</text>"#, x0 - 4.0, y0 + 4.0);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{lo:.3}</text>"#, x0 - 4.0, y1);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">paragraph</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0);

    let points: Vec<String> = values.iter().enumerate().map(|(i, &v)| format!("{:.2},{:.2}", x(i as f64), y(v))).collect();
    let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="1"/>"##, points.join(" "));

    if let Some(paa) = record.paa() {
        let seg = n as f64 / paa.len() as f64;
        let mut d = String::new();
        for (j, &v) in paa.iter().enumerate() {
            let start = x((j as f64 * seg).min((n - 1) as f64));
            let end = x((((j + 1) as f64) * seg).min((n - 1) as f64));
            let _ = write!(d, "M{start:.2} {:.2}H{end:.2}", y(v));
        }
        let _ = writeln!(s, r##"<path d="{d}" fill="none" stroke="#d62728" stroke-width="2"/>"##);
    }
    s.push_str("</svg>\n");
    s
}
