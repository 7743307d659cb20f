use std::fmt::Write as _;

use super::{StrategicPoint, Thresholds, Zone};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

fn zone_color(zone: Option<Zone>) -> &'static str {
    match zone {
        Some(Zone::Pioneering) => "#1b9e77",
        Some(Zone::Niche) => "#7570b3",
        Some(Zone::Shadow) => "#999999",
        Some(Zone::Follower) => "#d95f02",
        None => "#000000",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Minimal scatter plot of one year's strategic points with the zone
/// threshold lines.
pub fn render_scatter_svg(year: i32, points: &[StrategicPoint], thresholds: Thresholds) -> String {
    let span = |vals: &mut dyn Iterator<Item = f64>, th: f64| {
        let (lo, hi) = vals.fold((th, th), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let pad = ((hi - lo) * 0.1).max(0.5);
        (lo - pad, hi + pad)
    };
    let (x_lo, x_hi) = span(&mut points.iter().map(|p| p.x), thresholds.x);
    let (y_lo, y_hi) = span(&mut points.iter().map(|p| p.y), thresholds.y);
    let plot = SIZE - 2.0 * MARGIN;
    let px = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * plot;
    let py = |y: f64| SIZE - MARGIN - (y - y_lo) / (y_hi - y_lo) * plot;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot}" height="{plot}" fill="none" stroke="black"/>"#
    );
    let (tx, ty) = (px(thresholds.x), py(thresholds.y));
    let _ = writeln!(
        out,
        r#"<line x1="{tx:.2}" y1="{MARGIN}" x2="{tx:.2}" y2="{:.2}" stroke="black" stroke-dasharray="4 3"/>"#,
        SIZE - MARGIN
    );
    let _ = writeln!(
        out,
        r#"<line x1="{MARGIN}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="black" stroke-dasharray="4 3"/>"#,
        SIZE - MARGIN
    );
    let _ = writeln!(out, r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14">{year}</text>"#, SIZE / 2.0);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">within-industry representativeness</text>"#,
        SIZE / 2.0,
        SIZE - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="12" y="{:.2}" text-anchor="middle" transform="rotate(-90 12 {:.2})">cross-sector distinctiveness</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    for p in points {
        let zone = p.zone.map_or("unassigned", Zone::as_str);
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{}"><title>{} ({zone})</title></circle>"#,
            px(p.x),
            py(p.y),
            zone_color(p.zone),
            escape(&p.company_id)
        );
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, px(p.x) + 6.0, py(p.y) + 3.0, escape(&p.company_id));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_has_every_point() {
        let pts: Vec<StrategicPoint> = (0..3)
            .map(|i| StrategicPoint {
                company_id: format!("c<{i}>"),
                year: 2020,
                x_raw: 0.0,
                y_raw: 0.0,
                x: i as f64,
                y: -(i as f64),
                zone: Some(Zone::Shadow),
            })
            .collect();
        let svg = render_scatter_svg(2020, &pts, Thresholds { x: 1.0, y: -1.0 });
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("c&lt;2&gt;"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
