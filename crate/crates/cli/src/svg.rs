//! Minimal self-contained SVG line charts of the figure data.

use std::fmt::Write as _;

use mutsel::harness::format_sig;

use crate::{Fig2Row, Fig5Row};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

pub struct Series<'a> {
    pub label: &'a str,
    pub colour: &'a str,
    pub points: Vec<(f64, f64)>,
}

/// Draws `series` on shared axes. The plotted coordinates are exactly the
/// given points.
pub fn line_chart(title: &str, x_label: &str, series: &[Series]) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter().copied());
    let (x_min, x_max) = bounds(all().map(|p| p.0));
    let (y_min, y_max) = bounds(all().map(|p| p.1).chain([0.0]));
    let sx = |x: f64| MARGIN + (x - x_min) / (x_max - x_min) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y_min) / (y_max - y_min) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="25" text-anchor="middle" font-size="15">{title}</text>"#, WIDTH / 2.0);
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);
    let _ = writeln!(out, r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#);
    for (x, anchor) in [(x_min, "start"), (x_max, "end")] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="{anchor}" font-size="11">{}</text>"#,
            sx(x),
            y0 + 15.0,
            format_sig(x)
        );
    }
    for y in [y_min, y_max] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end" font-size="11">{}</text>"#,
            x0 - 5.0,
            sy(y) + 4.0,
            format_sig(y)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{x_label}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    for (i, s) in series.iter().enumerate() {
        let coords: Vec<String> = s.points.iter().map(|&(x, y)| format!("{},{}", sx(x), sy(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
            s.colour,
            coords.join(" ")
        );
        let ly = MARGIN + 15.0 * i as f64;
        let _ =
            writeln!(out, r#"<text x="{}" y="{ly}" font-size="12" fill="{}">{}</text>"#, x0 + 10.0, s.colour, s.label);
    }
    out.push_str("</svg>\n");
    out
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

pub fn fig2_svg(rows: &[Fig2Row], nu0: f64) -> String {
    let series = [
        Series { label: "y_bar", colour: "black", points: rows.iter().map(|r| (r.u_over_s, r.y_bar)).collect() },
        Series { label: "y_star", colour: "grey", points: rows.iter().map(|r| (r.u_over_s, r.y_star)).collect() },
    ];
    line_chart(&format!("Equilibria, nu0 = {}", format_sig(nu0)), "u/s", &series)
}

pub fn fig5_svg(rows: &[Fig5Row], nu0: f64) -> String {
    let series =
        [Series { label: "g_eq", colour: "black", points: rows.iter().map(|r| (r.u_over_s, r.g_eq)).collect() }];
    line_chart(&format!("Unfit ancestral type at equilibrium, nu0 = {}", format_sig(nu0)), "u/s", &series)
}
