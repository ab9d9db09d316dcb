//! Text outputs: CSV time series, spectra and the SVG plot.

use std::fmt::Write as _;

use ionprobe_core::TimeSeries;

pub const CSV_HEADER: &str = "t,expectation,ground_probability";

/// `printf("%.*g")`: `sig` significant digits, trailing zeros removed,
/// scientific notation when the decimal exponent is below −4 or at least
/// `sig`.
pub fn format_g(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn g12(x: f64) -> String {
    format_g(x, 12)
}

/// One row per sample; flagged samples leave the expectation empty.
pub fn series_csv(series: &TimeSeries) -> String {
    let mut out = String::with_capacity(32 * (series.samples.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &series.samples {
        let e = s.expectation.map(g12).unwrap_or_default();
        let _ = writeln!(out, "{},{},{}", g12(s.t), e, g12(s.ground_probability));
    }
    out
}

/// Sorted eigenvalues, comma-separated. Magnitudes below `1e-12` print as 0.
pub fn spectrum_row(eigenvalues: &[f64]) -> String {
    eigenvalues
        .iter()
        .map(|&v| {
            if v.abs() < 1e-12 {
                "0".to_string()
            } else {
                g12(v)
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

const PANEL_W: f64 = 720.0;
const PANEL_H: f64 = 260.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 45.0;

/// Stacked panels, one per series, plotting the conditioned mean against
/// `gt`.
pub fn series_svg(series: &[TimeSeries]) -> String {
    let height = PANEL_H * series.len().max(1) as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_W}" height="{height}" viewBox="0 0 {PANEL_W} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, s) in series.iter().enumerate() {
        panel(&mut svg, s, i as f64 * PANEL_H);
    }
    svg.push_str("</svg>\n");
    svg
}

fn panel(svg: &mut String, series: &TimeSeries, y0: f64) {
    let points: Vec<(f64, f64)> = series.valid_samples().collect();
    let (t_min, t_max) = series
        .samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| {
            (a.min(s.t), b.max(s.t))
        });
    let n = series.n as f64;
    let (v_min, v_max) = if n > 0.0 { (-n, n) } else { (-1.0, 1.0) };
    let t_span = if t_max > t_min { t_max - t_min } else { 1.0 };

    let left = MARGIN_L;
    let right = PANEL_W - MARGIN_R;
    let top = y0 + MARGIN_T;
    let bottom = y0 + PANEL_H - MARGIN_B;
    let px = |t: f64| left + (t - t_min) / t_span * (right - left);
    let py = |v: f64| bottom - (v - v_min) / (v_max - v_min) * (bottom - top);

    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">N = {}</text>"#,
        (left + right) / 2.0,
        y0 + 18.0,
        series.n
    );
    let _ = writeln!(
        svg,
        r#"<path d="M{left},{top} V{bottom} H{right}" stroke="black" fill="none"/>"#
    );
    let zero = py(0.0);
    let _ = writeln!(
        svg,
        r##"<line x1="{left}" y1="{zero}" x2="{right}" y2="{zero}" stroke="#bbb" stroke-dasharray="4 3"/>"##
    );
    for v in [v_min, 0.0, v_max] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            left - 6.0,
            py(v) + 4.0,
            format_g(v, 4)
        );
    }
    for t in [t_min, t_max] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            px(t),
            bottom + 16.0,
            format_g(t, 4)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">gt</text>"#,
        (left + right) / 2.0,
        bottom + 34.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">⟨C_xy⟩ | ground</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0
    );
    if !points.is_empty() {
        let coords: Vec<String> = points
            .iter()
            .map(|&(t, v)| format!("{:.2},{:.2}", px(t), py(v)))
            .collect();
        let _ = writeln!(
            svg,
            r##"<polyline points="{}" fill="none" stroke="#1f5fa8" stroke-width="1.2"/>"##,
            coords.join(" ")
        );
    }
}
