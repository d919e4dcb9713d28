//! Minimal SVG rendering for process-matrix panels and sweep maps.
//!
//! Complex entries are coloured with hue `arg(z)/2π` (red at phase 0, then
//! yellow, green, cyan, blue, magenta) at full saturation, and brightness
//! `|z|/max`, where `max` is taken over the panel or the whole figure.

use std::f64::consts::PI;
use std::fmt::Write;

use num_complex::Complex64;

const PAULIS: [&str; 4] = ["I", "X", "Y", "Z"];

pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let h = h.rem_euclid(1.0) * 6.0;
    let i = h.floor();
    let f = h - i;
    let (p, q, t) = (v * (1.0 - s), v * (1.0 - s * f), v * (1.0 - s * (1.0 - f)));
    let (r, g, b) = match i as u8 {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    let byte = |x: f64| (x.clamp(0.0, 1.0) * 255.0).round() as u8;
    [byte(r), byte(g), byte(b)]
}

pub fn complex_color(z: Complex64, max: f64) -> String {
    let v = if max > 0.0 { z.norm() / max } else { 0.0 };
    let hue = z.arg() / (2.0 * PI);
    let [r, g, b] = hsv_to_rgb(hue, 1.0, v);
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// How brightness is normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    PerPanel,
    Global,
}

/// Phase-and-magnitude legend disc centred at `(cx, cy)`.
fn legend_wheel(out: &mut String, cx: f64, cy: f64, radius: f64) {
    let sectors = 48;
    let rings = 8;
    for ring in 0..rings {
        let r0 = radius * ring as f64 / rings as f64;
        let r1 = radius * (ring + 1) as f64 / rings as f64;
        let v = (ring as f64 + 0.5) / rings as f64;
        for s in 0..sectors {
            let a0 = 2.0 * PI * s as f64 / sectors as f64;
            let a1 = 2.0 * PI * (s + 1) as f64 / sectors as f64;
            let [r, g, b] = hsv_to_rgb((s as f64 + 0.5) / sectors as f64, 1.0, v);
            // SVG y grows downward, so negate sines to keep phase counter-clockwise
            let pt = |rad: f64, a: f64| (cx + rad * a.cos(), cy - rad * a.sin());
            let (x0, y0) = pt(r0, a0);
            let (x1, y1) = pt(r1, a0);
            let (x2, y2) = pt(r1, a1);
            let (x3, y3) = pt(r0, a1);
            let _ = writeln!(
                out,
                r##"<path d="M{x0:.2},{y0:.2} L{x1:.2},{y1:.2} L{x2:.2},{y2:.2} L{x3:.2},{y3:.2} Z" fill="#{r:02x}{g:02x}{b:02x}" stroke="none"/>"##
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">hue: arg/2π, brightness: |χ|/max</text>"#,
        cx,
        cy + radius + 16.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="start">0</text>"#,
        cx + radius + 4.0,
        cy + 4.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">π/2</text>"#,
        cx,
        cy - radius - 4.0
    );
}

/// A 4×4 grid of panels, one per `(a, a′)`. `values[k][4a + a′]` is the entry
/// at syndrome `k` of an `n × n` grid with `m_q` varying slowest; within a
/// panel `m_q` runs left to right and `m_p` bottom to top.
pub fn process_panels(n: usize, values: &[[Complex64; 16]], scale: Scale, title: &str) -> String {
    let panel = 120.0;
    let gap = 14.0;
    let margin = 30.0;
    let legend = 170.0;
    let width = margin * 2.0 + 4.0 * panel + 3.0 * gap + legend;
    let height = margin * 2.0 + 4.0 * panel + 3.0 * gap + 10.0;
    let cell = panel / n as f64;
    let global = values.iter().flat_map(|v| v.iter().map(|z| z.norm())).fold(0.0, f64::max);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{margin}" y="18" font-size="13">{}</text>"#, escape(title));
    for a in 0..4 {
        for b in 0..4 {
            let idx = 4 * a + b;
            let max = match scale {
                Scale::PerPanel => values.iter().map(|v| v[idx].norm()).fold(0.0, f64::max),
                Scale::Global => global,
            };
            let x0 = margin + b as f64 * (panel + gap);
            let y0 = margin + a as f64 * (panel + gap);
            let _ = writeln!(out, r#"<g id="chi-{}{}">"#, PAULIS[a], PAULIS[b]);
            for (k, v) in values.iter().enumerate() {
                let (iq, ip) = (k / n, k % n);
                let x = x0 + iq as f64 * cell;
                let y = y0 + (n - 1 - ip) as f64 * cell;
                let _ = writeln!(
                    out,
                    r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{w:.2}" fill="{}"/>"#,
                    complex_color(v[idx], max),
                    w = cell + 0.05
                );
            }
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="10" fill="white">{}{}</text>"#,
                x0 + 3.0,
                y0 + 11.0,
                PAULIS[a],
                PAULIS[b]
            );
            let _ = writeln!(out, "</g>");
        }
    }
    let cx = margin + 4.0 * panel + 3.0 * gap + legend / 2.0;
    legend_wheel(&mut out, cx, margin + 80.0, 60.0);
    let _ = writeln!(out, "</svg>");
    out
}

/// A sequential map of sweep values on a `(β, γ)` grid with the per-column
/// minimiser drawn as a white line. `rows` are `(β, γ, value)` with `γ`
/// outermost.
pub fn sweep_map(betas: &[f64], gammas: &[f64], rows: &[(f64, f64, f64)], argmin: &[(f64, f64)]) -> String {
    let (w, h) = (480.0, 360.0);
    let (left, top, right, bottom) = (60.0, 30.0, 30.0, 50.0);
    let nb = betas.len();
    let ng = gammas.len();
    let (cw, ch) = (w / nb as f64, h / ng as f64);
    let finite: Vec<f64> = rows.iter().map(|r| r.2).filter(|v| v.is_finite() && *v > 0.0).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min).max(1e-12).log10();
    let hi = finite.iter().copied().fold(0.0, f64::max).max(1e-12).log10();
    let span = (hi - lo).max(1e-12);

    let mut out = String::new();
    let (tw, th) = (left + w + right, top + h + bottom);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{tw:.0}" height="{th:.0}" viewBox="0 0 {tw:.0} {th:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{left}" y="18" font-size="13">log10 infidelity, {lo:.2} (dark) to {hi:.2} (bright)</text>"#
    );
    for (k, &(_, _, v)) in rows.iter().enumerate() {
        let (ig, ib) = (k / nb, k % nb);
        let t = if v > 0.0 { ((v.log10() - lo) / span).clamp(0.0, 1.0) } else { 0.0 };
        // dark blue through magenta to yellow
        let [r, g, b] = hsv_to_rgb(0.67 + 0.5 * t, 0.85, 0.25 + 0.75 * t);
        let x = left + ib as f64 * cw;
        let y = top + (ng - 1 - ig) as f64 * ch;
        let _ = writeln!(
            out,
            r##"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
            cw + 0.05,
            ch + 0.05
        );
    }
    let to_x = |beta: f64| {
        let i = betas.iter().position(|&b| b == beta).unwrap_or(0);
        left + (i as f64 + 0.5) * cw
    };
    let to_y = |gamma: f64| {
        let i = gammas.iter().position(|&g| g == gamma).unwrap_or(0);
        top + (ng as f64 - 0.5 - i as f64) * ch
    };
    let points: Vec<String> = argmin.iter().map(|&(g, b)| format!("{:.2},{:.2}", to_x(b), to_y(g))).collect();
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="white" stroke-width="2"/>"#,
        points.join(" ")
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">β from {} to {}</text>"#,
        left + w / 2.0,
        top + h + 30.0,
        betas[0],
        betas[nb - 1]
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">γ from {} to {}</text>"#,
        top + h / 2.0,
        top + h / 2.0,
        gammas[0],
        gammas[ng - 1]
    );
    let _ = writeln!(out, "</svg>");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primary_hues() {
        assert_eq!(hsv_to_rgb(0.0, 1.0, 1.0), [255, 0, 0]);
        assert_eq!(hsv_to_rgb(1.0 / 3.0, 1.0, 1.0), [0, 255, 0]);
        assert_eq!(hsv_to_rgb(2.0 / 3.0, 1.0, 1.0), [0, 0, 255]);
        assert_eq!(hsv_to_rgb(0.4, 1.0, 0.0), [0, 0, 0]);
    }

    #[test]
    fn colour_follows_phase_and_magnitude() {
        assert_eq!(complex_color(Complex64::new(2.0, 0.0), 2.0), "#ff0000");
        assert_eq!(complex_color(Complex64::new(-1.0, 0.0), 1.0), "#00ffff");
        assert_eq!(complex_color(Complex64::new(0.0, 0.0), 0.0), "#000000");
    }

    #[test]
    fn panels_have_sixteen_groups_and_a_legend() {
        let v = vec![[Complex64::new(1.0, 0.5); 16]; 4];
        let svg = process_panels(2, &v, Scale::PerPanel, "t");
        assert_eq!(svg.matches("<g id=\"chi-").count(), 16);
        assert!(svg.contains("arg/2π"));
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}
