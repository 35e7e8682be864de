//! Standalone SVG figures: streamlines (Ψ contours), vorticity heatmap and
//! the surface profile against its leading-order prediction.

use std::fmt::Write;
use vortex_spike::wave::MappedField;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 50.0;

/// Affine map from data coordinates to the SVG canvas.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl Frame {
    pub fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * (WIDTH - 2.0 * MARGIN)
    }

    pub fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y_range.0) / (self.y_range.1 - self.y_range.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(title: &str, hash: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <!-- config_hash {hash} -->\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{title}</text>\n",
        WIDTH / 2.0
    )
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (x0, x1) = frame.x_range;
    let (y0, y1) = frame.y_range;
    let _ = writeln!(
        out,
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\" stroke-width=\"0.8\"/>",
        frame.px(x0),
        frame.py(y1),
        frame.px(x1) - frame.px(x0),
        frame.py(y0) - frame.py(y1)
    );
    for (v, anchor) in [(x0, "start"), (0.5 * (x0 + x1), "middle"), (x1, "end")] {
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"{anchor}\">{v:.3}</text>",
            frame.px(v),
            frame.py(y0) + 16.0
        );
    }
    for v in [y0, y1] {
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{v:.3}</text>",
            frame.px(x0) - 4.0,
            frame.py(v) + 4.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{x_label}</text>",
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"14\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 {:.2})\" text-anchor=\"middle\">{y_label}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
}

fn polyline(out: &mut String, frame: &Frame, pts: impl Iterator<Item = (f64, f64)>, style: &str) {
    let mut d = String::new();
    for (n, (x, y)) in pts.enumerate() {
        let _ = write!(d, "{}{:.2},{:.2} ", if n == 0 { "M" } else { "L" }, frame.px(x), frame.py(y));
    }
    let _ = writeln!(out, "<path d=\"{}\" fill=\"none\" {style}/>", d.trim_end());
}

/// Physical position of fractional grid index (i, k) on a mapped field.
fn position(f: &MappedField, i: f64, k: f64) -> (f64, f64) {
    let i0 = (i.floor() as usize).min(f.ncols() - 2);
    let s = i - i0 as f64;
    let x = f.x1[i0] + s * (f.x1[i0 + 1] - f.x1[i0]);
    let top = f.top[i0] + s * (f.top[i0 + 1] - f.top[i0]);
    (x, -1.0 + k / f.levels as f64 * (top + 1.0))
}

/// Marching-squares segments of the level set {f = level}, in fractional
/// grid indices, over columns [lo, hi).
pub fn contour_segments(f: &MappedField, level: f64, lo: usize, hi: usize) -> Vec<[(f64, f64); 2]> {
    let mut segs = Vec::new();
    let cross = |a: f64, b: f64| (level - a) / (b - a);
    for k in 0..f.levels {
        for i in lo..hi.min(f.ncols() - 1) {
            let v = [f.at(i, k), f.at(i + 1, k), f.at(i + 1, k + 1), f.at(i, k + 1)];
            let case = v.iter().enumerate().fold(0, |c, (n, &x)| c | (((x > level) as usize) << n));
            if case == 0 || case == 15 {
                continue;
            }
            let (fi, fk) = (i as f64, k as f64);
            // edges: 0 bottom, 1 right, 2 top, 3 left
            let edge = |e: usize| match e {
                0 => (fi + cross(v[0], v[1]), fk),
                1 => (fi + 1.0, fk + cross(v[1], v[2])),
                2 => (fi + cross(v[3], v[2]), fk + 1.0),
                _ => (fi, fk + cross(v[0], v[3])),
            };
            let pairs: &[(usize, usize)] = match case {
                1 | 14 => &[(3, 0)],
                2 | 13 => &[(0, 1)],
                3 | 12 => &[(3, 1)],
                4 | 11 => &[(1, 2)],
                6 | 9 => &[(0, 2)],
                7 | 8 => &[(3, 2)],
                5 => &[(3, 0), (1, 2)],
                _ => &[(0, 1), (2, 3)],
            };
            for &(a, b) in pairs {
                segs.push([edge(a), edge(b)]);
            }
        }
    }
    segs
}

fn column_window(f: &MappedField, half: f64) -> (usize, usize) {
    let lo = f.x1.iter().position(|&x| x >= -half).unwrap_or(0);
    let hi = f.x1.iter().rposition(|&x| x <= half).map_or(f.ncols(), |p| p + 1);
    (lo, hi)
}

fn y_range(f: &MappedField) -> (f64, f64) {
    let top = f.top.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (-1.0, top + 0.05)
}

/// Ψ contours with the free surface and the bed, |x| ≤ `half`.
pub fn streamlines(psi: &MappedField, half: f64, hash: &str) -> String {
    let (lo, hi) = column_window(psi, half);
    let frame = Frame { x_range: (-half, half), y_range: y_range(psi) };
    let mut out = header("streamlines and free surface", hash);
    axes(&mut out, &frame, "x", "y");
    let peak = psi.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for frac in [0.95, 0.8, 0.6, 0.4, 0.25, 0.12, 0.05, 0.02, 0.005, 1e-3, 2e-4] {
        let mut d = String::new();
        for [a, b] in contour_segments(psi, frac * peak, lo, hi) {
            let (xa, ya) = position(psi, a.0, a.1);
            let (xb, yb) = position(psi, b.0, b.1);
            let _ = write!(d, "M{:.2},{:.2} L{:.2},{:.2} ", frame.px(xa), frame.py(ya), frame.px(xb), frame.py(yb));
        }
        if !d.is_empty() {
            let _ = writeln!(out, "<path d=\"{}\" fill=\"none\" stroke=\"#1f4e99\" stroke-width=\"0.9\"/>", d.trim_end());
        }
    }
    polyline(&mut out, &frame, (lo..hi).map(|i| (psi.x1[i], psi.top[i])), "stroke=\"black\" stroke-width=\"1.6\"");
    polyline(&mut out, &frame, [(-half, -1.0), (half, -1.0)].into_iter(), "stroke=\"black\" stroke-width=\"1.6\"");
    out.push_str("</svg>\n");
    out
}

fn diverging(t: f64) -> String {
    // t in [−1, 1]: blue for negative, red for positive
    let t = t.clamp(-1.0, 1.0);
    let (r, g, b) = if t < 0.0 {
        let s = -t;
        (255.0 * (1.0 - s), 255.0 * (1.0 - 0.7 * s), 255.0)
    } else {
        (255.0, 255.0 * (1.0 - 0.8 * t), 255.0 * (1.0 - t))
    };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

/// Vorticity on the mapped cells, colour ∝ sign(ω)|ω/ω_max|^{1/3}.
pub fn vorticity(omega: &MappedField, half: f64, hash: &str) -> String {
    let (lo, hi) = column_window(omega, half);
    let frame = Frame { x_range: (-half, half), y_range: y_range(omega) };
    let mut out = header("vorticity (blue negative, red positive, cube-root scale)", hash);
    let peak = omega.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    for k in 0..omega.levels {
        for i in lo..hi.min(omega.ncols() - 1) {
            let mean = 0.25 * (omega.at(i, k) + omega.at(i + 1, k) + omega.at(i + 1, k + 1) + omega.at(i, k + 1));
            let t = mean.signum() * (mean.abs() / peak).cbrt();
            let corners = [(i as f64, k as f64), (i as f64 + 1.0, k as f64), (i as f64 + 1.0, k as f64 + 1.0), (i as f64, k as f64 + 1.0)];
            let mut d = String::new();
            for (n, (a, b)) in corners.iter().enumerate() {
                let (x, y) = position(omega, *a, *b);
                let _ = write!(d, "{}{:.2},{:.2} ", if n == 0 { "M" } else { "L" }, frame.px(x), frame.py(y));
            }
            let c = diverging(t);
            let _ = writeln!(out, "<path d=\"{}Z\" fill=\"{c}\" stroke=\"{c}\" stroke-width=\"0.3\"/>", d);
        }
    }
    axes(&mut out, &frame, "x", "y");
    out.push_str("</svg>\n");
    out
}

/// η and η₀ against x, |x| ≤ `half`.
pub fn surface(x: &[f64], eta: &[f64], eta0: &[f64], half: f64, hash: &str) -> String {
    let keep: Vec<usize> = (0..x.len()).filter(|&i| x[i].abs() <= half).collect();
    let lo = keep.iter().map(|&i| eta[i].min(eta0[i])).fold(f64::INFINITY, f64::min);
    let hi = keep.iter().map(|&i| eta[i].max(eta0[i])).fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.08 * (hi - lo).max(1e-12);
    let frame = Frame { x_range: (-half, half), y_range: (lo - pad, hi + pad) };
    let mut out = header("surface elevation: computed (black), leading order (red, dashed)", hash);
    axes(&mut out, &frame, "x", "eta");
    polyline(&mut out, &frame, keep.iter().map(|&i| (x[i], eta[i])), "stroke=\"black\" stroke-width=\"1.5\"");
    polyline(
        &mut out,
        &frame,
        keep.iter().map(|&i| (x[i], eta0[i])),
        "stroke=\"#c0392b\" stroke-width=\"1.2\" stroke-dasharray=\"6 4\"",
    );
    out.push_str("</svg>\n");
    out
}
