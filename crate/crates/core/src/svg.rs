//! Flat SVG figures: planar bodies with lattice points, and CDFs of measures
//! on the line. Floats appear only here, as screen coordinates.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::rat::{to_f64, QVec, Rat};
use crate::ratgeom::ConvexBody;
use crate::testcurves::PPMeasure;

const SIZE: f64 = 480.0;
const PAD: f64 = 40.0;

pub const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Frame {
    lo: [f64; 2],
    hi: [f64; 2],
}

impl Frame {
    fn fit(points: impl Iterator<Item = [f64; 2]>) -> Frame {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        for i in 0..2 {
            if !lo[i].is_finite() {
                lo[i] = 0.0;
                hi[i] = 1.0;
            }
            lo[i] = lo[i].floor();
            hi[i] = hi[i].ceil().max(lo[i] + 1.0);
        }
        Frame { lo, hi }
    }

    fn scale(&self) -> f64 {
        (SIZE - 2.0 * PAD) / (self.hi[0] - self.lo[0]).max(self.hi[1] - self.lo[1])
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let s = self.scale();
        (PAD + (p[0] - self.lo[0]) * s, SIZE - PAD - (p[1] - self.lo[1]) * s)
    }
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <title>{}</title>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn xy(v: &QVec) -> [f64; 2] {
    [to_f64(&v[0]), to_f64(&v[1])]
}

/// Vertices of a planar polygon in counterclockwise order.
fn cyclic(vertices: &[QVec]) -> Vec<[f64; 2]> {
    let pts: Vec<[f64; 2]> = vertices.iter().map(xy).collect();
    let n = pts.len() as f64;
    let c = [pts.iter().map(|p| p[0]).sum::<f64>() / n, pts.iter().map(|p| p[1]).sum::<f64>() / n];
    let mut out = pts;
    out.sort_by(|a, b| {
        let ta = (a[1] - c[1]).atan2(a[0] - c[0]);
        let tb = (b[1] - c[1]).atan2(b[0] - c[0]);
        ta.total_cmp(&tb)
    });
    out
}

/// Planar bodies (each with a colour) over an integer grid, plus marked
/// points such as normalized valuation vectors.
pub fn bodies_svg(title: &str, bodies: &[(&ConvexBody, &str)], points: &[QVec]) -> Result<String> {
    for (b, _) in bodies {
        if b.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: b.dim() });
        }
    }
    if let Some(p) = points.iter().find(|p| p.dim() != 2) {
        return Err(Error::DimensionMismatch { expected: 2, got: p.dim() });
    }
    let frame = Frame::fit(
        bodies
            .iter()
            .flat_map(|(b, _)| b.vertices().iter().map(xy))
            .chain(points.iter().map(xy)),
    );
    let mut s = header(title);
    for x in frame.lo[0] as i64..=frame.hi[0] as i64 {
        let (a, b) = (frame.map([x as f64, frame.lo[1]]), frame.map([x as f64, frame.hi[1]]));
        let _ = writeln!(s, "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#ddd\"/>", a.0, a.1, b.0, b.1);
    }
    for y in frame.lo[1] as i64..=frame.hi[1] as i64 {
        let (a, b) = (frame.map([frame.lo[0], y as f64]), frame.map([frame.hi[0], y as f64]));
        let _ = writeln!(s, "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#ddd\"/>", a.0, a.1, b.0, b.1);
    }
    for (b, colour) in bodies {
        let pts: Vec<String> = cyclic(b.vertices())
            .into_iter()
            .map(|p| {
                let (x, y) = frame.map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            "<polygon points=\"{}\" fill=\"{colour}\" fill-opacity=\"0.25\" stroke=\"{colour}\" stroke-width=\"2\"/>",
            pts.join(" ")
        );
        for v in b.vertices() {
            let (x, y) = frame.map(xy(v));
            let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3.5\" fill=\"{colour}\"/>");
        }
    }
    for p in points {
        let (x, y) = frame.map(xy(p));
        let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2\" fill=\"black\"/>");
    }
    let (ox, oy) = frame.map([frame.lo[0], frame.lo[1]]);
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" font-family=\"sans-serif\">({}, {})</text>",
        ox,
        oy + 16.0,
        frame.lo[0],
        frame.lo[1]
    );
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn body_svg(title: &str, body: &ConvexBody, points: &[QVec]) -> Result<String> {
    bodies_svg(title, &[(body, PALETTE[0])], points)
}

/// Cumulative distribution functions of measures on `[lo, hi]`, each drawn
/// as a polyline through `samples + 1` equally spaced abscissae.
pub fn cdf_svg(title: &str, measures: &[(&PPMeasure, &str)], lo: &Rat, hi: &Rat, samples: u32) -> String {
    let (a, b) = (to_f64(lo), to_f64(hi));
    let top = measures
        .iter()
        .map(|(m, _)| to_f64(&m.mass()))
        .fold(0.0_f64, f64::max)
        .max(1e-12);
    let sx = |x: f64| PAD + (x - a) / (b - a).max(1e-12) * (SIZE - 2.0 * PAD);
    let sy = |y: f64| SIZE - PAD - y / top * (SIZE - 2.0 * PAD);
    let mut s = header(title);
    let _ = writeln!(
        s,
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{w}\" height=\"{w}\" fill=\"none\" stroke=\"#999\"/>",
        w = SIZE - 2.0 * PAD
    );
    let steps = samples.max(2);
    let xs: Vec<Rat> = (0..=steps)
        .map(|i| lo + (hi - lo) * Rat::new(i.into(), steps.into()))
        .collect();
    for (m, colour) in measures {
        let mut pts = Vec::new();
        let mut prev: Option<f64> = None;
        for x in &xs {
            let y = to_f64(&m.cdf(x));
            let fx = to_f64(x);
            if let Some(py) = prev {
                if (py - y).abs() > 1e-12 {
                    pts.push(format!("{:.2},{:.2}", sx(fx), sy(py)));
                }
            }
            pts.push(format!("{:.2},{:.2}", sx(fx), sy(y)));
            prev = Some(y);
        }
        let _ = writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\"/>", pts.join(" "));
    }
    let _ = writeln!(
        s,
        "<text x=\"{PAD}\" y=\"{:.2}\" font-size=\"12\" font-family=\"sans-serif\">{a}</text>\n\
         <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"end\">{b}</text>",
        SIZE - PAD + 16.0,
        SIZE - PAD,
        SIZE - PAD + 16.0
    );
    s.push_str("</svg>\n");
    s
}
