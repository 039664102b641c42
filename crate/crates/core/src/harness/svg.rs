//! Minimal static SVG figures: line plots and colour-coded scatter plots.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 48.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit<'a>(pts: impl Iterator<Item = &'a (f64, f64)>) -> Frame {
        let mut f = Frame { x0: f64::INFINITY, x1: f64::NEG_INFINITY, y0: f64::INFINITY, y1: f64::NEG_INFINITY };
        for &(x, y) in pts.filter(|p| p.0.is_finite() && p.1.is_finite()) {
            f.x0 = f.x0.min(x);
            f.x1 = f.x1.max(x);
            f.y0 = f.y0.min(y);
            f.y1 = f.y1.max(y);
        }
        if !f.x0.is_finite() {
            return Frame { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 };
        }
        if f.x1 == f.x0 {
            f.x1 = f.x0 + 1.0;
        }
        if f.y1 == f.y0 {
            f.y1 = f.y0 + 1.0;
        }
        f
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD);
        let py = H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD);
        (px, py)
    }

    fn axes(&self, s: &mut String, title: &str) {
        let _ = write!(
            s,
            r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let _ = write!(s, r#"<text x="{}" y="24" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
        let labels = [
            (PAD, H - PAD + 16.0, "start", self.x0),
            (W - PAD, H - PAD + 16.0, "end", self.x1),
            (PAD - 4.0, H - PAD, "end", self.y0),
            (PAD - 4.0, PAD + 4.0, "end", self.y1),
        ];
        for (x, y, anchor, v) in labels {
            let _ = write!(s, r#"<text x="{x}" y="{y}" font-size="11" text-anchor="{anchor}">{v:.3}</text>"#);
        }
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn finish<O: Write>(body: String, out: &mut O) -> Result<()> {
    write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif">{body}</svg>"#
    )
    .map_err(|e| Error::io("<svg>", e))
}

/// One polyline per named series, with a legend.
pub fn write_line_svg<O: Write>(title: &str, series: &[(String, Vec<(f64, f64)>)], out: &mut O) -> Result<()> {
    let frame = Frame::fit(series.iter().flat_map(|(_, p)| p.iter()));
    let mut s = String::new();
    frame.axes(&mut s, title);
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| {
                let (px, py) = frame.map(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let _ = write!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        let ly = PAD + 16.0 + 16.0 * k as f64;
        let _ = write!(
            s,
            r#"<text x="{}" y="{ly}" font-size="12" fill="{color}">{}</text>"#,
            W - PAD - 110.0,
            escape(name)
        );
    }
    finish(s, out)
}

/// Points coloured by value on a blue (low) to red (high) ramp.
pub fn write_scatter_svg<O: Write>(title: &str, points: &[(f64, f64)], values: &[f64], out: &mut O) -> Result<()> {
    if points.len() != values.len() {
        return Err(Error::param(format!("{} points but {} values", points.len(), values.len())));
    }
    let frame = Frame::fit(points.iter());
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut s = String::new();
    frame.axes(&mut s, title);
    for (&(x, y), &v) in points.iter().zip(values) {
        let (px, py) = frame.map(x, y);
        let t = ((v - lo) / span).clamp(0.0, 1.0);
        let (r, b) = ((255.0 * t) as u8, (255.0 * (1.0 - t)) as u8);
        let _ = write!(s, r#"<circle cx="{px:.1}" cy="{py:.1}" r="1.5" fill="rgb({r},64,{b})"/>"#);
    }
    finish(s, out)
}
