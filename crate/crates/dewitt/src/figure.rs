//! Deterministic SVG rendering of the planar exponential-map picture.
//!
//! Straight lines through the origin of the `(x, y)` parameter plane are
//! geodesics of the fiber metric; origin-centered circles are distance
//! spheres. Their images under [`crate::geodesic::figure1_map`] fill the
//! strip `(-4 pi/n, 4 pi/n) x R`. Curves are sampled, split at the excluded
//! ray `x = 0, y <= -4/n`, and drawn as polylines with a fixed viewport
//! mapping, so output bytes depend only on the inputs.

use crate::error::{Error, Result};
use crate::geodesic::figure1_map;

#[derive(Clone, Debug)]
pub struct FigureSpec {
    /// Matrix dimension driving the map.
    pub n: usize,
    /// Number of line directions through the origin (spaced `pi/rays`).
    pub rays: usize,
    /// Radii of the distance circles.
    pub radii: Vec<f64>,
    /// Sample intervals per curve.
    pub samples: usize,
}

impl Default for FigureSpec {
    fn default() -> Self {
        Self {
            n: 2,
            rays: 16,
            radii: vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
            samples: 800,
        }
    }
}

/// Sampled image polylines in `(u, v)` coordinates.
#[derive(Clone, Debug)]
pub struct FigureData {
    pub n: usize,
    /// Images of straight lines through the origin.
    pub geodesics: Vec<Vec<(f64, f64)>>,
    /// Images of origin-centered circles.
    pub spheres: Vec<Vec<(f64, f64)>>,
}

pub fn figure1_data(spec: &FigureSpec) -> Result<FigureData> {
    if spec.n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if spec.rays == 0 || spec.samples < 2 || spec.radii.is_empty() {
        return Err(Error::Grid(
            "figure needs rays >= 1, samples >= 2 and at least one radius".into(),
        ));
    }
    if spec.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Grid("circle radii must be positive".into()));
    }
    let reach = 1.05 * spec.radii.iter().cloned().fold(0.0f64, f64::max);

    let mut geodesics = Vec::new();
    for j in 0..spec.rays {
        let phi = std::f64::consts::PI * j as f64 / spec.rays as f64;
        let (c, s) = (snap(phi.cos()), snap(phi.sin()));
        let params = (0..=spec.samples)
            .map(|i| -reach + 2.0 * reach * i as f64 / spec.samples as f64);
        geodesics.extend(trace_curve(spec.n, params.map(|r| (r * c, r * s))));
    }

    let mut spheres = Vec::new();
    for &radius in &spec.radii {
        let params = (0..=spec.samples)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / spec.samples as f64);
        spheres.extend(trace_curve(
            spec.n,
            params.map(|theta| (radius * snap(theta.cos()), radius * snap(theta.sin()))),
        ));
    }

    Ok(FigureData {
        n: spec.n,
        geodesics,
        spheres,
    })
}

/// Clamps roundoff-level trigonometric residue so the axis-aligned curves
/// hit the excluded ray exactly.
fn snap(v: f64) -> f64 {
    if v.abs() < 1e-14 {
        0.0
    } else {
        v
    }
}

/// Maps a sampled parameter curve, breaking the polyline at samples on the
/// excluded ray and at segments crossing it.
fn trace_curve(n: usize, points: impl Iterator<Item = (f64, f64)>) -> Vec<Vec<(f64, f64)>> {
    let boundary = -4.0 / n as f64;
    let mut segments = Vec::new();
    let mut current: Vec<(f64, f64)> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for (x, y) in points {
        if x == 0.0 && y <= boundary {
            flush(&mut segments, &mut current);
            prev = None;
            continue;
        }
        if let Some((px, py)) = prev {
            if px * x < 0.0 {
                let y_cross = py + (y - py) * (0.0 - px) / (x - px);
                if y_cross <= boundary {
                    flush(&mut segments, &mut current);
                }
            }
        }
        // unwrap is safe: ray points were skipped above
        current.push(figure1_map(x, y, n).unwrap());
        prev = Some((x, y));
    }
    flush(&mut segments, &mut current);
    segments
}

fn flush(segments: &mut Vec<Vec<(f64, f64)>>, current: &mut Vec<(f64, f64)>) {
    if current.len() >= 2 {
        segments.push(std::mem::take(current));
    } else {
        current.clear();
    }
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 42.0;

/// Renders the sampled polylines as a standalone SVG 1.1 document. The
/// horizontal viewport is the full image strip `[-4 pi/n, 4 pi/n]`; the
/// vertical range hugs the data. Pixel coordinates are written with fixed
/// precision, keeping the bytes platform-stable.
pub fn render_svg(data: &FigureData) -> String {
    let u_max = 4.0 * std::f64::consts::PI / data.n as f64;
    let (mut v_min, mut v_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for seg in data.geodesics.iter().chain(&data.spheres) {
        for &(_, v) in seg {
            v_min = v_min.min(v);
            v_max = v_max.max(v);
        }
    }
    if v_min >= v_max {
        (v_min, v_max) = (-1.0, 1.0);
    }
    let pad = 0.05 * (v_max - v_min);
    v_min -= pad;
    v_max += pad;

    let px = |u: f64| MARGIN + (u + u_max) / (2.0 * u_max) * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - (v - v_min) / (v_max - v_min) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::with_capacity(1 << 16);
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // axes
    if v_min < 0.0 && v_max > 0.0 {
        svg.push_str(&format!(
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n",
            px(-u_max), py(0.0), px(u_max), py(0.0)
        ));
    }
    svg.push_str(&format!(
        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n",
        px(0.0), py(v_min), px(0.0), py(v_max)
    ));
    // the excluded ray maps to the strip boundary u = +-4 pi/n
    for side in [-1.0, 1.0] {
        svg.push_str(&format!(
            "<line x1=\"{0:.3}\" y1=\"{1:.3}\" x2=\"{0:.3}\" y2=\"{2:.3}\" stroke=\"#444444\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n",
            px(side * u_max), py(v_min), py(v_max)
        ));
    }

    let mut draw = |segments: &[Vec<(f64, f64)>], class: &str, color: &str| {
        for seg in segments {
            svg.push_str(&format!("<polyline class=\"{class}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" points=\""));
            for (i, &(u, v)) in seg.iter().enumerate() {
                if i > 0 {
                    svg.push(' ');
                }
                svg.push_str(&format!("{:.3},{:.3}", px(u), py(v)));
            }
            svg.push_str("\"/>\n");
        }
    };
    draw(&data.geodesics, "geodesic", "#1f6fb2");
    draw(&data.spheres, "sphere", "#b2401f");
    svg.push_str("</svg>\n");
    svg
}

pub fn figure1_svg(spec: &FigureSpec) -> Result<String> {
    Ok(render_svg(&figure1_data(spec)?))
}
