//! The planar exponential-map picture: geodesic rays and distance circles
//! through the visualization map, written as a deterministic SVG.
//!
//! ```bash
//! cargo run --example figure_map
//! ```

use dewitt::figure::{figure1_data, render_svg, FigureSpec};
use dewitt::geodesic::figure1_map;

fn main() -> dewitt::Result<()> {
    // the map sends (x, y) -> (u, v); the whole plane minus the ray
    // {x = 0, y <= -4/n} fills the strip |u| < 4 pi / n
    let n = 2;
    println!("sample map values (n = {n}):");
    for (x, y) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-2.0, -1.5)] {
        let (u, v) = figure1_map(x, y, n)?;
        println!("  ({x:+.1}, {y:+.1}) -> ({u:+.5}, {v:+.5})");
    }
    println!(
        "  on the excluded ray: {}",
        figure1_map(0.0, -2.5, n).unwrap_err()
    );

    let spec = FigureSpec {
        n,
        rays: 24,
        radii: vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
        samples: 800,
    };
    let data = figure1_data(&spec)?;
    let strip = 4.0 * std::f64::consts::PI / n as f64;
    let widest = data
        .geodesics
        .iter()
        .chain(&data.spheres)
        .flatten()
        .fold(0.0f64, |m, &(u, _)| m.max(u.abs()));
    println!(
        "\n{} geodesic and {} sphere polylines, max |u| = {widest:.5} < {strip:.5}",
        data.geodesics.len(),
        data.spheres.len()
    );

    let svg = render_svg(&data);
    let out = std::env::temp_dir().join("dewitt-figure1.svg");
    std::fs::write(&out, &svg).expect("write svg");
    println!("wrote {} ({} bytes)", out.display(), svg.len());
    Ok(())
}
