//! Field-level machinery: the integrated metric, path energy, and the
//! first variation formula against a finite-difference check.
//!
//! ```bash
//! cargo run --example energy_variation
//! ```

use std::sync::Arc;

use dewitt::field::{
    energy, first_variation, geodesic_path, global_inner, global_ricci, MetricField,
    MetricPath, SampledBase, TangentField, VariationGrid,
};
use dewitt::sym::{sym_exp, SpdMatrix, SymMatrix};

fn main() -> dewitt::Result<()> {
    // two sample points with quadrature weights standing in for the base
    // manifold
    let base = SampledBase::new(2, vec!["left".into(), "right".into()], vec![1.0, 0.5])?;
    let g0 = MetricField::new(
        Arc::clone(&base),
        vec![
            SpdMatrix::from_row_major(2, &[1.0, 0.2, 0.2, 1.3])?,
            SpdMatrix::from_row_major(2, &[0.8, -0.1, -0.1, 1.1])?,
        ],
    )?;
    let h = TangentField::new(
        Arc::clone(&base),
        vec![
            SymMatrix::from_row_major(2, &[0.5, 0.1, 0.1, -0.2])?,
            SymMatrix::from_row_major(2, &[-0.3, 0.2, 0.2, 0.4])?,
        ],
    )?;

    println!("G_g(h,h) = {:.6}", global_inner(&g0, &h, &h)?);
    println!("Ric(h,h) = {:.6}", global_ricci(&g0, &h, &h)?);

    // geodesic path and its energy; geodesics have constant speed, so
    // E = 1/2 G(h,h) exactly in the limit
    let steps = 1000;
    let times: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
    let (times, frames) = geodesic_path(&g0, &h, &times)?;
    let path = MetricPath::new(Arc::clone(&base), times.clone(), frames.clone())?;
    let e = energy(&path, 0.0, 1.0)?;
    println!(
        "geodesic energy = {:.8}  (1/2 G(h,h) = {:.8})",
        e,
        0.5 * global_inner(&g0, &h, &h)?
    );

    // an endpoint-fixed bump around the geodesic: the first variation
    // vanishes to discretization order
    let bump_dir = SymMatrix::from_row_major(2, &[0.2, 0.1, 0.1, -0.1])?;
    let ds = 1e-4;
    let s_values = vec![-ds, 0.0, ds];
    let rows: Vec<Vec<MetricField>> = times
        .iter()
        .zip(&frames)
        .map(|(&t, frame)| {
            s_values
                .iter()
                .map(|&s| {
                    let bump = (std::f64::consts::PI * t).sin().powi(2) * s;
                    let values = frame
                        .values()
                        .iter()
                        .map(|g| SpdMatrix::new(g.matrix() + bump * bump_dir.matrix()))
                        .collect::<dewitt::Result<Vec<_>>>()?;
                    MetricField::new(Arc::clone(&base), values)
                })
                .collect::<dewitt::Result<Vec<_>>>()
        })
        .collect::<dewitt::Result<Vec<_>>>()?;
    let grid = VariationGrid::new(Arc::clone(&base), times.clone(), s_values, rows)?;
    println!(
        "first variation around the geodesic = {:+.3e}",
        first_variation(&grid, 0.0, 1.0)?
    );

    // a non-geodesic family has a visible first variation that matches
    // the energy difference quotient
    let family = |t: f64, s: f64| -> dewitt::Result<MetricField> {
        let values = (0..base.len())
            .map(|p| {
                let sign = if p == 0 { 1.0 } else { -1.0 };
                let a = SymMatrix::from_row_major(
                    2,
                    &[
                        0.3 * t + 0.2 * s * sign,
                        0.1 * t * t,
                        0.1 * t * t,
                        -0.2 * t + 0.1 * s,
                    ],
                )?;
                Ok(sym_exp(&a))
            })
            .collect::<dewitt::Result<Vec<_>>>()?;
        MetricField::new(Arc::clone(&base), values)
    };
    let rows: Vec<Vec<MetricField>> = times
        .iter()
        .map(|&t| [-ds, 0.0, ds].iter().map(|&s| family(t, s)).collect::<dewitt::Result<Vec<_>>>())
        .collect::<dewitt::Result<Vec<_>>>()?;
    let grid = VariationGrid::new(Arc::clone(&base), times.clone(), vec![-ds, 0.0, ds], rows)?;
    let formula = first_variation(&grid, 0.0, 1.0)?;
    let energy_at = |s: f64| -> dewitt::Result<f64> {
        let frames = times
            .iter()
            .map(|&t| family(t, s))
            .collect::<dewitt::Result<Vec<_>>>()?;
        energy(
            &MetricPath::new(Arc::clone(&base), times.clone(), frames)?,
            0.0,
            1.0,
        )
    };
    let fd = (energy_at(ds)? - energy_at(-ds)?) / (2.0 * ds);
    println!("first variation of a generic family = {formula:+.8}");
    println!("centered energy difference          = {fd:+.8}");
    Ok(())
}
