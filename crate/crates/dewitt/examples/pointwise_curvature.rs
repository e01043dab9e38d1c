//! Pointwise geometry tour: the fiberwise inner product, Christoffel
//! symbol, curvature by both routes, and the Ricci-like / scalar-like
//! traces.
//!
//! ```bash
//! cargo run --example pointwise_curvature
//! ```

use dewitt::point::{
    christoffel, curvature, inner, ricci_like, scalar_like, trace_bracket, CurvatureRoute,
    PointMetric,
};
use dewitt::sym::{SpdMatrix, SymMatrix};

fn main() -> dewitt::Result<()> {
    let g = PointMetric::new(SpdMatrix::from_row_major(
        2,
        &[1.5, 0.4, 0.4, 0.9],
    )?);
    let h = SymMatrix::from_row_major(2, &[1.0, 0.0, 0.0, -1.0])?;
    let k = SymMatrix::from_row_major(2, &[0.0, 1.0, 1.0, 0.0])?;

    println!("metric g:\n{}", g.metric().matrix());
    println!("<h,k>_g      = {:+.6}", inner(&g, &h, &k)?);
    println!("<h,h>_g      = {:+.6}", inner(&g, &h, &h)?);
    println!("sqrt(det g)  = {:+.6}", g.sqrt_det());

    let gamma = christoffel(&g, &h, &k)?;
    println!("\nGamma_g(h,k):\n{}", gamma.matrix());

    // curvature through the connection derivative and through the closed
    // commutator form; they agree to roundoff
    let by_definition = curvature(&g, &h, &k, &h, CurvatureRoute::Definition)?;
    let by_closed_form = curvature(&g, &h, &k, &h, CurvatureRoute::ClosedForm)?;
    println!("R(h,k)h, definition route:\n{}", by_definition.matrix());
    println!(
        "route difference: {:.3e}",
        (by_definition.matrix() - by_closed_form.matrix()).norm()
    );

    println!("Ric-like(h,h) = {:+.6}", ricci_like(&g, &h, &h)?);
    println!(
        "tr [[H,.],L]  = {:+.6}  (bracket trace lemma)",
        trace_bracket(&h, &k)?
    );
    for n in 1..=6 {
        println!("scalar-like c({n}) = {:+.6}", scalar_like(n));
    }
    Ok(())
}
