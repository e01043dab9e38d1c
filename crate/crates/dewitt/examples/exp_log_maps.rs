//! The exponential map and its inverse with their maximal domains: the
//! removed ray of conformal shrinks on the tangent side, the traceless
//! logarithm bound on the metric side.
//!
//! ```bash
//! cargo run --example exp_log_maps
//! ```

use dewitt::geodesic::{exp_point, in_exp_domain, in_log_domain, log_point};
use dewitt::oracles::mat_rel_err;
use dewitt::point::PointMetric;
use dewitt::sym::{SpdMatrix, SymMatrix};

fn main() -> dewitt::Result<()> {
    let g0 = PointMetric::new(SpdMatrix::from_row_major(2, &[1.2, 0.3, 0.3, 0.8])?);

    let h = SymMatrix::from_row_major(2, &[0.9, 0.4, 0.4, -0.6])?;
    println!("in_exp_domain(h) = {}", in_exp_domain(&g0, &h)?);
    let g = exp_point(&g0, &h)?;
    println!("Exp_g0(h):\n{}", g.matrix());
    println!("in_log_domain(Exp h) = {}", in_log_domain(&g0, &g)?);

    let back = log_point(&g0, &g)?;
    println!(
        "Log(Exp(h)) deviation: {:.3e}",
        mat_rel_err(back.matrix(), h.matrix())
    );

    // the removed ray: conformal shrinks lambda g0 with lambda <= -4/n
    for lambda in [-0.5, -2.0, -3.5] {
        let shrink = g0.metric().as_sym().scale(lambda);
        println!(
            "lambda = {lambda:+.1}: in_exp_domain = {}",
            in_exp_domain(&g0, &shrink)?
        );
    }
    let outside = g0.metric().as_sym().scale(-2.0);
    println!("Exp at lambda = -2: {}", exp_point(&g0, &outside).unwrap_err());

    // the logarithm domain bound: traceless exponents must stay below
    // tr(A0^2) = (4 pi)^2 / n
    for s in [1.0f64, 6.0, 6.5] {
        let target = SpdMatrix::from_row_major(2, &[s.exp(), 0.0, 0.0, (-s).exp()])?;
        println!(
            "target diag(e^{s}, e^-{s}): in_log_domain = {}",
            in_log_domain(&g0.clone(), &target)
                .map(|b| b.to_string())
                .unwrap_or_else(|e| e.to_string())
        );
    }
    let far = SpdMatrix::from_row_major(2, &[7f64.exp(), 0.0, 0.0, (-7f64).exp()])?;
    let g_id = PointMetric::identity(2);
    println!("Log far outside: {}", log_point(&g_id, &far).unwrap_err());
    Ok(())
}
