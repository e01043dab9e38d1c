//! Closed-form geodesics: evolution of a metric, existence bounds for
//! conformal shrink directions, and the RK4 cross-check.
//!
//! ```bash
//! cargo run --example geodesic_flow
//! ```

use dewitt::geodesic::GeodesicCoeffs;
use dewitt::oracles::{integrate_geodesic, mat_rel_err};
use dewitt::point::PointMetric;
use dewitt::sym::{SpdMatrix, SymMatrix};

fn main() -> dewitt::Result<()> {
    let g0 = PointMetric::new(SpdMatrix::from_row_major(2, &[2.0, 0.5, 0.5, 1.0])?);
    let h = SymMatrix::from_row_major(2, &[0.8, -0.3, -0.3, -0.5])?;
    let coeffs = GeodesicCoeffs::new(&g0, &h)?;

    println!(
        "direction data: tr(H) = {:+.4}, tr(H0^2) = {:.4}",
        coeffs.tr_velocity(),
        coeffs.traceless_norm_sq()
    );
    println!("forward existence: [0, {})\n", coeffs.forward_sup());

    println!("  t      a(t)      b(t)      det g(t)");
    for i in 0..=5 {
        let t = i as f64 * 0.4;
        let (a, b) = coeffs.scalars(t)?;
        let g = coeffs.point(t)?;
        println!(
            "{t:>4.1} {a:>9.5} {b:>9.5} {:>12.6}",
            g.matrix().determinant()
        );
    }

    // independent check: integrate the geodesic equation with RK4
    let sol = integrate_geodesic(g0.metric(), &h, 2.0, 1e-3)?;
    let (g_ode, _) = sol.states.last().unwrap();
    let g_closed = coeffs.point(sol.last_time())?;
    println!(
        "\nclosed form vs RK4 at t = {}: relative deviation {:.3e}",
        sol.last_time(),
        mat_rel_err(g_closed.matrix(), g_ode.matrix())
    );

    // a conformal shrink leaves the positive cone in finite time
    let shrink = g0.metric().as_sym().scale(-1.0);
    let coeffs = GeodesicCoeffs::new(&g0, &shrink)?;
    println!(
        "\nconformal shrink h = -g0: tr(H) = {}, blow-up at t = {}",
        coeffs.tr_velocity(),
        coeffs.forward_sup()
    );
    let sol = integrate_geodesic(g0.metric(), &shrink, 3.0, 1e-3)?;
    println!(
        "RK4 loses positive-definiteness at t = {:.4}",
        sol.positivity_lost.unwrap()
    );
    match coeffs.point(coeffs.forward_sup()) {
        Err(e) => println!("closed form at the boundary refuses: {e}"),
        Ok(_) => unreachable!("the existence interval is half-open"),
    }
    Ok(())
}
