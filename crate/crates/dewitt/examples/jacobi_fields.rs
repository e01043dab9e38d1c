//! Jacobi fields three ways: the closed form, RK4 on the Jacobi equation,
//! and the centered difference of the geodesic variation.
//!
//! ```bash
//! cargo run --example jacobi_fields
//! ```

use dewitt::jacobi::{JacobiField, VariationData};
use dewitt::oracles::integrate_jacobi;
use dewitt::point::PointMetric;
use dewitt::sym::{SpdMatrix, SymMatrix};

fn main() -> dewitt::Result<()> {
    let g0 = PointMetric::new(SpdMatrix::from_row_major(2, &[1.1, 0.2, 0.2, 0.9])?);
    let h = SymMatrix::from_row_major(2, &[0.6, 0.3, 0.3, -0.4])?;
    let k = SymMatrix::from_row_major(2, &[0.4, -0.2, -0.2, 0.5])?;
    let l = SymMatrix::from_row_major(2, &[-0.1, 0.3, 0.3, 0.2])?;

    let field = JacobiField::new(&g0, &h, &k, &l)?;
    let var = VariationData::new(&g0, &h, &k, &l)?;
    let ode = integrate_jacobi(g0.metric(), &h, &k, &l, 1.0, 1e-3)?;

    println!("J(0) == k exactly: {}", field.at(0.0)?.matrix() == k.matrix());
    println!("\n  t    |J(t)|       vs ODE      vs variation");
    let ds = 1e-4;
    for idx in (0..=1000).step_by(250) {
        let t = ode.times[idx];
        let closed = field.at(t)?;
        let (_, _, xi, _) = &ode.states[idx];
        let ode_dev = (closed.matrix() - xi.matrix()).norm();
        let fd = (var.alpha(t, ds)?.matrix() - var.alpha(t, -ds)?.matrix()) / (2.0 * ds);
        let var_dev = (closed.matrix() - &fd).norm();
        println!(
            "{t:>4.2} {:>9.5}   {ode_dev:>10.3e}  {var_dev:>10.3e}",
            closed.norm()
        );
    }

    // the geodesic velocity is itself a Jacobi field: k = 0, l = h gives
    // J(t) = t g'(t)
    let velocity_field = JacobiField::new(&g0, &h, &SymMatrix::zeros(2), &h)?;
    let coeffs = dewitt::geodesic::GeodesicCoeffs::new(&g0, &h)?;
    let t = 0.8;
    let dev = (velocity_field.at(t)?.matrix()
        - coeffs.velocity_covariant(t)?.matrix() * t)
        .norm();
    println!("\nJ = t g'(t) for (k, l) = (0, h): deviation {dev:.3e}");

    // conformal directions degenerate the closed form; evaluation falls
    // back to the ODE transparently
    let conformal = g0.metric().as_sym().scale(0.7);
    let fallback = JacobiField::new(&g0, &conformal, &k, &l)?;
    println!(
        "conformal direction, J(0.9) via ODE fallback: |J| = {:.5}",
        fallback.at(0.9)?.norm()
    );
    Ok(())
}
