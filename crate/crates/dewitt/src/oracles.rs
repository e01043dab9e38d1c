//! Independent verification machinery.
//!
//! Everything here is deliberately dumb: classical RK4 on the geodesic and
//! Jacobi equations, second-order finite-difference stencils, and
//! brute-force traces over an explicit orthonormal basis of symmetric
//! matrices. These are the ground truth that every closed form elsewhere in
//! the crate is measured against; none of them share code with the closed
//! forms they check.

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::point::{christoffel, PointMetric};
use crate::sym::{check_same_dim, sym_eigen, trace_inner, trace_product, SpdMatrix, SymMatrix, SPD_RATIO};

/// Relative error normalized against the larger magnitude (and 1, so that
/// near-zero comparisons degrade to absolute error).
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Matrix version of [`rel_err`], in the Frobenius norm.
pub fn mat_rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// Checks that `times` is an increasing uniform grid and returns its spacing.
pub fn uniform_spacing(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::Grid("need at least two sample times".into()));
    }
    let dt = times[1] - times[0];
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::Grid("sample times must be strictly increasing".into()));
    }
    for (i, &t) in times.iter().enumerate() {
        let expected = times[0] + i as f64 * dt;
        if (t - expected).abs() > 1e-9 * expected.abs().max(1.0) {
            return Err(Error::Grid(format!(
                "non-uniform spacing at sample {i}: {t} vs expected {expected}"
            )));
        }
    }
    Ok(dt)
}

/// Locates `t` on the grid; it must coincide with a sample time.
pub fn sample_index(times: &[f64], t: f64) -> Result<usize> {
    let dt = uniform_spacing(times)?;
    let idx = ((t - times[0]) / dt).round();
    if idx < 0.0 || idx >= times.len() as f64 {
        return Err(Error::Grid(format!(
            "t = {t} outside the sampled range [{}, {}]",
            times[0],
            times[times.len() - 1]
        )));
    }
    let idx = idx as usize;
    if (times[idx] - t).abs() > 1e-9 * t.abs().max(1.0) {
        return Err(Error::Grid(format!(
            "t = {t} is not a sample time (nearest is {})",
            times[idx]
        )));
    }
    Ok(idx)
}

/// Second-order stencil (index, coefficient) pairs for the derivative of the
/// given order at position `i`; coefficients are to be divided by dt^order.
/// One-sided stencils at the boundary.
fn stencil(len: usize, i: usize, order: u8) -> Result<Vec<(usize, f64)>> {
    let need = match order {
        1 => 3,
        2 => 4,
        _ => return Err(Error::Grid(format!("unsupported derivative order {order}"))),
    };
    if len < need {
        return Err(Error::Grid(format!(
            "need at least {need} samples for order-{order} differentiation, got {len}"
        )));
    }
    if i >= len {
        return Err(Error::Grid(format!("sample index {i} out of range {len}")));
    }
    Ok(match (order, i) {
        (1, 0) => vec![(0, -1.5), (1, 2.0), (2, -0.5)],
        (1, i) if i == len - 1 => vec![(i, 1.5), (i - 1, -2.0), (i - 2, 0.5)],
        (1, i) => vec![(i - 1, -0.5), (i + 1, 0.5)],
        (2, 0) => vec![(0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)],
        (2, i) if i == len - 1 => vec![(i, 2.0), (i - 1, -5.0), (i - 2, 4.0), (i - 3, -1.0)],
        (2, i) => vec![(i - 1, 1.0), (i, -2.0), (i + 1, 1.0)],
        _ => unreachable!(),
    })
}

/// Derivative of a sampled matrix sequence at sample `i` (order 1 or 2),
/// second-order accurate everywhere.
pub fn diff_at(values: &[DMatrix<f64>], dt: f64, i: usize, order: u8) -> Result<DMatrix<f64>> {
    let st = stencil(values.len(), i, order)?;
    let (r, c) = values[0].shape();
    let mut out = DMatrix::zeros(r, c);
    for (j, w) in st {
        out += w * &values[j];
    }
    Ok(out / dt.powi(order as i32))
}

/// Differentiates a whole sampled sequence of scalars. At least five samples.
pub fn central_diff(values: &[f64], dt: f64, order: u8) -> Result<Vec<f64>> {
    if values.len() < 5 {
        return Err(Error::Grid(format!(
            "need at least 5 samples, got {}",
            values.len()
        )));
    }
    let scale = dt.powi(order as i32);
    (0..values.len())
        .map(|i| {
            let st = stencil(values.len(), i, order)?;
            Ok(st.iter().map(|&(j, w)| w * values[j]).sum::<f64>() / scale)
        })
        .collect()
}

/// Differentiates a whole sampled sequence of matrices. At least five samples.
pub fn central_diff_matrices(
    values: &[DMatrix<f64>],
    dt: f64,
    order: u8,
) -> Result<Vec<DMatrix<f64>>> {
    if values.len() < 5 {
        return Err(Error::Grid(format!(
            "need at least 5 samples, got {}",
            values.len()
        )));
    }
    (0..values.len()).map(|i| diff_at(values, dt, i, order)).collect()
}

/// Numerical solution of the geodesic equation at a single point:
/// uniformly sampled `(g, g_t)` states. If positive-definiteness was lost
/// before `t_end`, the solution is truncated and `positivity_lost` records
/// the last accepted time.
#[derive(Clone, Debug)]
pub struct GeodesicSolution {
    pub times: Vec<f64>,
    pub states: Vec<(SpdMatrix, SymMatrix)>,
    pub positivity_lost: Option<f64>,
}

impl GeodesicSolution {
    pub fn last_time(&self) -> f64 {
        *self.times.last().unwrap()
    }
}

/// Like [`GeodesicSolution`] with Jacobi states `(g, g_t, xi, xi_t)`.
#[derive(Clone, Debug)]
pub struct JacobiSolution {
    pub times: Vec<f64>,
    pub states: Vec<(SpdMatrix, SymMatrix, SymMatrix, SymMatrix)>,
    pub positivity_lost: Option<f64>,
}

/// Right-hand side of the geodesic equation,
/// `g_tt = g_t g^{-1} g_t + 1/4 tr(g^{-1}g_t g^{-1}g_t) g - 1/2 tr(g^{-1}g_t) g_t`.
/// Returns `None` when `g` is numerically singular.
fn geodesic_rhs(g: &DMatrix<f64>, v: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let g_inv = g.clone().try_inverse()?;
    let vm = &g_inv * v;
    let mut out = v * &vm;
    out += 0.25 * trace_product(&vm, &vm) * g;
    out -= 0.5 * vm.trace() * v;
    if out.iter().all(|x| x.is_finite()) {
        Some(out)
    } else {
        None
    }
}

/// Degeneracy detector for intermediate states. `floor` is an absolute
/// eigenvalue floor tied to the integrator resolution: states closer to the
/// boundary of the positive cone than the integrator can resolve count as
/// positivity loss.
fn loses_positivity(g: &DMatrix<f64>, floor: f64) -> bool {
    if g.iter().any(|x| !x.is_finite()) {
        return true;
    }
    let shift = floor.max(SPD_RATIO * g.norm());
    let n = g.nrows();
    let shifted = g - DMatrix::<f64>::identity(n, n) * shift;
    nalgebra::Cholesky::new(shifted).is_none()
}

/// Classical RK4 integration of the geodesic equation from `(g0, h)`.
///
/// The step count is `round(t_end/dt)`; integration aborts when an
/// intermediate or accepted state leaves the positive cone (non-finite
/// entries, eigenvalue ratio below [`SPD_RATIO`], or smallest eigenvalue
/// below `4 dt^2 min_eig(g0)`, the resolution limit near a conformal
/// collapse where the smallest eigenvalue vanishes quadratically in time).
pub fn integrate_geodesic(
    g0: &SpdMatrix,
    h: &SymMatrix,
    t_end: f64,
    dt: f64,
) -> Result<GeodesicSolution> {
    check_same_dim(g0.dim(), h.dim())?;
    let steps = step_count(t_end, dt)?;
    let dt = t_end / steps as f64;
    let floor = positivity_floor(g0, dt);

    let mut times = vec![0.0];
    let mut states = vec![(g0.clone(), h.clone())];
    let mut g = g0.matrix().clone();
    let mut v = h.matrix().clone();
    let mut positivity_lost = None;

    'time: for step in 0..steps {
        let t = step as f64 * dt;
        // RK4 on the first-order system (g, v).
        let mut kg = Vec::with_capacity(4);
        let mut kv = Vec::with_capacity(4);
        for (cg, cv) in [(0.0, 0.0), (0.5, 0.5), (0.5, 0.5), (1.0, 1.0)] {
            let (pg, pv) = match kg.len() {
                0 => (g.clone(), v.clone()),
                i => (&g + dt * cg * &kg[i - 1], &v + dt * cv * &kv[i - 1]),
            };
            if loses_positivity(&pg, floor) {
                positivity_lost = Some(t);
                break 'time;
            }
            let Some(acc) = geodesic_rhs(&pg, &pv) else {
                positivity_lost = Some(t);
                break 'time;
            };
            kg.push(pv);
            kv.push(acc);
        }
        g += dt / 6.0 * (&kg[0] + 2.0 * &kg[1] + 2.0 * &kg[2] + &kg[3]);
        v += dt / 6.0 * (&kv[0] + 2.0 * &kv[1] + 2.0 * &kv[2] + &kv[3]);
        if loses_positivity(&g, floor) {
            positivity_lost = Some(t);
            break;
        }
        times.push((step + 1) as f64 * dt);
        states.push((
            SpdMatrix::new_unchecked(crate::sym::symmetrize(&g)),
            SymMatrix::new_unchecked(v.clone()),
        ));
    }

    Ok(GeodesicSolution {
        times,
        states,
        positivity_lost,
    })
}

/// RK4 integration of the coupled geodesic + Jacobi system. Initial
/// conditions are `xi(0) = k` and covariant velocity `l`; the plain time
/// derivative starts at `xi_t(0) = l + Gamma_{g0}(h, k)`.
pub fn integrate_jacobi(
    g0: &SpdMatrix,
    h: &SymMatrix,
    k: &SymMatrix,
    l: &SymMatrix,
    t_end: f64,
    dt: f64,
) -> Result<JacobiSolution> {
    check_same_dim(g0.dim(), h.dim())?;
    check_same_dim(g0.dim(), k.dim())?;
    check_same_dim(g0.dim(), l.dim())?;
    let steps = step_count(t_end, dt)?;
    let dt = t_end / steps as f64;
    let floor = positivity_floor(g0, dt);

    let point = PointMetric::new(g0.clone());
    let xi_t0 = &christoffel(&point, h, k)?.matrix().clone() + l.matrix();

    let mut times = vec![0.0];
    let mut states = vec![(g0.clone(), h.clone(), k.clone(), SymMatrix::new_unchecked(xi_t0.clone()))];
    let mut y = [
        g0.matrix().clone(),
        h.matrix().clone(),
        k.matrix().clone(),
        xi_t0,
    ];
    let mut positivity_lost = None;

    let rhs = |s: &[DMatrix<f64>; 4]| -> Option<[DMatrix<f64>; 4]> {
        let g_inv = s[0].clone().try_inverse()?;
        let acc = geodesic_rhs(&s[0], &s[1])?;
        let jac = crate::jacobi::jacobi_rhs_raw(&s[0], &g_inv, &s[1], &s[2], &s[3]);
        if jac.iter().any(|x| !x.is_finite()) {
            return None;
        }
        Some([s[1].clone(), acc, s[3].clone(), jac])
    };

    'time: for step in 0..steps {
        let t = step as f64 * dt;
        let mut ks: Vec<[DMatrix<f64>; 4]> = Vec::with_capacity(4);
        for c in [0.0, 0.5, 0.5, 1.0] {
            let probe = match ks.len() {
                0 => y.clone(),
                i => {
                    let prev = &ks[i - 1];
                    [
                        &y[0] + dt * c * &prev[0],
                        &y[1] + dt * c * &prev[1],
                        &y[2] + dt * c * &prev[2],
                        &y[3] + dt * c * &prev[3],
                    ]
                }
            };
            if loses_positivity(&probe[0], floor) {
                positivity_lost = Some(t);
                break 'time;
            }
            let Some(k) = rhs(&probe) else {
                positivity_lost = Some(t);
                break 'time;
            };
            ks.push(k);
        }
        for i in 0..4 {
            y[i] += dt / 6.0 * (&ks[0][i] + 2.0 * &ks[1][i] + 2.0 * &ks[2][i] + &ks[3][i]);
        }
        if loses_positivity(&y[0], floor) {
            positivity_lost = Some(t);
            break;
        }
        times.push((step + 1) as f64 * dt);
        states.push((
            SpdMatrix::new_unchecked(crate::sym::symmetrize(&y[0])),
            SymMatrix::new_unchecked(y[1].clone()),
            SymMatrix::new_unchecked(y[2].clone()),
            SymMatrix::new_unchecked(y[3].clone()),
        ));
    }

    Ok(JacobiSolution {
        times,
        states,
        positivity_lost,
    })
}

fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt.is_finite() && t_end.is_finite()) || dt <= 0.0 || t_end <= 0.0 {
        return Err(Error::Grid(format!(
            "need positive t_end and dt, got t_end = {t_end}, dt = {dt}"
        )));
    }
    Ok(((t_end / dt).round() as usize).max(1))
}

fn positivity_floor(g0: &SpdMatrix, dt: f64) -> f64 {
    let (_, lam) = sym_eigen(g0.matrix());
    4.0 * dt * dt * lam.min()
}

/// Orthonormal basis of symmetric n-by-n matrices for the trace form:
/// `{E_ii}` followed by `{(E_ij + E_ji)/sqrt(2), i < j}`.
pub fn sym_basis(n: usize) -> Vec<SymMatrix> {
    let mut basis = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        let mut m = DMatrix::zeros(n, n);
        m[(i, i)] = 1.0;
        basis.push(SymMatrix::new_unchecked(m));
    }
    let inv_sqrt2 = 0.5f64.sqrt();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut m = DMatrix::zeros(n, n);
            m[(i, j)] = inv_sqrt2;
            m[(j, i)] = inv_sqrt2;
            basis.push(SymMatrix::new_unchecked(m));
        }
    }
    basis
}

/// Brute-force trace of a linear map on symmetric matrices:
/// `sum_i <map(B_i), B_i>` over the orthonormal basis of [`sym_basis`].
///
/// Linearity is spot-checked on random combination probes and the trace is
/// recomputed in a randomly rotated orthonormal basis; disagreement beyond
/// 1e-10 relative reports the map as non-linear.
pub fn basis_trace(map: impl Fn(&SymMatrix) -> Result<SymMatrix>, n: usize) -> Result<f64> {
    let basis = sym_basis(n);
    let m = basis.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0xB515 ^ (n as u64));

    // linearity probes
    for _ in 0..2 {
        let a = rng.random_range(-2.0..2.0);
        let b = rng.random_range(-2.0..2.0);
        let x = random_combo(&basis, &mut rng);
        let y = random_combo(&basis, &mut rng);
        let combo = SymMatrix::new_unchecked(a * x.matrix() + b * y.matrix());
        let lhs = map(&combo)?;
        let rhs = a * map(&x)?.matrix() + b * map(&y)?.matrix();
        let dev = mat_rel_err(lhs.matrix(), &rhs);
        if dev > 1e-8 {
            return Err(Error::NotLinear { deviation: dev });
        }
    }

    let trace: f64 = basis
        .iter()
        .map(|b| trace_inner(&map(b)?, b))
        .sum::<Result<f64>>()?;

    // basis independence: rotate the basis by a random orthogonal matrix of
    // coefficients and recompute.
    let gauss = DMatrix::from_fn(m, m, |_, _| {
        // Box-Muller from two uniforms
        let u1: f64 = rng.random_range(1e-12..1.0);
        let u2: f64 = rng.random_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    });
    let q = gauss.qr().q();
    let mut rotated_trace = 0.0;
    for j in 0..m {
        let mut bj = DMatrix::zeros(n, n);
        for i in 0..m {
            bj += q[(i, j)] * basis[i].matrix();
        }
        let bj = SymMatrix::new_unchecked(bj);
        rotated_trace += trace_inner(&map(&bj)?, &bj)?;
    }
    let dev = rel_err(trace, rotated_trace);
    if dev > 1e-10 {
        return Err(Error::NotLinear { deviation: dev });
    }

    Ok(trace)
}

fn random_combo(basis: &[SymMatrix], rng: &mut impl Rng) -> SymMatrix {
    let n = basis[0].dim();
    let mut m = DMatrix::zeros(n, n);
    for b in basis {
        m += rng.random_range(-1.0..1.0) * b.matrix();
    }
    SymMatrix::new_unchecked(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::trace_bracket;
    use crate::sym::{sym_exp, traceless_part};
    use approx::assert_relative_eq;

    fn random_sym(rng: &mut impl Rng, n: usize, scale: f64) -> SymMatrix {
        SymMatrix::new_unchecked(DMatrix::from_fn(n, n, |_, _| {
            rng.random_range(-scale..scale)
        }))
    }

    #[test]
    fn central_diff_linear_exact() {
        let values: Vec<f64> = (0..9).map(|i| 3.0 * i as f64 * 0.1 - 1.0).collect();
        let d = central_diff(&values, 0.1, 1).unwrap();
        for v in d {
            assert_relative_eq!(v, 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn central_diff_quadratic_curvature_exact() {
        let values: Vec<f64> = (0..9).map(|i| (i as f64 * 0.1).powi(2)).collect();
        let d = central_diff(&values, 0.1, 2).unwrap();
        for v in d {
            assert_relative_eq!(v, 2.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn central_diff_sin_accuracy() {
        let dt = 1e-3;
        let values: Vec<f64> = (0..200).map(|i| (i as f64 * dt).sin()).collect();
        let d = central_diff(&values, dt, 1).unwrap();
        for (i, v) in d.iter().enumerate() {
            assert!((v - (i as f64 * dt).cos()).abs() < 1e-6);
        }
    }

    #[test]
    fn central_diff_needs_enough_samples() {
        assert!(central_diff(&[1.0, 2.0, 3.0], 0.1, 1).is_err());
    }

    #[test]
    fn geodesic_integration_constant_for_zero_direction() {
        let g0 = SpdMatrix::from_diagonal(&[2.0, 0.5]).unwrap();
        let sol = integrate_geodesic(&g0, &SymMatrix::zeros(2), 1.0, 1e-2).unwrap();
        assert!(sol.positivity_lost.is_none());
        let (last, _) = sol.states.last().unwrap();
        assert_relative_eq!(last.matrix(), g0.matrix(), epsilon = 1e-13);
    }

    #[test]
    fn geodesic_integration_conformal_expansion() {
        // g0 = Id, h = Id in n = 2 reaches (1 + t/2)^2 Id; at t = 1: 2.25 Id.
        let g0 = SpdMatrix::identity(2);
        let h = SymMatrix::identity(2);
        let sol = integrate_geodesic(&g0, &h, 1.0, 1e-3).unwrap();
        assert!(sol.positivity_lost.is_none());
        let (last, _) = sol.states.last().unwrap();
        assert_relative_eq!(
            last.matrix(),
            &(DMatrix::identity(2, 2) * 2.25),
            epsilon = 1e-8
        );
    }

    #[test]
    fn geodesic_integration_detects_blowup() {
        // h = -Id from Id in n = 2 collapses at t = 2.
        let g0 = SpdMatrix::identity(2);
        let h = SymMatrix::new_unchecked(DMatrix::identity(2, 2) * -1.0);
        let dt = 1e-3;
        let sol = integrate_geodesic(&g0, &h, 2.5, dt).unwrap();
        let lost = sol.positivity_lost.expect("blow-up must be detected");
        assert!(
            lost >= 2.0 - 10.0 * dt && lost <= 2.0,
            "positivity lost at {lost}, expected within [{}, 2.0]",
            2.0 - 10.0 * dt
        );
    }

    #[test]
    fn jacobi_integration_straight_line_for_constant_geodesic() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let g0 = sym_exp(&random_sym(&mut rng, 2, 0.5));
        let k = random_sym(&mut rng, 2, 1.0);
        let l = random_sym(&mut rng, 2, 1.0);
        let sol = integrate_jacobi(&g0, &SymMatrix::zeros(2), &k, &l, 1.0, 1e-2).unwrap();
        for (i, (_, _, xi, _)) in sol.states.iter().enumerate() {
            let t = sol.times[i];
            let expected = k.matrix() + t * l.matrix();
            assert_relative_eq!(xi.matrix(), &expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn jacobi_integration_velocity_field() {
        // k = 0, l = h gives xi(t) = t g'(t).
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let g0 = sym_exp(&random_sym(&mut rng, 3, 0.5));
        let h = random_sym(&mut rng, 3, 0.8);
        let sol =
            integrate_jacobi(&g0, &h, &SymMatrix::zeros(3), &h, 1.0, 1e-3).unwrap();
        assert!(sol.positivity_lost.is_none());
        for (i, (_, v, xi, _)) in sol.states.iter().enumerate() {
            let t = sol.times[i];
            let expected = t * v.matrix();
            assert!((xi.matrix() - expected).norm() < 1e-8);
        }
    }

    #[test]
    fn rk4_convergence_order() {
        // Terminal error against a much finer reference shrinks ~16x when
        // the step is halved.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let g0 = sym_exp(&random_sym(&mut rng, 3, 0.6));
        let h = random_sym(&mut rng, 3, 0.9);
        let reference = integrate_geodesic(&g0, &h, 1.0, 2.5e-4).unwrap();
        let (g_ref, _) = reference.states.last().unwrap();
        let err = |dt: f64| {
            let sol = integrate_geodesic(&g0, &h, 1.0, dt).unwrap();
            let (g, _) = sol.states.last().unwrap();
            (g.matrix() - g_ref.matrix()).norm()
        };
        let ratio = err(8e-3) / err(4e-3);
        assert!(
            (12.0..=20.0).contains(&ratio),
            "expected ~16x error reduction, got {ratio:.2}"
        );
    }

    #[test]
    fn basis_trace_identity_map() {
        let tr = basis_trace(|b| Ok(b.clone()), 2).unwrap();
        assert_relative_eq!(tr, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn basis_trace_bracket_lemma() {
        // tr(K -> [[H,K],L]) = tr(H)tr(L) - n tr(HL)
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for n in 2..=5 {
            for _ in 0..10 {
                let h = random_sym(&mut rng, n, 2.0);
                let l = random_sym(&mut rng, n, 2.0);
                let tr = basis_trace(
                    |k| {
                        Ok(SymMatrix::new_unchecked(crate::sym::ad(
                            &crate::sym::ad(h.matrix(), k.matrix()),
                            l.matrix(),
                        )))
                    },
                    n,
                )
                .unwrap();
                assert_relative_eq!(
                    tr,
                    trace_bracket(&h, &l).unwrap(),
                    epsilon = 1e-10,
                    max_relative = 1e-10
                );
            }
        }
    }

    #[test]
    fn basis_trace_traceless_projection() {
        // Projection onto traceless matrices has trace dim - 1.
        let tr = basis_trace(|k| Ok(traceless_part(k)), 2).unwrap();
        assert_relative_eq!(tr, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn basis_trace_rejects_nonlinear_map() {
        let out = basis_trace(
            |k| {
                Ok(SymMatrix::new_unchecked(
                    k.matrix() * k.matrix().norm().max(1.0),
                ))
            },
            3,
        );
        assert!(matches!(out, Err(Error::NotLinear { .. })));
    }

    #[test]
    fn ricci_like_matches_basis_trace_of_curvature() {
        use crate::point::{curvature, ricci_like, CurvatureRoute};
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for n in 2..=4 {
            for _ in 0..5 {
                let g = PointMetric::new(sym_exp(&random_sym(&mut rng, n, 0.6)));
                let h = random_sym(&mut rng, n, 1.5);
                let l = random_sym(&mut rng, n, 1.5);
                let tr = basis_trace(
                    |k| curvature(&g, &h, k, &l, CurvatureRoute::ClosedForm),
                    n,
                )
                .unwrap();
                assert_relative_eq!(
                    tr,
                    ricci_like(&g, &h, &l).unwrap(),
                    epsilon = 1e-9,
                    max_relative = 1e-9
                );
            }
        }
    }

    #[test]
    fn scalar_like_matches_basis_trace_of_projection() {
        use crate::point::scalar_like;
        for n in 1..=6 {
            let nf = n as f64;
            let coeff = -(nf / 32.0) * (4.0 + nf * (nf + 1.0));
            let tr = basis_trace(
                |xi| Ok(traceless_part(xi).scale(coeff)),
                n,
            )
            .unwrap();
            assert_relative_eq!(tr, scalar_like(n), epsilon = 1e-12, max_relative = 1e-12);
        }
    }
}
