//! Closed-form geodesics, the exponential map and its inverse, and the
//! planar visualization map.
//!
//! A geodesic through `g0` with initial velocity `h` evolves each point
//! independently as `g(t) = g0 e^{a(t) Id + b(t) H_0}`, where `H = g0^{-1} h`,
//! `H_0` is its traceless part, and with `tau = tr(H)`, `d0 = tr(H_0^2)`:
//!
//! ```text
//! a(t) = (2/n) log( (1 + t tau/4)^2 + (n/16) d0 t^2 )
//! b(t) = 4/sqrt(n d0) * theta(t),   theta = arg( (4 + t tau) + i t sqrt(n d0) )
//! ```
//!
//! with the argument taken continuously from `theta(0) = 0`. The continuous
//! argument reproduces the piecewise arctangent branches exactly: for
//! `tau < 0` it passes smoothly through `pi/2` at `t = -4/tau`. When
//! `d0 = 0` (conformal direction) `b(t) = t/(1 + t tau/4)` and the geodesic
//! leaves the positive cone at `t = -4/tau` if `tau < 0`.
//!
//! All spectral work happens in the `g0`-adapted frame where the exponent is
//! a genuine symmetric matrix, so returned metrics are exactly symmetric.
//! Negative `t` is supported by the same continuous-argument rule, which
//! agrees with evaluating the reversed direction at `-t`.
//!
//! The domains enforced by [`in_exp_domain`] and [`in_log_domain`] are the
//! maximal ones: the exponential misses only the ray of conformal shrinks
//! `lambda g0, lambda <= -4/n`, yet its image is confined to the
//! `tr(A_0^2) < (4 pi)^2/n` neighborhood: removing a single ray already
//! destroys surjectivity, so completeness-style arguments do not apply.
//! Both predicates are strict; a boundary point is rejected even where the
//! formulas still evaluate.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::point::PointMetric;
use crate::sym::{
    adapted_log, sym_exp, trace_inner, traceless_part, SpdMatrix, SymMatrix,
};

/// Threshold under which `tr(H_0^2)` counts as zero (conformal direction)
/// for branch selection: `1e-12 max(1, tr(H^2))`.
pub(crate) fn conformal_threshold(tr_h_sq: f64) -> f64 {
    1e-12 * tr_h_sq.max(1.0)
}

/// Forward existence interval `[0, sup_t)` of a geodesic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExistenceInterval {
    /// The geodesic is defined for `0 <= t < sup_t` (possibly infinite).
    pub sup_t: f64,
}

impl ExistenceInterval {
    pub fn unbounded() -> Self {
        Self {
            sup_t: f64::INFINITY,
        }
    }

    /// Strict: `t = sup_t` is rejected even where the formula evaluates.
    pub fn contains(&self, t: f64) -> bool {
        (0.0..self.sup_t).contains(&t)
    }
}

/// Shared scalar engine for `a(t)`, `b(t)`: also drives the two-parameter
/// variation where `tau, d0` come from `c(s), d(s)`.
///
/// For small arctangent arguments `x = t sqrt(n d0)/(4 + t tau)` the odd
/// series of `atan` is used so that `b` stays accurate to machine precision
/// as `d0 -> 0`; otherwise `atan2` evaluates the continuous argument
/// directly (the ray `(4 + t tau, t sqrt(n d0))` never crosses the negative
/// real axis, so `atan2` is continuous in `t`).
pub(crate) fn scalars_raw(n: usize, tau: f64, d0: f64, t: f64) -> Result<(f64, f64)> {
    let nf = n as f64;
    let d0 = d0.max(0.0);
    let sigma = d0 + tau * tau / nf;
    let re = 4.0 + t * tau;
    if d0 < conformal_threshold(sigma) {
        // conformal: g(t) = (1 + t tau/4)^{4/n} g0, defined while re > 0
        if re <= 0.0 {
            let (lo, hi) = conformal_interval(tau);
            return Err(Error::OutsideExistence { t, lo, hi });
        }
        let a = 4.0 / nf * (re / 4.0).ln();
        let b = 4.0 * t / re;
        return Ok((a, b));
    }
    let u = (nf * d0).sqrt();
    let im = t * u;
    let a = 2.0 / nf * ((re * re + im * im) / 16.0).ln();
    let b = if re > 0.0 && (im / re).abs() < 1e-4 {
        // b = 4 (t/re) (1 - x^2/3 + x^4/5 - x^6/7 + O(x^8)), x = im/re
        let x2 = (im / re) * (im / re);
        4.0 * (t / re) * (1.0 - x2 / 3.0 + x2 * x2 / 5.0 - x2 * x2 * x2 / 7.0)
    } else {
        4.0 / u * im.atan2(re)
    };
    Ok((a, b))
}

fn conformal_interval(tau: f64) -> (f64, f64) {
    if tau > 0.0 {
        (-4.0 / tau, f64::INFINITY)
    } else if tau < 0.0 {
        (f64::NEG_INFINITY, -4.0 / tau)
    } else {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

/// Per-point cached scalars driving the closed-form geodesic from `(g0, h)`.
#[derive(Clone, Debug)]
pub struct GeodesicCoeffs {
    g0: PointMetric,
    /// Traceless part of the adapted velocity `g0^{-1/2} h g0^{-1/2}`.
    h0: SymMatrix,
    tr_h: f64,
    d0: f64,
}

impl GeodesicCoeffs {
    pub fn new(g0: &PointMetric, h: &SymMatrix) -> Result<Self> {
        let adapted = g0.adapted(h)?;
        let tr_h = adapted.trace();
        let h0 = traceless_part(&adapted);
        let d0 = trace_inner(&h0, &h0)?;
        Ok(Self {
            g0: g0.clone(),
            h0,
            tr_h,
            d0,
        })
    }

    pub fn base(&self) -> &PointMetric {
        &self.g0
    }

    /// `tr(H)`.
    pub fn tr_velocity(&self) -> f64 {
        self.tr_h
    }

    /// `tr(H_0^2) >= 0`.
    pub fn traceless_norm_sq(&self) -> f64 {
        self.d0
    }

    /// Traceless part of the velocity in the adapted frame.
    pub fn traceless_adapted(&self) -> &SymMatrix {
        &self.h0
    }

    /// `tr(H^2) = d0 + tr(H)^2 / n`.
    pub fn tr_velocity_sq(&self) -> f64 {
        self.d0 + self.tr_h * self.tr_h / self.g0.dim() as f64
    }

    /// Whether the direction is (numerically) a multiple of the base metric.
    pub fn is_conformal(&self) -> bool {
        self.d0 < conformal_threshold(self.tr_velocity_sq())
    }

    /// Supremum of the forward existence interval `[0, sup_t)`.
    pub fn forward_sup(&self) -> f64 {
        if self.is_conformal() && self.tr_h < 0.0 {
            -4.0 / self.tr_h
        } else {
            f64::INFINITY
        }
    }

    /// The scalars `(a(t), b(t))` of the geodesic exponent.
    pub fn scalars(&self, t: f64) -> Result<(f64, f64)> {
        scalars_raw(self.g0.dim(), self.tr_h, self.d0, t)
    }

    /// `e^{-n a(t)/2}` without logarithm roundtrip.
    fn decay(&self, t: f64) -> f64 {
        let re = 4.0 + t * self.tr_h;
        let im2 = t * t * self.g0.dim() as f64 * self.d0.max(0.0);
        16.0 / (re * re + im2)
    }

    /// Adapted transition factor `E(t) = e^{a(t) Id + b(t) H_0}`, so that
    /// `g(t) = g0^{1/2} E(t) g0^{1/2}`.
    pub(crate) fn transition(&self, t: f64) -> Result<SpdMatrix> {
        let (a, b) = self.scalars(t)?;
        let n = self.g0.dim();
        let mut exponent = self.h0.matrix() * b;
        for i in 0..n {
            exponent[(i, i)] += a;
        }
        Ok(sym_exp(&SymMatrix::new_unchecked(exponent)))
    }

    /// The geodesic point `g(t) = g0 e^{a(t) Id + b(t) H_0}`, computed via
    /// the congruence `g0^{1/2} e^{...} g0^{1/2}` so the result is exactly
    /// symmetric positive definite.
    pub fn point(&self, t: f64) -> Result<SpdMatrix> {
        let e = self.transition(t)?;
        let s = self.g0.sqrt_matrix();
        Ok(SpdMatrix::new_unchecked(s * e.matrix() * s))
    }

    /// Mixed-form velocity `P(t) = g(t)^{-1} g'(t)` in the adapted frame:
    ///
    /// `P(t) = e^{-n a(t)/2} ( (4 tr(H) + n t tr(H^2))/(4n) Id + H_0 )`.
    pub fn velocity_mixed(&self, t: f64) -> Result<SymMatrix> {
        // existence check
        self.scalars(t)?;
        let n = self.g0.dim();
        let nf = n as f64;
        let decay = self.decay(t);
        let p = (4.0 * self.tr_h + nf * t * self.tr_velocity_sq()) / (4.0 * nf);
        let mut out = self.h0.matrix().clone();
        for i in 0..n {
            out[(i, i)] += p;
        }
        Ok(SymMatrix::new_unchecked(out * decay))
    }

    /// Covariant velocity `g'(t) = g(t) P(t)`.
    pub fn velocity_covariant(&self, t: f64) -> Result<SymMatrix> {
        let e = self.transition(t)?;
        let p = self.velocity_mixed(t)?;
        let s = self.g0.sqrt_matrix();
        Ok(SymMatrix::new_unchecked(s * (e.matrix() * p.matrix()) * s))
    }
}

/// Evaluates the geodesic from `(g0, h)` at time `t`.
pub fn geodesic_point(g0: &PointMetric, h: &SymMatrix, t: f64) -> Result<SpdMatrix> {
    GeodesicCoeffs::new(g0, h)?.point(t)
}

/// Whether `h` lies in the pointwise exponential domain: everything except
/// conformal shrinks `lambda g0` with `lambda <= -4/n`.
pub fn in_exp_domain(g0: &PointMetric, h: &SymMatrix) -> Result<bool> {
    let coeffs = GeodesicCoeffs::new(g0, h)?;
    Ok(!(coeffs.is_conformal() && coeffs.tr_h <= -4.0))
}

/// Whether `g` lies in the pointwise logarithm domain:
/// `tr(A_0^2) < (4 pi)^2 / n` for `A = log(g0^{-1} g)`.
pub fn in_log_domain(g0: &PointMetric, g: &SpdMatrix) -> Result<bool> {
    Ok(log_domain_excess(g0, g)?.is_none())
}

/// `Some((value, bound))` when the logarithm-domain inequality fails.
fn log_domain_excess(g0: &PointMetric, g: &SpdMatrix) -> Result<Option<(f64, f64)>> {
    crate::sym::check_same_dim(g0.dim(), g.dim())?;
    let a = adapted_log(g0.inv_sqrt_matrix(), g.matrix());
    let a0 = traceless_part(&a);
    let value = trace_inner(&a0, &a0)?;
    let bound = 16.0 * PI * PI / g0.dim() as f64;
    Ok(if value < bound {
        None
    } else {
        Some((value, bound))
    })
}

/// The exponential map: the geodesic from `(g0, h)` at `t = 1`.
///
/// Rejects directions outside the maximal domain (the removed ray of
/// conformal shrinks); the image always satisfies [`in_log_domain`].
pub fn exp_point(g0: &PointMetric, h: &SymMatrix) -> Result<SpdMatrix> {
    let coeffs = GeodesicCoeffs::new(g0, h)?;
    if coeffs.is_conformal() && coeffs.tr_h <= -4.0 {
        let n = g0.dim() as f64;
        return Err(Error::ExpDomain {
            lambda: coeffs.tr_h / n,
            bound: -4.0 / n,
        });
    }
    coeffs.point(1.0)
}

/// Inverse of the exponential map on its maximal domain.
///
/// With `A = log(g0^{-1} g)`, `tr(A_0^2) < (4 pi)^2/n`, the velocity is
/// recovered as `h = g0 psi(A)` where
///
/// `psi(A) = (4/n)(e^{tr A/4} cos(omega) - 1) Id
///           + e^{tr A/4} (sin(omega)/omega) A_0`,
/// `omega = sqrt(n tr(A_0^2))/4`,
///
/// with the `sin(omega)/omega` factor evaluated by series near `omega = 0`
/// (which also covers the conformal branch `A_0 = 0`).
pub fn log_point(g0: &PointMetric, g: &SpdMatrix) -> Result<SymMatrix> {
    if let Some((value, bound)) = log_domain_excess(g0, g)? {
        return Err(Error::LogDomain { value, bound });
    }
    let n = g0.dim();
    let nf = n as f64;
    let a = adapted_log(g0.inv_sqrt_matrix(), g.matrix());
    let a0 = traceless_part(&a);
    let omega = (nf * trace_inner(&a0, &a0)?.max(0.0)).sqrt() / 4.0;
    let growth = (a.trace() / 4.0).exp();
    let id_coeff = 4.0 / nf * (growth * omega.cos() - 1.0);
    let a0_coeff = growth * sinc(omega);
    let s = g0.sqrt_matrix();
    let covariant_a0 = s * a0.matrix() * s;
    Ok(SymMatrix::new_unchecked(
        id_coeff * g0.metric().matrix() + a0_coeff * covariant_a0,
    ))
}

/// `sin(x)/x`, by series for small `x`.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0
    } else {
        x.sin() / x
    }
}

/// The planar visualization map. A point `(x, y)` stands for the symmetric
/// matrix `x A + y Id` with `A` a fixed traceless direction normalized to
/// `tr(A^2) = n`; its geodesic-exponential image in the same plane is
///
/// `u = (4/n) arg((4 + ny) + i nx)`,
/// `v = (2/n) log( ((4 + ny)^2 + n^2 x^2)/16 )`,
///
/// with `arg` in `(-pi, pi]`. Rejects the excluded ray
/// `x = 0, y <= -4/n`; the image lies in `(-4 pi/n, 4 pi/n) x R`.
pub fn figure1_map(x: f64, y: f64, n: usize) -> Result<(f64, f64)> {
    let nf = n as f64;
    if x == 0.0 && y <= -4.0 / nf {
        return Err(Error::ExcludedRay);
    }
    let re = 4.0 + nf * y;
    let im = nf * x;
    let u = 4.0 / nf * im.atan2(re);
    let v = 2.0 / nf * ((re * re + im * im) / 16.0).ln();
    Ok((u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{integrate_geodesic, mat_rel_err};
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_sym(rng: &mut impl Rng, n: usize, scale: f64) -> SymMatrix {
        SymMatrix::new_unchecked(DMatrix::from_fn(n, n, |_, _| {
            rng.random_range(-scale..scale)
        }))
    }

    fn random_point_metric(rng: &mut impl Rng, n: usize) -> PointMetric {
        PointMetric::new(sym_exp(&random_sym(rng, n, 0.7)))
    }

    #[test]
    fn scalars_conformal_expansion() {
        // H = Id, n = 2: tau = 2, d0 = 0; at t = 2: a = 2 log 2, b = 1.
        let g0 = PointMetric::identity(2);
        let c = GeodesicCoeffs::new(&g0, &SymMatrix::identity(2)).unwrap();
        let (a, b) = c.scalars(2.0).unwrap();
        assert_relative_eq!(a, 2.0 * 2.0f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(b, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn scalars_traceless_direction() {
        // H = diag(1,-1), n = 2: tau = 0, d0 = 2; at t = 2: a = log 2, b = pi/2.
        let g0 = PointMetric::identity(2);
        let h = SymMatrix::from_diagonal(&[1.0, -1.0]);
        let c = GeodesicCoeffs::new(&g0, &h).unwrap();
        let (a, b) = c.scalars(2.0).unwrap();
        assert_relative_eq!(a, 2.0f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(b, PI / 2.0, epsilon = 1e-14);
        assert_eq!(c.scalars(0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn geodesic_conformal_expansion_curve() {
        // g(t) = (1 + t/2)^2 Id for h = Id at Id, n = 2.
        let g0 = PointMetric::identity(2);
        let c = GeodesicCoeffs::new(&g0, &SymMatrix::identity(2)).unwrap();
        for t in [0.0, 0.5, 1.0, 2.0, 7.3] {
            let expected = (1.0 + t / 2.0) * (1.0 + t / 2.0);
            let g = c.point(t).unwrap();
            assert_relative_eq!(
                g.matrix(),
                &(DMatrix::identity(2, 2) * expected),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn geodesic_conformal_contraction_has_bound() {
        let g0 = PointMetric::identity(2);
        let h = SymMatrix::new_unchecked(DMatrix::identity(2, 2) * -1.0);
        let c = GeodesicCoeffs::new(&g0, &h).unwrap();
        assert_relative_eq!(c.forward_sup(), 2.0);
        for t in [0.0, 0.5, 1.0, 1.9] {
            let expected = (1.0 - t / 2.0) * (1.0 - t / 2.0);
            let g = c.point(t).unwrap();
            assert_relative_eq!(
                g.matrix(),
                &(DMatrix::identity(2, 2) * expected),
                max_relative = 1e-13
            );
        }
        // strict at the boundary and beyond
        assert!(matches!(
            c.point(2.0),
            Err(Error::OutsideExistence { .. })
        ));
        assert!(c.point(2.5).is_err());
    }

    #[test]
    fn geodesic_traceless_direction_curve() {
        // g(t) = (1 + t^2/4) diag(e^b, e^-b), b = 2 arctan(t/2).
        let g0 = PointMetric::identity(2);
        let h = SymMatrix::from_diagonal(&[1.0, -1.0]);
        let c = GeodesicCoeffs::new(&g0, &h).unwrap();
        for t in [0.0f64, 0.3, 1.0, 2.0, 5.0] {
            let b = 2.0 * (t / 2.0).atan();
            let scale = 1.0 + t * t / 4.0;
            let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[
                scale * b.exp(),
                scale * (-b).exp(),
            ]));
            let g = c.point(t).unwrap();
            assert_relative_eq!(g.matrix(), &expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn geodesic_matches_rk4_smoke() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for n in 2..=4 {
            for _ in 0..3 {
                let g0 = random_point_metric(&mut rng, n);
                let h = random_sym(&mut rng, n, 1.0);
                let sol = integrate_geodesic(g0.metric(), &h, 1.0, 1e-3).unwrap();
                assert!(sol.positivity_lost.is_none());
                let coeffs = GeodesicCoeffs::new(&g0, &h).unwrap();
                let mut worst: f64 = 0.0;
                for (i, (g_ode, _)) in sol.states.iter().enumerate() {
                    let g_closed = coeffs.point(sol.times[i]).unwrap();
                    worst = worst.max(mat_rel_err(g_closed.matrix(), g_ode.matrix()));
                }
                assert!(worst < 1e-6, "closed form vs RK4 deviation {worst:.3e}");
            }
        }
    }

    #[test]
    fn geodesic_equation_residual() {
        // FD second derivative minus the geodesic RHS is O(dt^2).
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let g0 = random_point_metric(&mut rng, 3);
        let h = random_sym(&mut rng, 3, 0.8);
        let coeffs = GeodesicCoeffs::new(&g0, &h).unwrap();
        let dt = 1e-3;
        let samples: Vec<DMatrix<f64>> = (0..=200)
            .map(|i| coeffs.point(0.4 + i as f64 * dt).unwrap().matrix().clone())
            .collect();
        let idx = 100;
        let g = &samples[idx];
        let g_t = crate::oracles::diff_at(&samples, dt, idx, 1).unwrap();
        let g_tt = crate::oracles::diff_at(&samples, dt, idx, 2).unwrap();
        let g_inv = g.clone().try_inverse().unwrap();
        let vm = &g_inv * &g_t;
        let rhs = &g_t * &vm + 0.25 * crate::sym::trace_product(&vm, &vm) * g
            - 0.5 * vm.trace() * &g_t;
        let err = (&g_tt - &rhs).norm() / rhs.norm().max(1.0);
        assert!(err < 1e-5, "geodesic residual {err:.3e}");
    }

    #[test]
    fn velocity_examples() {
        let g0 = PointMetric::identity(2);
        // P(0) = H
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let h = random_sym(&mut rng, 2, 1.0);
        let c = GeodesicCoeffs::new(&g0, &h).unwrap();
        assert_relative_eq!(
            c.velocity_mixed(0.0).unwrap().matrix(),
            h.matrix(),
            epsilon = 1e-13
        );
        // H = Id, n = 2, t = 2 -> 1/2 Id
        let c = GeodesicCoeffs::new(&g0, &SymMatrix::identity(2)).unwrap();
        assert_relative_eq!(
            c.velocity_mixed(2.0).unwrap().matrix(),
            &(DMatrix::identity(2, 2) * 0.5),
            epsilon = 1e-14
        );
        // traceless H: P(t) = e^{-na/2} (t tr(H^2)/4 Id + H_0)
        let h = SymMatrix::from_diagonal(&[1.0, -1.0]);
        let c = GeodesicCoeffs::new(&g0, &h).unwrap();
        let t = 1.3;
        let (a, _) = c.scalars(t).unwrap();
        let decay = (-a).exp(); // n = 2
        let expected = decay
            * (DMatrix::identity(2, 2) * (t * 2.0 / 4.0) + h.matrix());
        assert_relative_eq!(c.velocity_mixed(t).unwrap().matrix(), &expected, epsilon = 1e-13);
    }

    #[test]
    fn velocity_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for n in 2..=3 {
            let g0 = random_point_metric(&mut rng, n);
            let h = random_sym(&mut rng, n, 1.0);
            let c = GeodesicCoeffs::new(&g0, &h).unwrap();
            let t = 0.7;
            let delta = 1e-4;
            let fd = (c.point(t + delta).unwrap().matrix()
                - c.point(t - delta).unwrap().matrix())
                / (2.0 * delta);
            // compare covariant velocity, and mixed velocity via g^{-1} g'
            let vel = c.velocity_covariant(t).unwrap();
            assert!(mat_rel_err(vel.matrix(), &fd) < 1e-7);
            let g_inv = c.point(t).unwrap().matrix().clone().try_inverse().unwrap();
            let p_raw = &g_inv * &fd;
            let p_adapted = g0.sqrt_matrix() * p_raw * g0.inv_sqrt_matrix();
            assert!(mat_rel_err(c.velocity_mixed(t).unwrap().matrix(), &p_adapted) < 1e-7);
        }
    }

    #[test]
    fn mixed_velocity_equation() {
        // H_t = 1/4 tr(H^2) Id - 1/2 tr(H) H under finite differences.
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let g0 = random_point_metric(&mut rng, 3);
        let h = random_sym(&mut rng, 3, 0.9);
        let c = GeodesicCoeffs::new(&g0, &h).unwrap();
        let t = 0.6;
        let dt = 1e-3;
        let p: Vec<DMatrix<f64>> = (-2..=2)
            .map(|i| {
                c.velocity_mixed(t + i as f64 * dt)
                    .unwrap()
                    .matrix()
                    .clone()
            })
            .collect();
        let p_t = crate::oracles::diff_at(&p, dt, 2, 1).unwrap();
        let cur = &p[2];
        let rhs = DMatrix::identity(3, 3) * (0.25 * crate::sym::trace_product(cur, cur))
            - 0.5 * cur.trace() * cur;
        assert!((&p_t - &rhs).norm() < 1e-5 * rhs.norm().max(1.0));
    }

    #[test]
    fn affine_reparameterization() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let g0 = random_point_metric(&mut rng, 3);
        let h = random_sym(&mut rng, 3, 0.8);
        for s in [0.3, 1.7] {
            let scaled = h.scale(s);
            for t in [0.2, 0.9] {
                let lhs = geodesic_point(&g0, &scaled, t).unwrap();
                let rhs = geodesic_point(&g0, &h, s * t).unwrap();
                assert!(mat_rel_err(lhs.matrix(), rhs.matrix()) < 1e-10);
            }
        }
    }

    #[test]
    fn negative_time_is_reversed_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        let g0 = random_point_metric(&mut rng, 3);
        let h = random_sym(&mut rng, 3, 0.8);
        let reversed = -&h;
        for t in [0.1, 0.8, 2.0] {
            let lhs = geodesic_point(&g0, &h, -t).unwrap();
            let rhs = geodesic_point(&g0, &reversed, t).unwrap();
            assert!(mat_rel_err(lhs.matrix(), rhs.matrix()) < 1e-12);
        }
    }

    #[test]
    fn branch_passes_continuously_through_pi_half() {
        // tau < 0 with d0 > 0: b is increasing and continuous through
        // t = -4/tau, where theta = pi/2 exactly.
        let g0 = PointMetric::identity(2);
        let h = SymMatrix::from_row_major(2, &[-1.0, 0.4, 0.4, -1.0]).unwrap();
        let c = GeodesicCoeffs::new(&g0, &h).unwrap();
        let tau = c.tr_velocity();
        assert!(tau < 0.0 && c.traceless_norm_sq() > 0.0);
        let t_star = -4.0 / tau;
        // exactly pi/2 at the branch time
        let (_, b_star) = c.scalars(t_star).unwrap();
        let u = (2.0 * c.traceless_norm_sq()).sqrt();
        assert_relative_eq!(b_star, 4.0 / u * (PI / 2.0), epsilon = 1e-12);
        // monotone, small increments through the branch point
        let dt = 1e-3;
        let mut prev = None;
        let mut sup_rate: f64 = 0.0;
        let mut max_jump: f64 = 0.0;
        for i in 0..=400 {
            let t = t_star - 0.2 + i as f64 * dt;
            let (_, b) = c.scalars(t).unwrap();
            let rate = c.decay(t);
            sup_rate = sup_rate.max(rate);
            if let Some(p) = prev {
                assert!(b > p, "b must increase");
                max_jump = max_jump.max(b - p);
            }
            prev = Some(b);
        }
        assert!(max_jump <= 10.0 * dt * sup_rate);
    }

    #[test]
    fn exp_domain_examples() {
        let g0 = PointMetric::identity(2);
        let boundary = SymMatrix::new_unchecked(DMatrix::identity(2, 2) * -2.0); // -(4/n) g0
        assert!(!in_exp_domain(&g0, &boundary).unwrap());
        let inside = SymMatrix::new_unchecked(DMatrix::identity(2, 2) * -0.5); // -(1/n) g0
        assert!(in_exp_domain(&g0, &inside).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        let h = random_sym(&mut rng, 2, 3.0); // almost surely non-conformal
        assert!(in_exp_domain(&g0, &h).unwrap());
        // far side of the ray is excluded too
        let deep = SymMatrix::new_unchecked(DMatrix::identity(2, 2) * -5.0);
        assert!(!in_exp_domain(&g0, &deep).unwrap());
        assert!(matches!(
            exp_point(&g0, &deep),
            Err(Error::ExpDomain { .. })
        ));
    }

    #[test]
    fn log_domain_examples() {
        let g0 = PointMetric::identity(2);
        assert!(in_log_domain(&g0, g0.metric()).unwrap());
        let scaled = SpdMatrix::from_diagonal(&[7.3, 7.3]).unwrap();
        assert!(in_log_domain(&g0, &scaled).unwrap());
        // diag(e^s, e^-s) is inside iff |s| < 2 pi
        let s_in = 2.0 * PI - 1e-3;
        let g_in = SpdMatrix::from_diagonal(&[s_in.exp(), (-s_in).exp()]).unwrap();
        assert!(in_log_domain(&g0, &g_in).unwrap());
        let s_out = 2.0 * PI + 1e-3;
        let g_out = SpdMatrix::from_diagonal(&[s_out.exp(), (-s_out).exp()]).unwrap();
        assert!(!in_log_domain(&g0, &g_out).unwrap());
        assert!(matches!(
            log_point(&g0, &g_out),
            Err(Error::LogDomain { .. })
        ));
    }

    #[test]
    fn exp_examples() {
        let g0 = PointMetric::identity(2);
        assert_relative_eq!(
            exp_point(&g0, &SymMatrix::zeros(2)).unwrap().matrix(),
            g0.metric().matrix(),
            epsilon = 1e-15
        );
        let e = exp_point(&g0, &SymMatrix::identity(2)).unwrap();
        assert_relative_eq!(e.matrix(), &(DMatrix::identity(2, 2) * 2.25), epsilon = 1e-13);
    }

    #[test]
    fn log_examples() {
        let g0 = PointMetric::identity(2);
        assert!(log_point(&g0, g0.metric()).unwrap().norm() < 1e-14);
        let g = SpdMatrix::from_diagonal(&[2.25, 2.25]).unwrap();
        assert_relative_eq!(
            log_point(&g0, &g).unwrap().matrix(),
            &DMatrix::identity(2, 2),
            epsilon = 1e-13
        );
        // conformal branch of psi: g = e Id gives h = 2(sqrt(e) - 1) Id
        let g = SpdMatrix::from_diagonal(&[std::f64::consts::E, std::f64::consts::E]).unwrap();
        let expected = 2.0 * (0.5f64.exp() - 1.0);
        assert_relative_eq!(
            log_point(&g0, &g).unwrap().matrix(),
            &(DMatrix::identity(2, 2) * expected),
            epsilon = 1e-13
        );
    }

    #[test]
    fn exp_log_roundtrip_smoke() {
        let mut rng = ChaCha8Rng::seed_from_u64(58);
        for n in 2..=4 {
            for _ in 0..20 {
                let g0 = random_point_metric(&mut rng, n);
                let h = random_sym(&mut rng, n, 1.0);
                assert!(in_exp_domain(&g0, &h).unwrap());
                let g = exp_point(&g0, &h).unwrap();
                assert!(in_log_domain(&g0, &g).unwrap());
                let back = log_point(&g0, &g).unwrap();
                assert!(
                    mat_rel_err(back.matrix(), h.matrix()) < 1e-9,
                    "roundtrip failed"
                );
                assert!(in_exp_domain(&g0, &back).unwrap());
            }
        }
    }

    #[test]
    fn covariant_derivative_of_velocity_vanishes_along_geodesic() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let g0 = random_point_metric(&mut rng, 2);
        let h = random_sym(&mut rng, 2, 0.8);
        let coeffs = GeodesicCoeffs::new(&g0, &h).unwrap();
        let dt = 1e-3;
        let times: Vec<f64> = (0..=100).map(|i| i as f64 * dt).collect();
        let curve: Vec<SpdMatrix> = times.iter().map(|&t| coeffs.point(t).unwrap()).collect();
        let field: Vec<SymMatrix> = times
            .iter()
            .map(|&t| coeffs.velocity_covariant(t).unwrap())
            .collect();
        let nabla =
            crate::point::covariant_derivative_along(&times, &curve, &field, 0.05).unwrap();
        assert!(nabla.norm() < 1e-5 * field[50].norm().max(1.0));
    }

    #[test]
    fn figure_map_examples() {
        assert_eq!(figure1_map(0.0, 0.0, 2).unwrap(), (0.0, 0.0));
        // x = 0, y > -4/n: u = 0, v = (4/n) log(1 + ny/4)
        let (u, v) = figure1_map(0.0, 0.7, 2).unwrap();
        assert_eq!(u, 0.0);
        assert_relative_eq!(v, 2.0 * (1.0 + 0.35f64).ln(), epsilon = 1e-14);
        assert!(matches!(figure1_map(0.0, -2.0, 2), Err(Error::ExcludedRay)));
        assert!(matches!(figure1_map(0.0, -5.0, 2), Err(Error::ExcludedRay)));
        // image bound |u| < 4 pi / n on a sweep
        for i in 0..200 {
            let phi = i as f64 * 0.0314159;
            let (u, _) = figure1_map(3.0 * phi.cos(), 3.0 * phi.sin(), 2).unwrap();
            assert!(u.abs() < 2.0 * PI);
        }
    }

    #[test]
    fn figure_map_matches_exp_on_plane() {
        // u, v are the coordinates of log(exp_point(Id, xA + yId)) in the
        // basis {A, Id}, A = diag(1,-1) (tr A^2 = n = 2).
        let g0 = PointMetric::identity(2);
        let a_dir = SymMatrix::from_diagonal(&[1.0, -1.0]);
        for (x, y) in [(0.5, 0.3), (-1.2, 0.8), (2.0, -1.5), (0.7, -1.9)] {
            let h = SymMatrix::new_unchecked(
                a_dir.matrix() * x + DMatrix::identity(2, 2) * y,
            );
            let image = exp_point(&g0, &h).unwrap();
            let w = crate::sym::sym_log(&image);
            let v_coeff = w.trace() / 2.0;
            let u_coeff = trace_inner(&w, &a_dir).unwrap() / 2.0;
            let (u, v) = figure1_map(x, y, 2).unwrap();
            assert_relative_eq!(u, u_coeff, epsilon = 1e-12);
            assert_relative_eq!(v, v_coeff, epsilon = 1e-12);
        }
    }
}
