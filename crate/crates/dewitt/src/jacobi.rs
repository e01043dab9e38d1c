//! Jacobi fields: geodesic variations, their `s`-derivative, the closed
//! form, and the Jacobi equation right-hand side.
//!
//! The Jacobi field along the geodesic from `(g0, h)` with initial values
//! `J(0) = k` and covariant initial velocity `l` is realized as the
//! `s`-derivative at 0 of the geodesic variation
//! `alpha(t, s) = Exp_{g0 + s k}( t (h + s (l + Gamma_{g0}(k, h))) )`,
//! and admits a closed form driven by the mixed tensor
//! `Lhat = -K H + L + g0^{-1} Gamma_{g0}(k, h)` (which is not
//! `g0`-symmetric: it carries half a commutator `[H, K]`).
//!
//! Degenerate directions (`h` zero or a pure conformal rescaling) make
//! denominators in the closed form vanish; there the field falls back to
//! RK4 integration of the Jacobi equation, whose pointwise solutions exist
//! and are unique.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geodesic::{scalars_raw, GeodesicCoeffs};
use crate::oracles::integrate_jacobi;
use crate::point::{christoffel, PointMetric};
use crate::sym::{
    ad_exp_tail, check_same_dim, trace_product, SpdMatrix, SymMatrix,
};

/// The algebraic curvature-type quadrilinear form
/// `T(H,K,L,N) = tr(HL) tr(KN) - tr(HN) tr(KL)`.
pub fn quad_t(h: &SymMatrix, k: &SymMatrix, l: &SymMatrix, n: &SymMatrix) -> Result<f64> {
    check_same_dim(h.dim(), k.dim())?;
    check_same_dim(h.dim(), l.dim())?;
    check_same_dim(h.dim(), n.dim())?;
    Ok(trace_product(h.matrix(), l.matrix()) * trace_product(k.matrix(), n.matrix())
        - trace_product(h.matrix(), n.matrix()) * trace_product(k.matrix(), l.matrix()))
}

/// `S(H,K) = T(H,K,H,K) = tr(H^2) tr(K^2) - tr(HK)^2 >= 0`.
pub fn quad_s(h: &SymMatrix, k: &SymMatrix) -> Result<f64> {
    quad_t(h, k, h, k)
}

/// Geodesic variation data for initial values `(k, l)` along the geodesic
/// from `(g0, h)`: the base curve `lambda(s) = g0 + s k`, the velocity
/// curve `W(s) = h + s (l + Gamma_{g0}(k,h))`, and the adapted mixed
/// tensors entering the closed forms.
#[derive(Clone, Debug)]
pub struct VariationData {
    g0: PointMetric,
    h_cov: SymMatrix,
    k_cov: SymMatrix,
    ltilde_cov: SymMatrix,
    h_ad: SymMatrix,
    k_ad: SymMatrix,
    ltilde_ad: SymMatrix,
    /// `-K H + Ltilde` in the adapted frame; not symmetric in general.
    lhat: DMatrix<f64>,
}

impl VariationData {
    pub fn new(
        g0: &PointMetric,
        h: &SymMatrix,
        k: &SymMatrix,
        l: &SymMatrix,
    ) -> Result<Self> {
        let ltilde_cov = &christoffel(g0, k, h)? + l;
        let h_ad = g0.adapted(h)?;
        let k_ad = g0.adapted(k)?;
        let ltilde_ad = g0.adapted(&ltilde_cov)?;
        let lhat = ltilde_ad.matrix() - k_ad.matrix() * h_ad.matrix();
        Ok(Self {
            g0: g0.clone(),
            h_cov: h.clone(),
            k_cov: k.clone(),
            ltilde_cov,
            h_ad,
            k_ad,
            ltilde_ad,
            lhat,
        })
    }

    pub fn base(&self) -> &PointMetric {
        &self.g0
    }

    /// `Lhat = -KH + Ltilde` as an adapted mixed tensor.
    pub fn lhat(&self) -> &DMatrix<f64> {
        &self.lhat
    }

    /// `(Id + sK)^{-1} (H + s Ltilde)` in the adapted frame.
    fn velocity_at(&self, s: f64) -> Result<DMatrix<f64>> {
        let n = self.g0.dim();
        let lhs = DMatrix::identity(n, n) + s * self.k_ad.matrix();
        let inv = lhs.try_inverse().ok_or_else(|| {
            Error::Grid(format!("Id + sK is singular at s = {s}"))
        })?;
        Ok(inv * (self.h_ad.matrix() + s * self.ltilde_ad.matrix()))
    }

    /// `c(s) = tr((Id+sK)^{-1}(H+s Ltilde))`.
    pub fn c(&self, s: f64) -> Result<f64> {
        Ok(self.velocity_at(s)?.trace())
    }

    /// `f(s) = tr(((Id+sK)^{-1}(H+s Ltilde))^2)`.
    pub fn f(&self, s: f64) -> Result<f64> {
        let m = self.velocity_at(s)?;
        Ok(trace_product(&m, &m))
    }

    /// `d(s) = f(s) - c(s)^2/n`, the squared traceless norm of the varied
    /// velocity.
    pub fn d(&self, s: f64) -> Result<f64> {
        let m = self.velocity_at(s)?;
        let c = m.trace();
        Ok(trace_product(&m, &m) - c * c / self.g0.dim() as f64)
    }

    /// The exponent `Q(t,s) = a(t,s) Id + b(t,s) (M(s) - c(s)/n Id)` of the
    /// variation `alpha(t,s) = lambda(s) e^{Q(t,s)}`, in the adapted frame.
    /// Uses the same continuous-argument branch rule as the geodesic
    /// scalars, with `c(s), d(s)` in place of `tr H, tr(H_0^2)`.
    pub fn q(&self, t: f64, s: f64) -> Result<DMatrix<f64>> {
        let n = self.g0.dim();
        let nf = n as f64;
        let m = self.velocity_at(s)?;
        let c = m.trace();
        let d = trace_product(&m, &m) - c * c / nf;
        let (a, b) = scalars_raw(n, c, d, t)?;
        let mut q = b * (m - DMatrix::<f64>::identity(n, n) * (c / nf));
        for i in 0..n {
            q[(i, i)] += a;
        }
        Ok(q)
    }

    /// The geodesic variation `alpha(t,s)`: the geodesic from
    /// `lambda(s) = g0 + sk` with velocity `W(s) = h + s Ltilde`,
    /// evaluated at `t`. `alpha(t,0)` is the base geodesic and
    /// `alpha(0,s) = lambda(s)`.
    pub fn alpha(&self, t: f64, s: f64) -> Result<SpdMatrix> {
        let lambda = SpdMatrix::new(self.g0.metric().matrix() + s * self.k_cov.matrix())?;
        let base = PointMetric::new(lambda);
        let w = SymMatrix::new_unchecked(
            self.h_cov.matrix() + s * self.ltilde_cov.matrix(),
        );
        crate::geodesic::geodesic_point(&base, &w, t)
    }
}

/// The `(1,1)`-tensor in the plane of `Id` and `H_0` with trace
/// `e^{-n a(t)/2}` that is trace-orthogonal to `P(t)`; adapted frame.
pub fn p_perp(coeffs: &GeodesicCoeffs, t: f64) -> Result<SymMatrix> {
    let d0 = coeffs.traceless_norm_sq();
    if coeffs.is_conformal() {
        return Err(Error::DegenerateDirection {
            quantity: "tr(H_0^2)",
            value: d0,
        });
    }
    // existence check
    coeffs.scalars(t)?;
    let n = coeffs.base().dim();
    let nf = n as f64;
    let re = 4.0 + t * coeffs.tr_velocity();
    let im2 = t * t * nf * d0;
    let decay = 16.0 / (re * re + im2); // e^{-n a(t)/2}
    let p = (4.0 * coeffs.tr_velocity() + nf * t * coeffs.tr_velocity_sq()) / (4.0 * nf);
    let mut out = coeffs.traceless_adapted().matrix() * (-decay * p / d0);
    for i in 0..n {
        out[(i, i)] += decay / nf;
    }
    Ok(SymMatrix::new_unchecked(out))
}

/// Derivative of the variation exponent at `s = 0`:
///
/// `d/ds Q(t,s)|_0 = tr(H Lhat)/tr(H^2) t P(t)
///   + T(Lhat,H,Id,H)/tr(H^2) t P(t)_perp
///   + b(t) ( -T(H,Id,Lhat,Id)/S(H,Id) H_0 + Lhat_0 )`.
///
/// Adapted frame; not symmetric in general (the `Lhat_0` term carries the
/// commutator part of `Lhat`). Degenerate denominators (`tr(H^2)` or
/// `S(H,Id)` at zero) are rejected; callers fall back to the ODE.
pub fn q_s_derivative(var: &VariationData, t: f64) -> Result<DMatrix<f64>> {
    let coeffs = GeodesicCoeffs::new(&var.g0, &var.h_cov)?;
    let sigma = coeffs.tr_velocity_sq();
    if sigma <= 1e-12 {
        return Err(Error::DegenerateDirection {
            quantity: "tr(H^2)",
            value: sigma,
        });
    }
    if coeffs.is_conformal() {
        return Err(Error::DegenerateDirection {
            quantity: "S(H,Id)",
            value: var.g0.dim() as f64 * coeffs.traceless_norm_sq(),
        });
    }
    let n = var.g0.dim();
    let nf = n as f64;
    let tau = coeffs.tr_velocity();
    let (_, b) = coeffs.scalars(t)?;
    let p = coeffs.velocity_mixed(t)?;
    let perp = p_perp(&coeffs, t)?;

    let lhat = &var.lhat;
    let tr_l = lhat.trace();
    let tr_hl = trace_product(var.h_ad.matrix(), lhat);
    let c_p = tr_hl / sigma; // tr(H Lhat)/tr(H^2)
    let c_perp = (tr_l * sigma - tr_hl * tau) / sigma; // T(Lhat,H,Id,H)/tr(H^2)
    let s_h_id = nf * coeffs.traceless_norm_sq(); // S(H,Id) = n tr(H_0^2)
    let t_h_id = nf * tr_hl - tau * tr_l; // T(H,Id,Lhat,Id)

    let mut lhat0 = lhat.clone();
    for i in 0..n {
        lhat0[(i, i)] -= tr_l / nf;
    }
    let h0 = coeffs.traceless_adapted().matrix();
    Ok(c_p * t * p.matrix()
        + c_perp * t * perp.matrix()
        + b * (lhat0 - (t_h_id / s_h_id) * h0))
}

enum Mode {
    /// `h = 0`: the geodesic is constant and `J(t) = k + t l`.
    Zero,
    /// Generic direction: the closed form applies.
    Closed(Box<ClosedForm>),
    /// Nonzero conformal (or vanishing-norm) direction: closed-form
    /// denominators degenerate, evaluate by RK4 on the Jacobi equation.
    OdeFallback,
}

struct ClosedForm {
    coeffs: GeodesicCoeffs,
    h_ad: SymMatrix,
    k_ad: SymMatrix,
    lhat: DMatrix<f64>,
}

/// The Jacobi field along the geodesic from `(g0, h)` with `J(0) = k` and
/// covariant initial velocity `l`, evaluable at any admissible time.
pub struct JacobiField {
    g0: PointMetric,
    h: SymMatrix,
    k: SymMatrix,
    l: SymMatrix,
    mode: Mode,
}

impl JacobiField {
    pub fn new(g0: &PointMetric, h: &SymMatrix, k: &SymMatrix, l: &SymMatrix) -> Result<Self> {
        let coeffs = GeodesicCoeffs::new(g0, h)?;
        let k_ad = g0.adapted(k)?;
        check_same_dim(g0.dim(), l.dim())?;
        let scale = 1.0f64.max(k.norm()).max(l.norm());
        let mode = if h.norm() == 0.0 {
            Mode::Zero
        } else if coeffs.tr_velocity_sq() <= 1e-12 * scale || coeffs.is_conformal() {
            Mode::OdeFallback
        } else {
            let var = VariationData::new(g0, h, k, l)?;
            Mode::Closed(Box::new(ClosedForm {
                coeffs,
                h_ad: var.h_ad.clone(),
                k_ad,
                lhat: var.lhat.clone(),
            }))
        };
        Ok(Self {
            g0: g0.clone(),
            h: h.clone(),
            k: k.clone(),
            l: l.clone(),
            mode,
        })
    }

    /// Evaluates `J(t)`. `J(0) = k` exactly.
    pub fn at(&self, t: f64) -> Result<SymMatrix> {
        if t == 0.0 {
            return Ok(self.k.clone());
        }
        match &self.mode {
            Mode::Zero => Ok(SymMatrix::new_unchecked(
                self.k.matrix() + t * self.l.matrix(),
            )),
            Mode::OdeFallback => self.by_ode(t),
            Mode::Closed(closed) => {
                let ClosedForm {
                    coeffs,
                    h_ad,
                    k_ad,
                    lhat,
                } = closed.as_ref();
                let n = self.g0.dim();
                let nf = n as f64;
                let (_, b) = coeffs.scalars(t)?;
                let e = coeffs.transition(t)?;
                let p = coeffs.velocity_mixed(t)?;
                let perp = p_perp(coeffs, t)?;

                let sigma = coeffs.tr_velocity_sq();
                let tau = coeffs.tr_velocity();
                let d0 = coeffs.traceless_norm_sq();
                let h0 = coeffs.traceless_adapted().matrix();
                let tr_l = lhat.trace();
                let tr_hl = trace_product(h_ad.matrix(), lhat);
                let mut lhat0 = lhat.clone();
                for i in 0..n {
                    lhat0[(i, i)] -= tr_l / nf;
                }
                let tr_h0l0 = trace_product(h0, &lhat0);

                let c_p = tr_hl / sigma;
                let c_perp = (tr_l * sigma - tr_hl * tau) / sigma;
                let tail = ad_exp_tail(&(b * h0), &(b * lhat), 1);

                let inner = c_p * t * p.matrix()
                    + c_perp * t * perp.matrix()
                    + b * (&lhat0 - (tr_h0l0 / d0) * h0)
                    + tail;
                let total = e.matrix() * inner + k_ad.matrix() * e.matrix();
                let s = self.g0.sqrt_matrix();
                Ok(SymMatrix::new_unchecked(s * total * s))
            }
        }
    }

    fn by_ode(&self, t: f64) -> Result<SymMatrix> {
        let (h, l, t_abs) = if t > 0.0 {
            (self.h.clone(), self.l.clone(), t)
        } else {
            // time reversal flips the odd-order initial data
            (-&self.h, -&self.l, -t)
        };
        let dt = 1e-4f64.min(t_abs / 1000.0);
        let sol = integrate_jacobi(self.g0.metric(), &h, &self.k, &l, t_abs, dt)?;
        if let Some(lost) = sol.positivity_lost {
            return Err(Error::OutsideExistence {
                t,
                lo: f64::NEG_INFINITY,
                hi: lost,
            });
        }
        let (_, _, xi, _) = sol.states.last().unwrap();
        Ok(xi.clone())
    }
}

/// One-shot evaluation of the Jacobi field; see [`JacobiField`].
pub fn jacobi_field(
    g0: &PointMetric,
    h: &SymMatrix,
    k: &SymMatrix,
    l: &SymMatrix,
    t: f64,
) -> Result<SymMatrix> {
    JacobiField::new(g0, h, k, l)?.at(t)
}

/// Right-hand side of the Jacobi equation along a geodesic
/// (`xi_tt` as a function of the current state):
///
/// `xi_tt = -g_t g^{-1} xi g^{-1} g_t + g_t g^{-1} xi_t + xi_t g^{-1} g_t
///  + 1/2 tr(g^{-1} g_t g^{-1} xi_t) g - 1/2 tr(g^{-1} g_t g^{-1} g_t g^{-1} xi) g
///  + 1/2 tr(g^{-1} g_t g^{-1} xi) g_t - 1/2 tr(g^{-1} xi_t) g_t
///  + 1/4 tr(g^{-1} g_t g^{-1} g_t) xi - 1/2 tr(g^{-1} g_t) xi_t`.
pub fn jacobi_rhs(
    g: &SpdMatrix,
    g_t: &SymMatrix,
    xi: &SymMatrix,
    xi_t: &SymMatrix,
) -> Result<SymMatrix> {
    check_same_dim(g.dim(), g_t.dim())?;
    check_same_dim(g.dim(), xi.dim())?;
    check_same_dim(g.dim(), xi_t.dim())?;
    let g_inv = g
        .matrix()
        .clone()
        .try_inverse()
        .ok_or(Error::NotPositiveDefinite {
            min_eig: 0.0,
            max_eig: f64::INFINITY,
        })?;
    Ok(SymMatrix::new_unchecked(jacobi_rhs_raw(
        g.matrix(),
        &g_inv,
        g_t.matrix(),
        xi.matrix(),
        xi_t.matrix(),
    )))
}

/// Allocation-light version for the RK4 oracle.
pub(crate) fn jacobi_rhs_raw(
    g: &DMatrix<f64>,
    g_inv: &DMatrix<f64>,
    v: &DMatrix<f64>,
    xi: &DMatrix<f64>,
    xi_t: &DMatrix<f64>,
) -> DMatrix<f64> {
    let vm = g_inv * v; // g^{-1} g_t
    let xm = g_inv * xi; // g^{-1} xi
    let wm = g_inv * xi_t; // g^{-1} xi_t
    let mut out = -(v * &xm * &vm);
    out += v * &wm + xi_t * &vm;
    out += 0.5 * trace_product(&vm, &wm) * g;
    out -= 0.5 * trace_product(&(&vm * &vm), &xm) * g;
    out += 0.5 * trace_product(&vm, &xm) * v;
    out -= 0.5 * wm.trace() * v;
    out += 0.25 * trace_product(&vm, &vm) * xi;
    out -= 0.5 * vm.trace() * xi_t;
    out
}
