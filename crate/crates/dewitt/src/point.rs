//! Pointwise differential geometry of the canonical metric.
//!
//! At a single sample point the metric is an SPD matrix `g` and tangent
//! vectors are symmetric matrices. The fiberwise inner product is
//! `<h,k>_g = tr(g^{-1} h g^{-1} k)`; the Christoffel symbol, its
//! directional derivative, the curvature tensor, and the Ricci-like and
//! scalar-like traces all have closed forms in `g^{-1}h`-type mixed tensors.
//!
//! Curvature is computed by two independent routes (the `dGamma` definition
//! and the closed commutator form) that are cross-checked against each other
//! in the verification suites.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::oracles;
use crate::sym::{
    check_same_dim, sym_eigen, symmetrize, trace_product, SpdMatrix, SymMatrix,
};

/// An SPD metric value together with eagerly cached derived quantities:
/// the inverse, the square root and inverse square root, and
/// `sqrt(det g)` (the local volume density factor). Every pointwise
/// operation reuses these, avoiding repeated factorizations.
#[derive(Clone, Debug)]
pub struct PointMetric {
    g: SpdMatrix,
    inverse: SpdMatrix,
    sqrt: DMatrix<f64>,
    inv_sqrt: DMatrix<f64>,
    sqrt_det: f64,
}

impl PointMetric {
    pub fn new(g: SpdMatrix) -> Self {
        let (q, lam) = sym_eigen(g.matrix());
        let diag_map = |f: &dyn Fn(f64) -> f64| {
            let d = DMatrix::from_diagonal(&lam.map(f));
            symmetrize(&(&q * d * q.transpose()))
        };
        let inverse = SpdMatrix::new_unchecked(diag_map(&|x| 1.0 / x));
        let sqrt = diag_map(&f64::sqrt);
        let inv_sqrt = diag_map(&|x| 1.0 / x.sqrt());
        let sqrt_det = (0.5 * lam.iter().map(|x| x.ln()).sum::<f64>()).exp();
        Self {
            g,
            inverse,
            sqrt,
            inv_sqrt,
            sqrt_det,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(SpdMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn metric(&self) -> &SpdMatrix {
        &self.g
    }

    pub fn inverse(&self) -> &SpdMatrix {
        &self.inverse
    }

    /// `sqrt(det g)`, the local factor of the volume density.
    pub fn sqrt_det(&self) -> f64 {
        self.sqrt_det
    }

    /// `g^{1/2}`.
    pub fn sqrt_matrix(&self) -> &DMatrix<f64> {
        &self.sqrt
    }

    /// `g^{-1/2}`.
    pub fn inv_sqrt_matrix(&self) -> &DMatrix<f64> {
        &self.inv_sqrt
    }

    /// The mixed tensor `g^{-1} h` (one index raised; not symmetric).
    pub fn mixed(&self, h: &SymMatrix) -> Result<DMatrix<f64>> {
        check_same_dim(self.dim(), h.dim())?;
        Ok(self.inverse.matrix() * h.matrix())
    }

    /// The adapted representative `g^{-1/2} h g^{-1/2}`: similar to the
    /// mixed tensor `g^{-1} h` but genuinely symmetric, so spectral
    /// operations apply.
    pub fn adapted(&self, h: &SymMatrix) -> Result<SymMatrix> {
        check_same_dim(self.dim(), h.dim())?;
        Ok(SymMatrix::new_unchecked(
            &self.inv_sqrt * h.matrix() * &self.inv_sqrt,
        ))
    }

    /// Recovers the covariant tensor `g^{1/2} x g^{1/2}` from an adapted
    /// representative.
    pub fn covariant_from_adapted(&self, x: &SymMatrix) -> SymMatrix {
        SymMatrix::new_unchecked(&self.sqrt * x.matrix() * &self.sqrt)
    }
}

/// Fiberwise inner product `<h,k>_g = tr(g^{-1} h g^{-1} k)`.
pub fn inner(g: &PointMetric, h: &SymMatrix, k: &SymMatrix) -> Result<f64> {
    let hm = g.mixed(h)?;
    let km = g.mixed(k)?;
    Ok(trace_product(&hm, &km))
}

/// The Christoffel symbol of the canonical metric:
///
/// `Gamma_g(h,k) = 1/2 h g^{-1} k + 1/2 k g^{-1} h + 1/4 tr(g^{-1}h g^{-1}k) g
///  - 1/4 tr(g^{-1}h) k - 1/4 tr(g^{-1}k) h`.
///
/// Symmetric in `(h,k)` and symmetric-matrix valued.
pub fn christoffel(g: &PointMetric, h: &SymMatrix, k: &SymMatrix) -> Result<SymMatrix> {
    let hm = g.mixed(h)?;
    let km = g.mixed(k)?;
    // h g^{-1} k = h * (g^{-1} k)
    let mut out = 0.5 * (h.matrix() * &km + k.matrix() * &hm);
    out += 0.25 * trace_product(&hm, &km) * g.metric().matrix();
    out -= 0.25 * hm.trace() * k.matrix();
    out -= 0.25 * km.trace() * h.matrix();
    Ok(SymMatrix::new_unchecked(out))
}

/// The Christoffel symbol in the mixed framing `H = g^{-1} h`:
///
/// `GammaBar(H,K) = 1/2 (HK + KH) + 1/4 tr(HK) Id - 1/4 tr(H) K - 1/4 tr(K) H`.
///
/// Consistent with [`christoffel`]: `g^{-1} Gamma_g(h,k) = GammaBar(g^{-1}h, g^{-1}k)`.
pub fn christoffel_mixed(h: &SymMatrix, k: &SymMatrix) -> Result<SymMatrix> {
    check_same_dim(h.dim(), k.dim())?;
    let n = h.dim();
    let hk = h.matrix() * k.matrix();
    let mut out = 0.5 * (&hk + hk.transpose());
    let quarter_tr = 0.25 * trace_product(h.matrix(), k.matrix());
    for i in 0..n {
        out[(i, i)] += quarter_tr;
    }
    out -= 0.25 * h.trace() * k.matrix();
    out -= 0.25 * k.trace() * h.matrix();
    Ok(SymMatrix::new_unchecked(out))
}

/// Directional derivative of the Christoffel symbol in the metric slot:
/// the derivative of `g -> Gamma_g(k,l)` at `g` in direction `h`,
///
/// `dGamma(h)(k,l) = -1/2 k g^{-1}h g^{-1}l - 1/2 l g^{-1}h g^{-1}k
///  - 1/4 tr(g^{-1}h g^{-1}k g^{-1}l) g - 1/4 tr(g^{-1}k g^{-1}h g^{-1}l) g
///  + 1/4 tr(g^{-1}k g^{-1}l) h + 1/4 tr(g^{-1}h g^{-1}k) l
///  + 1/4 tr(g^{-1}h g^{-1}l) k`.
pub fn dgamma(
    g: &PointMetric,
    h: &SymMatrix,
    k: &SymMatrix,
    l: &SymMatrix,
) -> Result<SymMatrix> {
    let hm = g.mixed(h)?;
    let km = g.mixed(k)?;
    let lm = g.mixed(l)?;
    let hl = &hm * &lm;
    let mut out = -0.5 * (k.matrix() * &hl + l.matrix() * &hm * &km);
    let tr_hkl = trace_product(&(&hm * &km), &lm);
    let tr_khl = trace_product(&km, &hl);
    out += -0.25 * (tr_hkl + tr_khl) * g.metric().matrix();
    out += 0.25 * trace_product(&km, &lm) * h.matrix();
    out += 0.25 * trace_product(&hm, &km) * l.matrix();
    out += 0.25 * trace_product(&hm, &lm) * k.matrix();
    Ok(SymMatrix::new_unchecked(out))
}

/// Which of the two curvature implementations to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvatureRoute {
    /// `R(h,k)l = dGamma(h)(k,l) - dGamma(k)(h,l) - Gamma(h, Gamma(k,l)) + Gamma(k, Gamma(h,l))`.
    Definition,
    /// The closed commutator form for `g^{-1} R_g(h,k)l`, multiplied back
    /// by `g` to yield the covariant tensor.
    ClosedForm,
}

/// Riemannian curvature `R_g(h,k)l` in covariant form.
///
/// Both routes return the same tensor (cross-checked to 1e-9 in the
/// verification suites). The closed form is
///
/// ```text
/// g^{-1} R_g(h,k)l = 1/4 [[H,K],L]
///   + n/16 (tr(KL) H - tr(HL) K)
///   + 1/16 (tr(H)tr(L) K - tr(K)tr(L) H)
///   + 1/16 (tr(K)tr(HL) - tr(H)tr(KL)) Id
/// ```
pub fn curvature(
    g: &PointMetric,
    h: &SymMatrix,
    k: &SymMatrix,
    l: &SymMatrix,
    route: CurvatureRoute,
) -> Result<SymMatrix> {
    match route {
        CurvatureRoute::Definition => {
            let first = &dgamma(g, h, k, l)? - &dgamma(g, k, h, l)?;
            let second = &christoffel(g, h, &christoffel(g, k, l)?)?
                - &christoffel(g, k, &christoffel(g, h, l)?)?;
            Ok(&first - &second)
        }
        CurvatureRoute::ClosedForm => {
            let n = g.dim() as f64;
            let hm = g.mixed(h)?;
            let km = g.mixed(k)?;
            let lm = g.mixed(l)?;
            let bracket = crate::sym::ad(&crate::sym::ad(&hm, &km), &lm);
            let tr_kl = trace_product(&km, &lm);
            let tr_hl = trace_product(&hm, &lm);
            let mut mixed = 0.25 * bracket;
            mixed += n / 16.0 * (tr_kl * &hm - tr_hl * &km);
            mixed += (hm.trace() * lm.trace() / 16.0) * &km
                - (km.trace() * lm.trace() / 16.0) * &hm;
            let id_coeff = (km.trace() * tr_hl - hm.trace() * tr_kl) / 16.0;
            for i in 0..g.dim() {
                mixed[(i, i)] += id_coeff;
            }
            Ok(SymMatrix::new_unchecked(g.metric().matrix() * mixed))
        }
    }
}

/// Ricci-like curvature: the fiberwise trace of `k -> R_g(h,k)l`,
///
/// `Ric_g(h,l) = (4 + n(n+1))/32 (tr(H)tr(L) - n tr(HL))
///             = -(n/32)(4 + n(n+1)) <h_0, l>_g`,
///
/// with `H = g^{-1}h`, `L = g^{-1}l` and `h_0 = h - tr(H)/n g`.
///
/// A genuine Ricci tensor does not exist on the full (infinite-dimensional)
/// space of metrics: `k -> R_g(h,k)l` is an order-zero operator and never
/// of trace class there. The fiberwise trace is the meaningful substitute,
/// and it is what the brute-force basis-trace oracle computes.
pub fn ricci_like(g: &PointMetric, h: &SymMatrix, l: &SymMatrix) -> Result<f64> {
    let hm = g.mixed(h)?;
    let lm = g.mixed(l)?;
    let n = g.dim() as f64;
    let coeff = (4.0 + n * (n + 1.0)) / 32.0;
    Ok(coeff * (hm.trace() * lm.trace() - n * trace_product(&hm, &lm)))
}

/// Trace of the bracket endomorphism `K -> [[H,K],L]` on symmetric
/// matrices: `tr(H) tr(L) - n tr(HL)`.
pub fn trace_bracket(h: &SymMatrix, l: &SymMatrix) -> Result<f64> {
    check_same_dim(h.dim(), l.dim())?;
    let n = h.dim() as f64;
    Ok(h.trace() * l.trace() - n * trace_product(h.matrix(), l.matrix()))
}

/// Scalar-like curvature: the fiberwise trace of the Ricci-like
/// endomorphism, `c(n) = -(n/32)(4 + n(n+1))(n(n+1)/2 - 1)`. Constant,
/// depending only on the dimension.
pub fn scalar_like(n: usize) -> f64 {
    let n = n as f64;
    -(n / 32.0) * (4.0 + n * (n + 1.0)) * (n * (n + 1.0) / 2.0 - 1.0)
}

/// Covariant derivative of a vector field `V(t)` along a curve `g(t)`,
/// `(nabla V)(t) = V'(t) - Gamma_{g(t)}(g'(t), V(t))`, with time
/// derivatives by second-order finite differences on the uniform sample
/// grid (one-sided stencils at the boundary).
///
/// `t` must coincide with one of the sample times.
pub fn covariant_derivative_along(
    times: &[f64],
    curve: &[SpdMatrix],
    field: &[SymMatrix],
    t: f64,
) -> Result<SymMatrix> {
    if curve.len() != times.len() || field.len() != times.len() {
        return Err(Error::Grid(format!(
            "curve ({}), field ({}) and times ({}) must have equal lengths",
            curve.len(),
            field.len(),
            times.len()
        )));
    }
    let dt = oracles::uniform_spacing(times)?;
    let idx = oracles::sample_index(times, t)?;
    let g_mats: Vec<DMatrix<f64>> = curve.iter().map(|g| g.matrix().clone()).collect();
    let v_mats: Vec<DMatrix<f64>> = field.iter().map(|v| v.matrix().clone()).collect();
    let g_t = SymMatrix::new_unchecked(oracles::diff_at(&g_mats, dt, idx, 1)?);
    let v_t = SymMatrix::new_unchecked(oracles::diff_at(&v_mats, dt, idx, 1)?);
    let g = PointMetric::new(curve[idx].clone());
    Ok(&v_t - &christoffel(&g, &g_t, &field[idx])?)
}

/// The visualization metric on a single fiber,
/// `G^{x,gt}(h,k) = <h,k>_g sqrt(det(gt^{-1} g))`, for a fixed reference
/// metric `gt`.
pub fn vis_metric(
    g_tilde: &SpdMatrix,
    g: &PointMetric,
    h: &SymMatrix,
    k: &SymMatrix,
) -> Result<f64> {
    check_same_dim(g_tilde.dim(), g.dim())?;
    let (_, lam) = sym_eigen(g_tilde.matrix());
    let sqrt_det_tilde = (0.5 * lam.iter().map(|x| x.ln()).sum::<f64>()).exp();
    Ok(inner(g, h, k)? * g.sqrt_det() / sqrt_det_tilde)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sym::trace_inner;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_sym(rng: &mut impl Rng, n: usize, scale: f64) -> SymMatrix {
        SymMatrix::new_unchecked(DMatrix::from_fn(n, n, |_, _| {
            rng.random_range(-scale..scale)
        }))
    }

    fn random_point_metric(rng: &mut impl Rng, n: usize) -> PointMetric {
        PointMetric::new(crate::sym::sym_exp(&random_sym(rng, n, 0.8)))
    }

    fn offdiag(n: usize, value: f64) -> SymMatrix {
        let mut m = DMatrix::zeros(n, n);
        m[(0, 1)] = value;
        m[(1, 0)] = value;
        SymMatrix::new_unchecked(m)
    }

    #[test]
    fn cached_quantities_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for n in 2..=5 {
            let g = random_point_metric(&mut rng, n);
            let id = g.metric().matrix() * g.inverse().matrix();
            assert_relative_eq!(&id, &DMatrix::identity(n, n), epsilon = 1e-12);
            assert_relative_eq!(
                g.sqrt_det() * g.sqrt_det(),
                g.metric().matrix().determinant(),
                max_relative = 1e-12
            );
            let sq = g.sqrt_matrix() * g.sqrt_matrix();
            assert_relative_eq!(&sq, g.metric().matrix(), epsilon = 1e-12);
        }
    }

    #[test]
    fn inner_examples() {
        let g = PointMetric::identity(2);
        let id = SymMatrix::identity(2);
        assert_relative_eq!(inner(&g, &id, &id).unwrap(), 2.0);
        let h = SymMatrix::from_diagonal(&[1.0, -1.0]);
        assert_relative_eq!(inner(&g, &h, &id).unwrap(), 0.0);

        let g = PointMetric::new(SpdMatrix::from_diagonal(&[4.0, 1.0]).unwrap());
        let h = SymMatrix::from_diagonal(&[4.0, 0.0]);
        assert_relative_eq!(inner(&g, &h, &h).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn inner_is_symmetric_bilinear_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 2..=5 {
            for _ in 0..20 {
                let g = random_point_metric(&mut rng, n);
                let h = random_sym(&mut rng, n, 2.0);
                let k = random_sym(&mut rng, n, 2.0);
                assert_relative_eq!(
                    inner(&g, &h, &k).unwrap(),
                    inner(&g, &k, &h).unwrap(),
                    epsilon = 1e-12,
                    max_relative = 1e-12
                );
                if h.norm() > 1e-12 {
                    assert!(inner(&g, &h, &h).unwrap() > 0.0);
                }
                // bilinearity in the first slot
                let sum = &h + &k;
                assert_relative_eq!(
                    inner(&g, &sum, &k).unwrap(),
                    inner(&g, &h, &k).unwrap() + inner(&g, &k, &k).unwrap(),
                    max_relative = 1e-11,
                    epsilon = 1e-11
                );
            }
        }
    }

    #[test]
    fn christoffel_identity_example() {
        // Gamma_Id(Id, Id) = (1 + n/4 - n/2) Id = 1/2 Id for n = 2.
        let g = PointMetric::identity(2);
        let id = SymMatrix::identity(2);
        let gamma = christoffel(&g, &id, &id).unwrap();
        assert_relative_eq!(
            gamma.matrix(),
            &(DMatrix::identity(2, 2) * 0.5),
            epsilon = 1e-14
        );
    }

    #[test]
    fn christoffel_vanishes_on_zero_and_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let g = random_point_metric(&mut rng, 3);
        let h = random_sym(&mut rng, 3, 2.0);
        let zero = SymMatrix::zeros(3);
        assert_eq!(christoffel(&g, &zero, &h).unwrap().norm(), 0.0);
        for _ in 0..20 {
            let h = random_sym(&mut rng, 3, 2.0);
            let k = random_sym(&mut rng, 3, 2.0);
            let hk = christoffel(&g, &h, &k).unwrap();
            let kh = christoffel(&g, &k, &h).unwrap();
            assert_relative_eq!(hk.matrix(), kh.matrix(), epsilon = 1e-13);
        }
    }

    #[test]
    fn christoffel_mixed_examples() {
        let id = SymMatrix::identity(2);
        let out = christoffel_mixed(&id, &id).unwrap();
        assert_relative_eq!(
            out.matrix(),
            &(DMatrix::identity(2, 2) * 0.5),
            epsilon = 1e-14
        );

        // H traceless with H^2 = Id: GammaBar(H,H) = Id + 1/2 Id.
        let h = SymMatrix::from_diagonal(&[1.0, -1.0]);
        let out = christoffel_mixed(&h, &h).unwrap();
        assert_relative_eq!(
            out.matrix(),
            &(DMatrix::identity(2, 2) * 1.5),
            epsilon = 1e-14
        );

        let zero = SymMatrix::zeros(2);
        assert_eq!(christoffel_mixed(&zero, &id).unwrap().norm(), 0.0);
    }

    #[test]
    fn christoffel_mixed_consistency_with_covariant() {
        // g^{-1} Gamma_g(h,k) = GammaBar(g^{-1}h, g^{-1}k); at g = Id the
        // mixed tensors are themselves symmetric so both sides are directly
        // comparable.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let g = PointMetric::identity(3);
        for _ in 0..20 {
            let h = random_sym(&mut rng, 3, 2.0);
            let k = random_sym(&mut rng, 3, 2.0);
            let lhs = christoffel(&g, &h, &k).unwrap();
            let rhs = christoffel_mixed(&h, &k).unwrap();
            assert_relative_eq!(lhs.matrix(), rhs.matrix(), epsilon = 1e-13);
        }
    }

    #[test]
    fn dgamma_zero_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let g = random_point_metric(&mut rng, 3);
        let k = random_sym(&mut rng, 3, 2.0);
        let l = random_sym(&mut rng, 3, 2.0);
        let zero = SymMatrix::zeros(3);
        assert_eq!(dgamma(&g, &zero, &k, &l).unwrap().norm(), 0.0);
    }

    #[test]
    fn dgamma_symmetric_in_last_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let g = random_point_metric(&mut rng, 3);
        for _ in 0..20 {
            let h = random_sym(&mut rng, 3, 2.0);
            let k = random_sym(&mut rng, 3, 2.0);
            let l = random_sym(&mut rng, 3, 2.0);
            let a = dgamma(&g, &h, &k, &l).unwrap();
            let b = dgamma(&g, &h, &l, &k).unwrap();
            assert_relative_eq!(a.matrix(), b.matrix(), epsilon = 1e-12);
        }
    }

    #[test]
    fn dgamma_matches_finite_difference() {
        // Central difference of g -> Gamma_g(k,l) in direction h.
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let eps = 1e-5;
        for n in 2..=4 {
            for _ in 0..10 {
                let g = random_point_metric(&mut rng, n);
                let h = random_sym(&mut rng, n, 1.0);
                let k = random_sym(&mut rng, n, 1.0);
                let l = random_sym(&mut rng, n, 1.0);
                let g_plus = PointMetric::new(
                    SpdMatrix::new(g.metric().matrix() + eps * h.matrix()).unwrap(),
                );
                let g_minus = PointMetric::new(
                    SpdMatrix::new(g.metric().matrix() - eps * h.matrix()).unwrap(),
                );
                let fd = (christoffel(&g_plus, &k, &l).unwrap().matrix()
                    - christoffel(&g_minus, &k, &l).unwrap().matrix())
                    / (2.0 * eps);
                let closed = dgamma(&g, &h, &k, &l).unwrap();
                let err = (closed.matrix() - &fd).norm() / closed.norm().max(1.0);
                assert!(err < 1e-8, "finite-difference deviation {err:.3e}");
            }
        }
    }

    #[test]
    fn curvature_antisymmetry_in_first_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let g = random_point_metric(&mut rng, 3);
        let h = random_sym(&mut rng, 3, 2.0);
        let l = random_sym(&mut rng, 3, 2.0);
        let r = curvature(&g, &h, &h, &l, CurvatureRoute::Definition).unwrap();
        assert_eq!(r.norm(), 0.0);
        let r = curvature(&g, &h, &h, &l, CurvatureRoute::ClosedForm).unwrap();
        assert!(r.norm() < 1e-10 * l.norm().max(1.0));
    }

    #[test]
    fn curvature_hand_example() {
        // g = Id, n = 2, h = diag(1,-1), k = offdiag(1), l = diag(1,-1)
        // gives -(5/4) offdiag(1) by both routes.
        let g = PointMetric::identity(2);
        let h = SymMatrix::from_diagonal(&[1.0, -1.0]);
        let k = offdiag(2, 1.0);
        let expected = offdiag(2, -1.25);
        for route in [CurvatureRoute::Definition, CurvatureRoute::ClosedForm] {
            let r = curvature(&g, &h, &k, &h, route).unwrap();
            assert_relative_eq!(r.matrix(), expected.matrix(), epsilon = 1e-13);
        }
    }

    #[test]
    fn curvature_vanishing_example() {
        // g = Id, h = Id, k and l traceless with tr(kl) = 0.
        let g = PointMetric::identity(2);
        let id = SymMatrix::identity(2);
        let k = SymMatrix::from_diagonal(&[1.0, -1.0]);
        let l = offdiag(2, 1.0); // tr(kl) = 0
        assert_relative_eq!(trace_inner(&k, &l).unwrap(), 0.0);
        for route in [CurvatureRoute::Definition, CurvatureRoute::ClosedForm] {
            let r = curvature(&g, &id, &k, &l, route).unwrap();
            assert!(r.norm() < 1e-13);
        }
    }

    #[test]
    fn curvature_routes_agree_smoke() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        for n in 2..=4 {
            for _ in 0..20 {
                let g = random_point_metric(&mut rng, n);
                let h = random_sym(&mut rng, n, 2.0);
                let k = random_sym(&mut rng, n, 2.0);
                let l = random_sym(&mut rng, n, 2.0);
                let a = curvature(&g, &h, &k, &l, CurvatureRoute::Definition).unwrap();
                let b = curvature(&g, &h, &k, &l, CurvatureRoute::ClosedForm).unwrap();
                let err = (a.matrix() - b.matrix()).norm() / a.norm().max(1.0);
                assert!(err < 1e-9, "route deviation {err:.3e}");
            }
        }
    }

    #[test]
    fn first_bianchi_smoke() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let g = random_point_metric(&mut rng, 3);
        for _ in 0..20 {
            let h = random_sym(&mut rng, 3, 2.0);
            let k = random_sym(&mut rng, 3, 2.0);
            let l = random_sym(&mut rng, 3, 2.0);
            let sum = &(&curvature(&g, &h, &k, &l, CurvatureRoute::Definition).unwrap()
                + &curvature(&g, &k, &l, &h, CurvatureRoute::Definition).unwrap())
                + &curvature(&g, &l, &h, &k, CurvatureRoute::Definition).unwrap();
            assert!(sum.norm() < 1e-9 * h.norm().max(1.0));
        }
    }

    #[test]
    fn ricci_like_pure_trace_direction_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let g = random_point_metric(&mut rng, 3);
        let l = random_sym(&mut rng, 3, 2.0);
        let h = g.metric().as_sym().clone();
        assert_relative_eq!(ricci_like(&g, &h, &l).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn ricci_like_hand_example() {
        let g = PointMetric::identity(2);
        let h = SymMatrix::from_diagonal(&[1.0, -1.0]);
        assert_relative_eq!(ricci_like(&g, &h, &h).unwrap(), -1.25, epsilon = 1e-14);
    }

    #[test]
    fn ricci_like_inner_product_form() {
        // (4+n(n+1))/32 (tr H tr L - n tr(HL)) = -(n/32)(4+n(n+1)) <h_0, l>_g
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 2..=5 {
            for _ in 0..10 {
                let g = random_point_metric(&mut rng, n);
                let h = random_sym(&mut rng, n, 2.0);
                let l = random_sym(&mut rng, n, 2.0);
                let nf = n as f64;
                let tr_h = g.mixed(&h).unwrap().trace();
                let h0 =
                    SymMatrix::new_unchecked(h.matrix() - (tr_h / nf) * g.metric().matrix());
                let via_inner =
                    -(nf / 32.0) * (4.0 + nf * (nf + 1.0)) * inner(&g, &h0, &l).unwrap();
                assert_relative_eq!(
                    ricci_like(&g, &h, &l).unwrap(),
                    via_inner,
                    epsilon = 1e-12,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn trace_bracket_examples() {
        let id = SymMatrix::identity(3);
        assert_eq!(trace_bracket(&id, &id).unwrap(), 0.0);
        let h = SymMatrix::from_diagonal(&[1.0, -1.0]);
        assert_eq!(trace_bracket(&h, &h).unwrap(), -4.0);
    }

    #[test]
    fn scalar_like_values() {
        assert_relative_eq!(scalar_like(2), -1.25);
        assert_relative_eq!(scalar_like(3), -7.5);
        assert_relative_eq!(scalar_like(1), 0.0);
    }

    #[test]
    fn covariant_derivative_constant_inputs() {
        let n = 2;
        let times: Vec<f64> = (0..9).map(|i| i as f64 * 0.1).collect();
        let curve: Vec<SpdMatrix> = times.iter().map(|_| SpdMatrix::identity(n)).collect();
        let field: Vec<SymMatrix> = times
            .iter()
            .map(|_| SymMatrix::from_diagonal(&[1.0, 2.0]))
            .collect();
        let out = covariant_derivative_along(&times, &curve, &field, 0.4).unwrap();
        assert!(out.norm() < 1e-12);
    }

    #[test]
    fn covariant_derivative_linear_field_on_constant_curve() {
        // g constant: Gamma term vanishes (g_t = 0), derivative of t*k is k.
        let n = 2;
        let k = SymMatrix::from_diagonal(&[0.5, -2.0]);
        let times: Vec<f64> = (0..11).map(|i| i as f64 * 0.05).collect();
        let curve: Vec<SpdMatrix> = times.iter().map(|_| SpdMatrix::identity(n)).collect();
        let field: Vec<SymMatrix> = times.iter().map(|&t| k.scale(t)).collect();
        // interior and boundary samples
        for &t in &[0.0, 0.25, 0.5] {
            let out = covariant_derivative_along(&times, &curve, &field, t).unwrap();
            assert_relative_eq!(out.matrix(), k.matrix(), epsilon = 1e-11);
        }
    }

    #[test]
    fn vis_metric_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let g = random_point_metric(&mut rng, 2);
        let h = random_sym(&mut rng, 2, 2.0);
        let k = random_sym(&mut rng, 2, 2.0);
        // reference equals the metric: plain inner product
        assert_relative_eq!(
            vis_metric(g.metric(), &g, &h, &k).unwrap(),
            inner(&g, &h, &k).unwrap(),
            max_relative = 1e-12
        );
        // hand example: gt = Id, g = 4 Id, h = k = Id -> 1/2
        let g4 = PointMetric::new(SpdMatrix::from_diagonal(&[4.0, 4.0]).unwrap());
        let id = SymMatrix::identity(2);
        assert_relative_eq!(
            vis_metric(&SpdMatrix::identity(2), &g4, &id, &id).unwrap(),
            0.5,
            epsilon = 1e-14
        );
        // scaling the reference by lambda multiplies by lambda^{-n/2}
        let lambda = 2.7;
        let scaled = SpdMatrix::new(g.metric().matrix() * lambda).unwrap();
        assert_relative_eq!(
            vis_metric(&scaled, &g, &h, &k).unwrap(),
            vis_metric(g.metric(), &g, &h, &k).unwrap() / lambda,
            max_relative = 1e-12
        );
    }
}
