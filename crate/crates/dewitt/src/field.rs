//! Sampled metric fields and integrated (global) quantities.
//!
//! The base manifold enters only through quadrature data: a list of point
//! ids with positive weights. Every implemented formula is pointwise in the
//! base, so no mesh connectivity is needed; integrals are weighted sums in
//! fixed point order with compensated summation, making results
//! reproducible regardless of evaluation strategy.
//!
//! On the smooth space of metrics the integrated inner product is only a
//! weak Riemannian metric (tangent-to-dual is injective, not surjective);
//! on a finite sample set the discretized [`global_inner`] is an ordinary
//! inner product. This gap is inherent to discretization and changes none
//! of the implemented formulas, all of which are pointwise.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geodesic::{ExistenceInterval, GeodesicCoeffs};
use crate::jacobi::JacobiField;
use crate::oracles::{diff_at, sample_index, uniform_spacing};
use crate::point::{inner, ricci_like, PointMetric};
use crate::sym::{trace_product, SpdMatrix, SymMatrix};

/// Neumaier-compensated accumulator; summation order stays deterministic
/// and roundoff below 1e-15 relative for desk-scale sums.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Quadrature data of the sampled base manifold: matrix dimension, point
/// ids, and one positive weight per point (the volume element `dx`).
///
/// Compact support is automatic on a finite sample set.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledBase {
    n: usize,
    ids: Vec<String>,
    weights: Vec<f64>,
}

impl SampledBase {
    pub fn new(n: usize, ids: Vec<String>, weights: Vec<f64>) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if ids.is_empty() || ids.len() != weights.len() {
            return Err(Error::Grid(format!(
                "need matching nonempty ids ({}) and weights ({})",
                ids.len(),
                weights.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::Document(format!("duplicate point id '{id}'")));
            }
        }
        for (id, &w) in ids.iter().zip(&weights) {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Document(format!(
                    "weight of point '{id}' must be positive and finite, got {w}"
                )));
            }
        }
        Ok(Arc::new(Self { n, ids, weights }))
    }

    /// One anonymous point of weight 1.
    pub fn single(n: usize) -> Arc<Self> {
        Self::new(n, vec!["p0".into()], vec![1.0]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn check_base(a: &Arc<SampledBase>, b: &Arc<SampledBase>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::BaseMismatch {
            detail: format!(
                "{} points (n = {}) vs {} points (n = {})",
                a.len(),
                a.dim(),
                b.len(),
                b.dim()
            ),
        })
    }
}

/// A metric field: one SPD matrix per base point.
#[derive(Clone, Debug)]
pub struct MetricField {
    base: Arc<SampledBase>,
    values: Vec<SpdMatrix>,
}

/// A tangent field: one symmetric matrix per base point.
#[derive(Clone, Debug)]
pub struct TangentField {
    base: Arc<SampledBase>,
    values: Vec<SymMatrix>,
}

impl MetricField {
    pub fn new(base: Arc<SampledBase>, values: Vec<SpdMatrix>) -> Result<Self> {
        check_field_shape(&base, values.len(), values.iter().map(|v| v.dim()))?;
        Ok(Self { base, values })
    }

    pub fn constant(base: Arc<SampledBase>, value: SpdMatrix) -> Result<Self> {
        let values = vec![value; base.len()];
        Self::new(base, values)
    }

    pub fn base(&self) -> &Arc<SampledBase> {
        &self.base
    }

    pub fn values(&self) -> &[SpdMatrix] {
        &self.values
    }

    /// Tangent field with the same matrices (a metric is itself a symmetric
    /// tensor, the pure-trace direction).
    pub fn as_tangent(&self) -> TangentField {
        TangentField {
            base: self.base.clone(),
            values: self.values.iter().map(|v| v.as_sym().clone()).collect(),
        }
    }
}

impl TangentField {
    pub fn new(base: Arc<SampledBase>, values: Vec<SymMatrix>) -> Result<Self> {
        check_field_shape(&base, values.len(), values.iter().map(|v| v.dim()))?;
        Ok(Self { base, values })
    }

    pub fn constant(base: Arc<SampledBase>, value: SymMatrix) -> Result<Self> {
        let values = vec![value; base.len()];
        Self::new(base, values)
    }

    pub fn zero(base: Arc<SampledBase>) -> Self {
        let n = base.dim();
        let values = vec![SymMatrix::zeros(n); base.len()];
        Self { base, values }
    }

    pub fn base(&self) -> &Arc<SampledBase> {
        &self.base
    }

    pub fn values(&self) -> &[SymMatrix] {
        &self.values
    }
}

fn check_field_shape(
    base: &Arc<SampledBase>,
    count: usize,
    dims: impl Iterator<Item = usize>,
) -> Result<()> {
    if count != base.len() {
        return Err(Error::Grid(format!(
            "field has {count} values for {} base points",
            base.len()
        )));
    }
    for (i, d) in dims.enumerate() {
        if d != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: d,
            }
            .at_point(&base.ids()[i]));
        }
    }
    Ok(())
}

/// A curve of metric fields sampled on a strictly increasing time grid.
#[derive(Clone, Debug)]
pub struct MetricPath {
    base: Arc<SampledBase>,
    times: Vec<f64>,
    frames: Vec<MetricField>,
}

impl MetricPath {
    pub fn new(
        base: Arc<SampledBase>,
        times: Vec<f64>,
        frames: Vec<MetricField>,
    ) -> Result<Self> {
        if times.len() != frames.len() {
            return Err(Error::Grid(format!(
                "{} times vs {} frames",
                times.len(),
                frames.len()
            )));
        }
        if !times.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Grid("times must be strictly increasing".into()));
        }
        for f in &frames {
            check_base(&base, f.base())?;
        }
        Ok(Self {
            base,
            times,
            frames,
        })
    }

    pub fn base(&self) -> &Arc<SampledBase> {
        &self.base
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn frames(&self) -> &[MetricField] {
        &self.frames
    }
}

/// The canonical metric, integrated:
/// `G_g(h,k) = sum_p w_p tr(g^{-1} h g^{-1} k) sqrt(det g)`.
pub fn global_inner(g: &MetricField, h: &TangentField, k: &TangentField) -> Result<f64> {
    check_base(g.base(), h.base())?;
    check_base(g.base(), k.base())?;
    let mut acc = CompensatedSum::default();
    for (i, id) in g.base().ids().iter().enumerate() {
        let point = PointMetric::new(g.values[i].clone());
        let v = inner(&point, &h.values[i], &k.values[i]).map_err(|e| e.at_point(id))?;
        acc.add(v * point.sqrt_det() * g.base().weights()[i]);
    }
    Ok(acc.value())
}

/// Integrated Ricci-like tensor
/// `Ric(xi,eta) = sum_p w_p Ric_g(xi, eta) sqrt(det g)`; equals
/// `-(n/32)(4+n(n+1)) G(xi_0, eta)`.
pub fn global_ricci(g: &MetricField, xi: &TangentField, eta: &TangentField) -> Result<f64> {
    check_base(g.base(), xi.base())?;
    check_base(g.base(), eta.base())?;
    let mut acc = CompensatedSum::default();
    for (i, id) in g.base().ids().iter().enumerate() {
        let point = PointMetric::new(g.values[i].clone());
        let v = ricci_like(&point, &xi.values[i], &eta.values[i]).map_err(|e| e.at_point(id))?;
        acc.add(v * point.sqrt_det() * g.base().weights()[i]);
    }
    Ok(acc.value())
}

/// Energy of a sampled path over `[a, b]` (grid-aligned):
/// `E = 1/2 int_a^b G_g(g_t, g_t) dt` with second-order time derivatives
/// and composite trapezoidal quadrature.
pub fn energy(path: &MetricPath, a: f64, b: f64) -> Result<f64> {
    let dt = uniform_spacing(&path.times)?;
    let ia = sample_index(&path.times, a)?;
    let ib = sample_index(&path.times, b)?;
    if ia >= ib {
        return Err(Error::Grid(format!("need a < b on the grid, got [{a}, {b}]")));
    }
    let speeds = speed_series(path)?;
    Ok(0.5 * trapezoid(&speeds[ia..=ib], dt))
}

/// `G_{g(t)}(g_t, g_t)` at every sample time.
pub(crate) fn speed_series(path: &MetricPath) -> Result<Vec<f64>> {
    let dt = uniform_spacing(&path.times)?;
    let n_times = path.times.len();
    if n_times < 5 {
        return Err(Error::Grid(format!(
            "need at least 5 frames to differentiate, got {n_times}"
        )));
    }
    let base = &path.base;
    let mut out = vec![CompensatedSum::default(); n_times];
    for (p, _id) in base.ids().iter().enumerate() {
        let series: Vec<DMatrix<f64>> = path
            .frames
            .iter()
            .map(|f| f.values[p].matrix().clone())
            .collect();
        for (ti, acc) in out.iter_mut().enumerate() {
            let point = PointMetric::new(path.frames[ti].values[p].clone());
            let v = diff_at(&series, dt, ti, 1)?;
            let vm = point.inverse().matrix() * v;
            acc.add(trace_product(&vm, &vm) * point.sqrt_det() * base.weights()[p]);
        }
    }
    Ok(out.into_iter().map(|s| s.value()).collect())
}

fn trapezoid(values: &[f64], dt: f64) -> f64 {
    let mut acc = CompensatedSum::default();
    for (i, &v) in values.iter().enumerate() {
        let w = if i == 0 || i == values.len() - 1 { 0.5 } else { 1.0 };
        acc.add(w * v);
    }
    acc.value() * dt
}

/// A two-parameter family `g(t, s)` sampled on uniform `t` and `s` grids;
/// the `s` grid must contain 0.
#[derive(Clone, Debug)]
pub struct VariationGrid {
    base: Arc<SampledBase>,
    times: Vec<f64>,
    s_values: Vec<f64>,
    /// `frames[ti][si]`
    frames: Vec<Vec<MetricField>>,
}

impl VariationGrid {
    pub fn new(
        base: Arc<SampledBase>,
        times: Vec<f64>,
        s_values: Vec<f64>,
        frames: Vec<Vec<MetricField>>,
    ) -> Result<Self> {
        uniform_spacing(&times)?;
        uniform_spacing(&s_values)?;
        sample_index(&s_values, 0.0).map_err(|_| {
            Error::Grid("the s grid must contain s = 0 as a sample".into())
        })?;
        if frames.len() != times.len()
            || frames.iter().any(|row| row.len() != s_values.len())
        {
            return Err(Error::Grid(
                "frames must be indexed as [time][s] matching the grids".into(),
            ));
        }
        for row in &frames {
            for f in row {
                check_base(&base, f.base())?;
            }
        }
        Ok(Self {
            base,
            times,
            s_values,
            frames,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn field_at(&self, ti: usize, si: usize) -> &MetricField {
        &self.frames[ti][si]
    }
}

/// First variation of energy at `s = 0` over `[a, b]`, evaluated from the
/// closed formula: the boundary term `G_g(g_t, g_s)` plus the integral of
/// `G_g(-g_tt + g_t g^{-1} g_t + 1/4 tr(g^{-1}g_t g^{-1}g_t) g
///  - 1/2 tr(g^{-1}g_t) g_t, g_s)`.
///
/// Agrees with the centered difference of [`energy`] in `s` to the
/// discretization order.
pub fn first_variation(grid: &VariationGrid, a: f64, b: f64) -> Result<f64> {
    let dt = uniform_spacing(&grid.times)?;
    let ds = uniform_spacing(&grid.s_values)?;
    let s0 = sample_index(&grid.s_values, 0.0)?;
    let ia = sample_index(&grid.times, a)?;
    let ib = sample_index(&grid.times, b)?;
    if ia >= ib {
        return Err(Error::Grid(format!("need a < b on the grid, got [{a}, {b}]")));
    }
    let n_times = grid.times.len();
    if n_times < 5 {
        return Err(Error::Grid("need at least 5 time samples".into()));
    }

    let mut integrand = vec![CompensatedSum::default(); n_times];
    let mut boundary = CompensatedSum::default();
    for p in 0..grid.base.len() {
        let center: Vec<DMatrix<f64>> = grid
            .frames
            .iter()
            .map(|row| row[s0].values[p].matrix().clone())
            .collect();
        for (ti, acc) in integrand.iter_mut().enumerate() {
            let g = PointMetric::new(grid.frames[ti][s0].values[p].clone());
            let g_t = diff_at(&center, dt, ti, 1)?;
            let g_tt = diff_at(&center, dt, ti, 2)?;
            let s_series: Vec<DMatrix<f64>> = grid.frames[ti]
                .iter()
                .map(|f| f.values[p].matrix().clone())
                .collect();
            let g_s = diff_at(&s_series, ds, s0, 1)?;

            let vm = g.inverse().matrix() * &g_t;
            let residual = -&g_tt
                + &g_t * &vm
                + 0.25 * trace_product(&vm, &vm) * g.metric().matrix()
                - 0.5 * vm.trace() * &g_t;
            let sm = g.inverse().matrix() * &g_s;
            let weight = g.sqrt_det() * grid.base.weights()[p];
            acc.add(trace_product(&(g.inverse().matrix() * &residual), &sm) * weight);
            if ti == ia || ti == ib {
                let sign = if ti == ib { 1.0 } else { -1.0 };
                boundary.add(sign * trace_product(&vm, &sm) * weight);
            }
        }
    }
    let values: Vec<f64> = integrand.into_iter().map(|s| s.value()).collect();
    Ok(boundary.value() + trapezoid(&values[ia..=ib], dt))
}

/// Forward existence data of the field geodesic from `(g0, h)`: the
/// minimum over base points, with the limiting conformal point when the
/// bound is finite.
#[derive(Clone, Debug)]
pub struct FieldExistence {
    pub sup_t: f64,
    /// `(point id, tr H)` of the point attaining a finite bound.
    pub limiting: Option<(String, f64)>,
}

impl FieldExistence {
    pub fn interval(&self) -> ExistenceInterval {
        ExistenceInterval { sup_t: self.sup_t }
    }
}

/// Existence interval of the field geodesic: infinite unless some point has
/// a conformal direction with negative trace, in which case
/// `sup_t = -4 / min tr(H)` over those points.
pub fn existence_interval(g0: &MetricField, h: &TangentField) -> Result<FieldExistence> {
    check_base(g0.base(), h.base())?;
    let mut worst: Option<(String, f64)> = None;
    for (i, id) in g0.base().ids().iter().enumerate() {
        let point = PointMetric::new(g0.values[i].clone());
        let coeffs =
            GeodesicCoeffs::new(&point, &h.values[i]).map_err(|e| e.at_point(id))?;
        if coeffs.is_conformal() && coeffs.tr_velocity() < 0.0 {
            let tr = coeffs.tr_velocity();
            if worst.as_ref().is_none_or(|(_, w)| tr < *w) {
                worst = Some((id.clone(), tr));
            }
        }
    }
    Ok(match worst {
        Some((id, tr)) => FieldExistence {
            sup_t: -4.0 / tr,
            limiting: Some((id, tr)),
        },
        None => FieldExistence {
            sup_t: f64::INFINITY,
            limiting: None,
        },
    })
}

/// Pointwise exponential map lifted to fields; the first failing point is
/// reported by id.
pub fn exp_map(g0: &MetricField, h: &TangentField) -> Result<MetricField> {
    check_base(g0.base(), h.base())?;
    let values = g0
        .base()
        .ids()
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let point = PointMetric::new(g0.values[i].clone());
            crate::geodesic::exp_point(&point, &h.values[i]).map_err(|e| e.at_point(id))
        })
        .collect::<Result<Vec<_>>>()?;
    MetricField::new(g0.base().clone(), values)
}

/// Pointwise logarithm lifted to fields.
pub fn log_map(g0: &MetricField, g: &MetricField) -> Result<TangentField> {
    check_base(g0.base(), g.base())?;
    let values = g0
        .base()
        .ids()
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let point = PointMetric::new(g0.values[i].clone());
            crate::geodesic::log_point(&point, &g.values[i]).map_err(|e| e.at_point(id))
        })
        .collect::<Result<Vec<_>>>()?;
    TangentField::new(g0.base().clone(), values)
}

/// The field geodesic at a single time.
pub fn geodesic_at(g0: &MetricField, h: &TangentField, t: f64) -> Result<MetricField> {
    let path = geodesic_path(g0, h, &[t])?;
    Ok(path.1.into_iter().next().unwrap())
}

/// Samples the field geodesic on the given times (per-point coefficients
/// are computed once). Returns the times with one metric field per time.
pub fn geodesic_path(
    g0: &MetricField,
    h: &TangentField,
    times: &[f64],
) -> Result<(Vec<f64>, Vec<MetricField>)> {
    check_base(g0.base(), h.base())?;
    let base = g0.base();
    let coeffs: Vec<GeodesicCoeffs> = base
        .ids()
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let point = PointMetric::new(g0.values[i].clone());
            GeodesicCoeffs::new(&point, &h.values[i]).map_err(|e| e.at_point(id))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut frames = Vec::with_capacity(times.len());
    for &t in times {
        let values = coeffs
            .iter()
            .zip(base.ids())
            .map(|(c, id)| c.point(t).map_err(|e| e.at_point(id)))
            .collect::<Result<Vec<_>>>()?;
        frames.push(MetricField::new(base.clone(), values)?);
    }
    Ok((times.to_vec(), frames))
}

/// Samples the field Jacobi field on the given times.
pub fn jacobi_path(
    g0: &MetricField,
    h: &TangentField,
    k: &TangentField,
    l: &TangentField,
    times: &[f64],
) -> Result<Vec<TangentField>> {
    check_base(g0.base(), h.base())?;
    check_base(g0.base(), k.base())?;
    check_base(g0.base(), l.base())?;
    let base = g0.base();
    let fields: Vec<JacobiField> = base
        .ids()
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let point = PointMetric::new(g0.values[i].clone());
            JacobiField::new(&point, &h.values[i], &k.values[i], &l.values[i])
                .map_err(|e| e.at_point(id))
        })
        .collect::<Result<Vec<_>>>()?;
    times
        .iter()
        .map(|&t| {
            let values = fields
                .iter()
                .zip(base.ids())
                .map(|(f, id)| f.at(t).map_err(|e| e.at_point(id)))
                .collect::<Result<Vec<_>>>()?;
            TangentField::new(base.clone(), values)
        })
        .collect()
}

/// The field Jacobi field at a single time.
pub fn jacobi_at(
    g0: &MetricField,
    h: &TangentField,
    k: &TangentField,
    l: &TangentField,
    t: f64,
) -> Result<TangentField> {
    Ok(jacobi_path(g0, h, k, l, &[t])?.into_iter().next().unwrap())
}
