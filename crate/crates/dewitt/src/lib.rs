//! Numerical geometry of the canonical (DeWitt) metric on the space of
//! Riemannian metrics.
//!
//! The space of Riemannian metrics on a manifold carries a natural weak
//! Riemannian metric, `G_g(h,k) = \int tr(g^{-1} h g^{-1} k) vol(g)`. Its
//! Levi-Civita connection, curvature, geodesics, exponential map and Jacobi
//! fields are all pointwise in the underlying manifold and admit closed
//! forms. This crate implements those closed forms on sampled metric fields
//! (one symmetric positive-definite matrix per sample point) together with
//! independent verification machinery: Runge-Kutta integration of the
//! geodesic and Jacobi equations, finite-difference differentiators, and
//! brute-force basis traces.
//!
//! Module map:
//!
//! - [`sym`]: symmetric / SPD matrix algebra (spectral exp and log, traceless
//!   decomposition, trace forms, the ad-series operator).
//! - [`point`]: pointwise geometry (inner product, Christoffel symbol and its
//!   derivative, curvature by two routes, Ricci-like and scalar-like
//!   curvature, covariant derivative along curves).
//! - [`geodesic`]: closed-form geodesics with exact branch handling, the
//!   exponential/logarithm maps with their maximal domains, and the planar
//!   visualization map.
//! - [`jacobi`]: geodesic variations, closed-form Jacobi fields, and the
//!   Jacobi equation right-hand side.
//! - [`field`]: sampled base manifolds, metric/tangent fields, path energy,
//!   first variation, and the integrated Ricci-like tensor.
//! - [`oracles`]: RK4 integrators, finite differences, basis traces: the
//!   independent ground truth for every closed form.
//! - [`verify`]: seeded randomized suites comparing closed forms against the
//!   oracles.
//! - [`io`], [`figure`], [`cli`]: document formats, SVG output, and the
//!   command-line surface.
//!
//! The `examples/` directory contains one runnable example per capability;
//! `cargo run -- help` lists the CLI subcommands.

pub mod cli;
pub mod error;
pub mod field;
pub mod figure;
pub mod geodesic;
pub mod io;
pub mod jacobi;
pub mod oracles;
pub mod point;
pub mod sym;
pub mod verify;

pub use error::{Error, Result};
pub use field::{MetricField, MetricPath, SampledBase, TangentField};
pub use geodesic::{ExistenceInterval, GeodesicCoeffs};
pub use point::PointMetric;
pub use sym::{SpdMatrix, SymMatrix};
