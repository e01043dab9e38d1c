//! Command-line surface.
//!
//! Exit codes: 0 success, 2 usage or input-document errors, 3 domain
//! violations (existence interval, exponential/logarithm domains), 4
//! verification failure.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::field::{self, MetricField, MetricPath, TangentField};
use crate::figure::{figure1_svg, FigureSpec};
use crate::io::{read_json, write_json, FieldDocument, PathDocument, FORMAT_VERSION};
use crate::point::{curvature, ricci_like, scalar_like, CurvatureRoute, PointMetric};
use crate::verify::{parse_suites, run_suites, VerifyConfig};

#[derive(Parser)]
#[command(
    name = "dewitt",
    version,
    about = "Geodesics, exponential maps, curvature and Jacobi fields of the \
             canonical metric on the space of Riemannian metrics",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the geodesic from a metric field in a tangent direction.
    Geodesic {
        /// Starting metric field (JSON field document)
        #[arg(long)]
        metric: PathBuf,
        /// Initial velocity field (JSON field document)
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        t_start: f64,
        #[arg(long)]
        t_end: f64,
        /// Number of grid intervals
        #[arg(long)]
        steps: usize,
        /// Output path document
        #[arg(long)]
        out: PathBuf,
    },
    /// Exponential map of a tangent field.
    Exp {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Logarithm: the velocity pointing from a metric field to a target.
    Log {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Jacobi field along a geodesic, sampled in time.
    Jacobi {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        dir: PathBuf,
        /// Initial value J(0)
        #[arg(long)]
        k: PathBuf,
        /// Initial covariant velocity
        #[arg(long)]
        l: PathBuf,
        #[arg(long)]
        t_end: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pointwise curvature R(h,k)l with Ricci-like and scalar-like values.
    Curvature {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        k: PathBuf,
        #[arg(long)]
        l: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the energy of a sampled metric path.
    Energy {
        #[arg(long)]
        path: PathBuf,
    },
    /// Render the planar exponential-map figure as SVG.
    Figure1 {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Number of geodesic ray directions
        #[arg(long, default_value_t = 16)]
        grid: usize,
        /// Comma-separated circle radii
        #[arg(long, default_value = "0.5,1,1.5,2,2.5,3")]
        radii: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the oracle verification suites.
    Verify {
        /// all, geodesic, expLog, curvature, jacobi or variation
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Tolerance floor applied to the per-check pinned tolerances
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

/// Parses arguments from the environment and runs; returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_domain_violation() {
                3
            } else {
                2
            }
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Geodesic {
            metric,
            dir,
            t_start,
            t_end,
            steps,
            out,
        } => {
            let g0 = read_metric(&metric)?;
            let h = read_tangent(&dir)?;
            let times = sample_grid(&g0, &h, t_start, t_end, steps)?;
            let (times, frames) = field::geodesic_path(&g0, &h, &times)?;
            let path = MetricPath::new(g0.base().clone(), times, frames)?;
            write_json(&out, &PathDocument::from_metric_path(&path))?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Command::Exp { metric, dir, out } => {
            let g0 = read_metric(&metric)?;
            let h = read_tangent(&dir)?;
            let image = field::exp_map(&g0, &h)?;
            write_json(&out, &FieldDocument::from_metric_field(&image))?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Command::Log {
            metric,
            target,
            out,
        } => {
            let g0 = read_metric(&metric)?;
            let g = read_metric(&target)?;
            let h = field::log_map(&g0, &g)?;
            write_json(&out, &FieldDocument::from_tangent_field(&h))?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Command::Jacobi {
            metric,
            dir,
            k,
            l,
            t_end,
            steps,
            out,
        } => {
            let g0 = read_metric(&metric)?;
            let h = read_tangent(&dir)?;
            let k = read_tangent(&k)?;
            let l = read_tangent(&l)?;
            let times = sample_grid(&g0, &h, 0.0, t_end, steps)?;
            let frames = field::jacobi_path(&g0, &h, &k, &l, &times)?;
            write_json(
                &out,
                &PathDocument::from_tangent_frames(g0.base(), &times, &frames),
            )?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Command::Curvature {
            metric,
            h,
            k,
            l,
            out,
        } => {
            let g0 = read_metric(&metric)?;
            let h = read_tangent(&h)?;
            let k = read_tangent(&k)?;
            let l = read_tangent(&l)?;
            let doc = curvature_document(&g0, &h, &k, &l)?;
            write_json(&out, &doc)?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Command::Energy { path } => {
            let doc: PathDocument = read_json(&path)?;
            let metric_path = doc.to_metric_path()?;
            let (a, b) = (
                metric_path.times()[0],
                *metric_path.times().last().unwrap(),
            );
            println!("{}", field::energy(&metric_path, a, b)?);
            Ok(0)
        }
        Command::Figure1 {
            n,
            grid,
            radii,
            out,
        } => {
            let radii = radii
                .split(',')
                .map(|r| {
                    r.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Document(format!("bad radius '{r}': {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            let spec = FigureSpec {
                n,
                rays: grid,
                radii,
                ..FigureSpec::default()
            };
            let svg = figure1_svg(&spec)?;
            std::fs::write(&out, svg)
                .map_err(|e| Error::Document(format!("{}: {e}", out.display())))?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Command::Verify { suite, seed, tol } => {
            let suites = parse_suites(&suite)?;
            let cfg = VerifyConfig {
                seed,
                tol_floor: tol,
            };
            let reports = run_suites(&suites, &cfg);
            let mut all_passed = true;
            let mut total = 0.0;
            for report in &reports {
                for check in &report.checks {
                    println!(
                        "[{}] {:<42} max error {:>10.3e}  tol {:>8.1e}  {}",
                        report.suite,
                        check.name,
                        check.max_error,
                        check.tolerance,
                        if check.passed() { "PASS" } else { "FAIL" }
                    );
                }
                println!(
                    "[{}] suite {} ({} checks, max error {:.3e}, {:.2} s)",
                    report.suite,
                    if report.passed() { "PASS" } else { "FAIL" },
                    report.checks.len(),
                    report.max_error(),
                    report.seconds
                );
                all_passed &= report.passed();
                total += report.seconds;
            }
            println!(
                "verification {} in {total:.2} s (seed {seed})",
                if all_passed { "PASS" } else { "FAIL" }
            );
            Ok(if all_passed { 0 } else { 4 })
        }
    }
}

fn read_metric(path: &Path) -> Result<MetricField> {
    read_json::<FieldDocument>(path)?.to_metric_field()
}

fn read_tangent(path: &Path) -> Result<TangentField> {
    read_json::<FieldDocument>(path)?.to_tangent_field()
}

/// Builds the sampling grid `t_start + k (t_end - t_start)/steps`,
/// `k = 0..=steps`, refusing `t_end` at or beyond the field existence
/// bound (reported with the limiting point id).
fn sample_grid(
    g0: &MetricField,
    h: &TangentField,
    t_start: f64,
    t_end: f64,
    steps: usize,
) -> Result<Vec<f64>> {
    if steps == 0 || !t_start.is_finite() || !t_end.is_finite() || t_end <= t_start {
        return Err(Error::Grid(format!(
            "need steps >= 1 and t_end > t_start, got steps = {steps}, range [{t_start}, {t_end}]"
        )));
    }
    let existence = field::existence_interval(g0, h)?;
    if t_end >= existence.sup_t {
        let err = Error::OutsideExistence {
            t: t_end,
            lo: 0.0,
            hi: existence.sup_t,
        };
        return Err(match existence.limiting {
            Some((id, _)) => err.at_point(&id),
            None => err,
        });
    }
    Ok((0..=steps)
        .map(|k| t_start + k as f64 * (t_end - t_start) / steps as f64)
        .collect())
}

#[derive(serde::Serialize)]
struct CurvaturePoint {
    id: String,
    weight: f64,
    /// `R(h,k)l` at the point, row-major.
    curvature: Vec<f64>,
    ricci_like: f64,
}

#[derive(serde::Serialize)]
struct CurvatureDocument {
    format_version: String,
    n: usize,
    /// Scalar-like curvature constant of this dimension.
    c_n: f64,
    /// Integrated Ricci-like tensor of (h, l) over the field.
    global_ricci: f64,
    points: Vec<CurvaturePoint>,
}

fn curvature_document(
    g0: &MetricField,
    h: &TangentField,
    k: &TangentField,
    l: &TangentField,
) -> Result<CurvatureDocument> {
    let base = g0.base();
    let mut points = Vec::with_capacity(base.len());
    for (i, id) in base.ids().iter().enumerate() {
        let point = PointMetric::new(g0.values()[i].clone());
        let r = curvature(
            &point,
            &h.values()[i],
            &k.values()[i],
            &l.values()[i],
            CurvatureRoute::ClosedForm,
        )
        .map_err(|e| e.at_point(id))?;
        let ric = ricci_like(&point, &h.values()[i], &l.values()[i])
            .map_err(|e| e.at_point(id))?;
        points.push(CurvaturePoint {
            id: id.clone(),
            weight: base.weights()[i],
            curvature: r.matrix().as_slice().to_vec(),
            ricci_like: ric,
        });
    }
    Ok(CurvatureDocument {
        format_version: FORMAT_VERSION.into(),
        n: base.dim(),
        c_n: scalar_like(base.dim()),
        global_ricci: field::global_ricci(g0, h, l)?,
        points,
    })
}
