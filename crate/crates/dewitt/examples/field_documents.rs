//! Field documents on disk: build a two-point metric field, write it as
//! JSON, read it back bit-exactly, and push it through the field-level
//! exponential map.
//!
//! ```bash
//! cargo run --example field_documents
//! ```

use std::sync::Arc;

use dewitt::field::{exp_map, log_map, MetricField, SampledBase, TangentField};
use dewitt::io::{to_json_string, FieldDocument};
use dewitt::sym::{SpdMatrix, SymMatrix};

fn main() -> dewitt::Result<()> {
    let base = SampledBase::new(2, vec!["west".into(), "east".into()], vec![1.0, 2.0])?;
    let g0 = MetricField::new(
        Arc::clone(&base),
        vec![
            SpdMatrix::from_row_major(2, &[1.0, 0.25, 0.25, 2.0])?,
            SpdMatrix::from_row_major(2, &[1.5, -0.5, -0.5, 1.0])?,
        ],
    )?;

    let doc = FieldDocument::from_metric_field(&g0);
    let text = to_json_string(&doc);
    println!("metric field document:\n{text}");

    let parsed: FieldDocument = serde_json::from_str(&text).expect("valid json");
    let reread = parsed.to_metric_field()?;
    let bit_exact = reread
        .values()
        .iter()
        .zip(g0.values())
        .all(|(a, b)| a.matrix() == b.matrix());
    println!("write-then-read is bit-exact: {bit_exact}");

    let h = TangentField::new(
        Arc::clone(&base),
        vec![
            SymMatrix::from_row_major(2, &[0.4, 0.1, 0.1, -0.3])?,
            SymMatrix::from_row_major(2, &[-0.2, 0.0, 0.0, 0.5])?,
        ],
    )?;
    let image = exp_map(&g0, &h)?;
    let recovered = log_map(&g0, &image)?;
    let worst = recovered
        .values()
        .iter()
        .zip(h.values())
        .map(|(a, b)| (a.matrix() - b.matrix()).norm())
        .fold(0.0f64, f64::max);
    println!("field Exp/Log roundtrip deviation: {worst:.3e}");

    // a failing point is reported by name
    let bad = TangentField::new(
        Arc::clone(&base),
        vec![
            SymMatrix::from_row_major(2, &[0.1, 0.0, 0.0, 0.1])?,
            g0.values()[1].as_sym().scale(-2.0),
        ],
    )?;
    println!("domain violation: {}", exp_map(&g0, &bad).unwrap_err());
    Ok(())
}
