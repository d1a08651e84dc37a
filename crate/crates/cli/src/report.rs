//! Benchmark report assembly: per-variant measurements, speed-up and
//! accuracy-delta columns against a reference variant, and the fixed CSV
//! schema.

use std::io::Write;

pub const REPORT_HEADER: &str =
    "dataset,variant,status,iterations,time_s,accuracy,support,speedup,acc_delta";

/// One measured variant before the reference columns are filled in.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub variant: String,
    pub converged: bool,
    pub iterations: u64,
    /// Median training wall time over the repeats, in seconds.
    pub time_s: f64,
    pub accuracy: f64,
    pub support: usize,
}

/// A complete report row.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub dataset: String,
    pub measurement: Measurement,
    pub speedup: f64,
    pub acc_delta: f64,
}

/// `t_ref / t`: how many times faster than the reference this variant ran.
pub fn speedup(reference_time: f64, time: f64) -> f64 {
    reference_time / time
}

/// `(a_ref - a) / a_ref`: relative accuracy lost against the reference.
pub fn accuracy_delta(reference_accuracy: f64, accuracy: f64) -> f64 {
    (reference_accuracy - accuracy) / reference_accuracy
}

/// Median of an unordered sample.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

/// Fills the speed-up and accuracy-delta columns against the named
/// reference variant.
pub fn assemble_rows(
    dataset: &str,
    measurements: Vec<Measurement>,
    reference: &str,
) -> Vec<ReportRow> {
    let reference_entry = measurements
        .iter()
        .find(|m| m.variant == reference)
        .expect("reference variant was measured");
    let (t_ref, a_ref) = (reference_entry.time_s, reference_entry.accuracy);
    measurements
        .iter()
        .map(|m| ReportRow {
            dataset: dataset.to_string(),
            speedup: speedup(t_ref, m.time_s),
            acc_delta: accuracy_delta(a_ref, m.accuracy),
            measurement: m.clone(),
        })
        .collect()
}

pub fn write_report(rows: &[ReportRow], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "{REPORT_HEADER}")?;
    for row in rows {
        let m = &row.measurement;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            row.dataset,
            m.variant,
            if m.converged { "converged" } else { "max_iterations" },
            m.iterations,
            m.time_s,
            m.accuracy,
            m.support,
            row.speedup,
            row.acc_delta
        )?;
    }
    Ok(())
}
