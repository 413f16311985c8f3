//! Deterministic accumulation of named residual maxima for harness reports.

use std::fmt::Write;

pub struct Outcome {
    pub report: String,
    pub violations: usize,
}

struct Row {
    name: &'static str,
    max: f64,
    tolerance: f64,
    samples: usize,
}

/// Tracks, per named check, the worst value seen against a pinned tolerance.
/// Rows render in first-recorded order, so output is reproducible.
#[derive(Default)]
pub struct Metrics {
    rows: Vec<Row>,
    failures: Vec<String>,
}

impl Metrics {
    pub fn new() -> Self {
        Metrics::default()
    }

    pub fn record(&mut self, name: &'static str, value: f64, tolerance: f64) {
        if let Some(row) = self.rows.iter_mut().find(|r| r.name == name) {
            row.max = row.max.max(value);
            row.samples += 1;
        } else {
            self.rows.push(Row {
                name,
                max: value,
                tolerance,
                samples: 1,
            });
        }
    }

    pub fn fail(&mut self, message: String) {
        self.failures.push(message);
    }

    pub fn violations(&self) -> usize {
        // NaN counts as a violation
        let failing = self
            .rows
            .iter()
            .filter(|r| r.max > r.tolerance || r.max.is_nan())
            .count();
        failing + self.failures.len()
    }

    pub fn render(&self, out: &mut String) {
        for row in &self.rows {
            let status = if row.max <= row.tolerance {
                "pass"
            } else {
                "FAIL"
            };
            writeln!(
                out,
                "  {}: max={:.3e} tol={:.1e} samples={} {}",
                row.name, row.max, row.tolerance, row.samples, status
            )
            .unwrap();
        }
        for failure in &self.failures {
            writeln!(out, "  FAIL: {failure}").unwrap();
        }
    }
}
