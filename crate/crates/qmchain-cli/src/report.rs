//! Report assembly for the `run` subcommand.
//!
//! Every conditional probability is computed along both routes (the quotient
//! of joint Born probabilities on the final state, and the trace over the
//! deduced prepared state) and the report carries their absolute difference.
//! The text rendering uses fixed-point with 12 digits; the JSON rendering
//! carries full doubles.

use std::fmt::Write;

use num_complex::Complex64;
use serde::Serialize;

use qmchain_core::chain::{ChainError, ChainScenario, CollapseDeviation};
use qmchain_core::{predict_conditional, CONDITION_EPS, CROSS_TOL};

use crate::scenario::{from_complex, CNum};

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub system_dim: usize,
    pub first_class: &'static str,
    pub first_outcomes: usize,
    pub second_class: &'static str,
    pub second_outcomes: usize,
    pub outcomes: Vec<OutcomeReport>,
    pub max_equivalence_diff: f64,
    pub equivalence_tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct OutcomeReport {
    pub q: usize,
    pub probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prepared: Option<PreparedReport>,
    pub conditionals: Vec<ConditionalReport>,
}

#[derive(Debug, Serialize)]
pub struct PreparedReport {
    pub matrix: Vec<Vec<CNum>>,
    pub purity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collapse_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collapse_note: Option<&'static str>,
}

#[derive(Debug, Serialize)]
pub struct ConditionalReport {
    pub r: usize,
    pub joint: f64,
    pub via_born_quotient: f64,
    pub via_prepared_trace: f64,
    pub abs_diff: f64,
}

pub fn run_report(scenario: &ChainScenario) -> Result<RunReport, ChainError> {
    let result = scenario.run()?;
    let ka = scenario.first().outcomes();
    let kb = scenario.second().outcomes();
    let mut outcomes = Vec::with_capacity(ka);
    let mut max_diff: f64 = 0.0;

    for q in 0..ka {
        let probability = result.pr_first(q)?;
        let prepared = match result.prepared_state(q) {
            Ok(p) => p,
            Err(ChainError::ConditionUndefined { .. }) => {
                outcomes.push(OutcomeReport {
                    q,
                    probability,
                    note: Some(format!(
                        "conditioning undefined: Pr(a_{q}) below {CONDITION_EPS:.0e}"
                    )),
                    prepared: None,
                    conditionals: Vec::new(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let (collapse_deviation, collapse_note) = match result.collapse_deviation(q)? {
            CollapseDeviation::TraceDistance(t) => (Some(t), None),
            CollapseDeviation::NoCanonicalReference => {
                (None, Some("no canonical collapse reference"))
            }
        };
        let mut conditionals = Vec::with_capacity(kb);
        for r in 0..kb {
            let via_born_quotient = result.conditional(q, r)?;
            let via_prepared_trace = predict_conditional(&prepared, scenario.second(), r)?;
            let abs_diff = (via_born_quotient - via_prepared_trace).abs();
            max_diff = max_diff.max(abs_diff);
            conditionals.push(ConditionalReport {
                r,
                joint: result.pr_joint(q, r)?,
                via_born_quotient,
                via_prepared_trace,
                abs_diff,
            });
        }
        let matrix = (0..prepared.dim())
            .map(|i| {
                (0..prepared.dim())
                    .map(|j| from_complex(prepared.matrix().get(i, j)))
                    .collect()
            })
            .collect();
        outcomes.push(OutcomeReport {
            q,
            probability,
            note: None,
            prepared: Some(PreparedReport {
                matrix,
                purity: prepared.purity(),
                collapse_deviation,
                collapse_note,
            }),
            conditionals,
        });
    }

    Ok(RunReport {
        system_dim: scenario.first().system_dim(),
        first_class: scenario.first().class().as_str(),
        first_outcomes: ka,
        second_class: scenario.second().class().as_str(),
        second_outcomes: kb,
        outcomes,
        max_equivalence_diff: max_diff,
        equivalence_tolerance: CROSS_TOL,
        pass: max_diff <= CROSS_TOL,
    })
}

/// Fixed-point with 12 digits; negative zero normalized away.
fn fixed(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.12}")
}

fn complex_str(z: CNum) -> String {
    let c = Complex64::new(z[0], z[1]);
    let sign = if c.im < 0.0 { '-' } else { '+' };
    format!("{}{}{}i", fixed(c.re), sign, fixed(c.im.abs()))
}

pub fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "scenario: system_dim={} first={}({} outcomes) second={}({} outcomes)",
        report.system_dim,
        report.first_class,
        report.first_outcomes,
        report.second_class,
        report.second_outcomes
    )
    .unwrap();
    for o in &report.outcomes {
        writeln!(out).unwrap();
        writeln!(out, "outcome q={}: Pr(a_q)={}", o.q, fixed(o.probability)).unwrap();
        if let Some(note) = &o.note {
            writeln!(out, "  {note}").unwrap();
            continue;
        }
        if let Some(p) = &o.prepared {
            writeln!(out, "  prepared state (purity={}):", fixed(p.purity)).unwrap();
            for row in &p.matrix {
                let cells: Vec<String> = row.iter().map(|z| complex_str(*z)).collect();
                writeln!(out, "    [ {} ]", cells.join("  ")).unwrap();
            }
            match (p.collapse_deviation, p.collapse_note) {
                (Some(t), _) => writeln!(out, "  collapse deviation: {}", fixed(t)).unwrap(),
                (None, Some(note)) => writeln!(out, "  collapse deviation: {note}").unwrap(),
                (None, None) => {}
            }
        }
        for c in &o.conditionals {
            writeln!(
                out,
                "  r={}: joint={} born_quotient={} prepared_trace={} |diff|={:.3e}",
                c.r,
                fixed(c.joint),
                fixed(c.via_born_quotient),
                fixed(c.via_prepared_trace),
                c.abs_diff
            )
            .unwrap();
        }
    }
    writeln!(out).unwrap();
    writeln!(
        out,
        "equivalence: max |born_quotient - prepared_trace| = {:.3e} (tolerance {:.1e}) -> {}",
        report.max_equivalence_diff,
        report.equivalence_tolerance,
        if report.pass { "PASS" } else { "FAIL" }
    )
    .unwrap();
    out
}

pub fn render_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
