//! Report rendering in the three output formats.
//!
//! `json` is line-delimited: one object per result. `csv` always starts
//! with the header row for the record type, even when there are no rows.

use std::fmt::Write as _;
use std::str::FromStr;

use clap::ValueEnum;
use nda_core::exprlang::EvalResult;
use nda_core::{Arithmetic, Carrier, ConvergenceVerdict, LawReport, PartialSums, ValidationReport};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

pub const LAW_HEADER: [&str; 10] = [
    "arith",
    "law",
    "status",
    "witness",
    "range",
    "sides",
    "checked",
    "violations",
    "skipped",
    "note",
];
pub const EVAL_HEADER: [&str; 3] = ["arith", "expr", "result"];
pub const VERDICT_HEADER: [&str; 8] = [
    "seq",
    "verdict",
    "budget",
    "window",
    "first_term",
    "last_term",
    "min_step",
    "max_step",
];
pub const SUM_HEADER: [&str; 4] = ["arith", "seq", "k", "partial_sum"];

fn csv_block<const N: usize>(header: [&str; N], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Space-separated carrier values, e.g. `2 3 3`.
fn values(c: &Carrier, vs: &[f64]) -> String {
    vs.iter()
        .map(|&v| c.format_value(v))
        .collect::<Vec<_>>()
        .join(" ")
}

fn tuple(c: &Carrier, vs: &[f64]) -> String {
    format!(
        "({})",
        vs.iter()
            .map(|&v| c.format_value(v))
            .collect::<Vec<_>>()
            .join(", ")
    )
}

/// Left-aligned columns separated by two spaces.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::new();
        for (cell, w) in cells.zip(&widths) {
            let _ = write!(s, "{cell:<w$}  ");
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(&mut header.iter().copied());
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}

pub fn law_reports(ar: &Arithmetic, reports: &[LawReport], format: Format) -> String {
    let c = ar.carrier();
    let spec = ar.to_string();
    match format {
        Format::Json => reports
            .iter()
            .map(|r| {
                json!({
                    "arith": spec,
                    "law": r.law.name(),
                    "status": r.status.to_string(),
                    "witness": r.witness,
                    "range": r.range,
                    "sides": r.sides.map(|(l, rr)| [l, rr]),
                    "checked": r.pairs_checked,
                    "violations": r.violations,
                    "skipped": r.skipped,
                    "note": r.note,
                })
                .to_string()
                    + "\n"
            })
            .collect(),
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        spec.clone(),
                        r.law.name().to_string(),
                        r.status.to_string(),
                        r.witness.as_deref().map_or(String::new(), |w| values(c, w)),
                        c.format_value(r.range),
                        r.sides.map_or(String::new(), |(l, rr)| values(c, &[l, rr])),
                        r.pairs_checked.to_string(),
                        r.violations.to_string(),
                        r.skipped.to_string(),
                        r.note.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            csv_block(LAW_HEADER, &rows)
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.law.name().to_string(),
                        r.status.to_string(),
                        r.witness.as_deref().map_or("-".into(), |w| tuple(c, w)),
                        r.sides.map_or("-".into(), |(l, rr)| {
                            format!("{} != {}", c.format_value(l), c.format_value(rr))
                        }),
                        format!("[0, {}]", c.format_value(r.range)),
                        r.note.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            format!(
                "# {spec}\n{}",
                table(
                    &["law", "status", "witness", "sides", "range", "note"],
                    &rows
                )
            )
        }
    }
}

pub fn eval_result(ar: &Arithmetic, expr: &str, result: &EvalResult, format: Format) -> String {
    match format {
        Format::Table => format!("{result}\n"),
        Format::Json => {
            let v = match result {
                EvalResult::Value { value, text } => {
                    json!({"arith": ar.to_string(), "expr": expr, "kind": "value", "result": text, "value": value})
                }
                EvalResult::Bool(b) => {
                    json!({"arith": ar.to_string(), "expr": expr, "kind": "bool", "result": b})
                }
            };
            v.to_string() + "\n"
        }
        Format::Csv => csv_block(
            EVAL_HEADER,
            &[vec![ar.to_string(), expr.to_string(), result.to_string()]],
        ),
    }
}

pub fn verdict(seq: &str, v: &ConvergenceVerdict, format: Format) -> String {
    let e = &v.evidence;
    match format {
        Format::Table => format!(
            "{seq}: {} within K = {}\n  terms {}..{}: per-step change of ln|t| in [{:.6}, {:.6}]\n  last term ~ {}\n",
            v.verdict, v.budget, e.first_term, e.last_term, e.min_step, e.max_step, e.last_magnitude
        ),
        Format::Json => {
            let mut obj = serde_json::to_value(v).expect("plain data");
            if let Value::Object(m) = &mut obj {
                m.insert("seq".into(), json!(seq));
            }
            obj.to_string() + "\n"
        }
        Format::Csv => csv_block(
            VERDICT_HEADER,
            &[vec![
                seq.to_string(),
                v.verdict.to_string(),
                v.budget.to_string(),
                v.window.to_string(),
                e.first_term.to_string(),
                e.last_term.to_string(),
                e.min_step.to_string(),
                e.max_step.to_string(),
            ]],
        ),
    }
}

pub fn partial_sums(ar: &Arithmetic, seq: &str, ps: &PartialSums, format: Format) -> String {
    let c = ar.carrier();
    let last = ps.sums.last().copied().unwrap_or(0.0);
    match format {
        Format::Table => {
            let stationary = match ps.stationary_at {
                Some(k) => format!("stationary at k={k}"),
                None => "not stationary".to_string(),
            };
            format!(
                "{seq} summed in {ar}, n = {}: sum {}, {stationary}\n",
                ps.sums.len(),
                c.format_value(last)
            )
        }
        Format::Json => {
            json!({
                "arith": ar.to_string(),
                "seq": seq,
                "n": ps.sums.len(),
                "sum": last,
                "stationary_at": ps.stationary_at,
                "sums": ps.sums,
            })
            .to_string()
                + "\n"
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = ps
                .sums
                .iter()
                .enumerate()
                .map(|(k, &s)| {
                    vec![
                        ar.to_string(),
                        seq.to_string(),
                        (k + 1).to_string(),
                        c.format_value(s),
                    ]
                })
                .collect();
            csv_block(SUM_HEADER, &rows)
        }
    }
}

/// The serialized name of a unit enum variant.
fn label(v: &impl serde::Serialize) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        _ => String::new(),
    }
}

pub fn validation(report: &ValidationReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string(report).expect("plain data") + "\n",
        Format::Csv => csv_block(
            [
                "f",
                "carrier",
                "passed",
                "strictly_increasing",
                "zero_anchored",
                "multiplicative",
                "violation",
            ],
            &[vec![
                report.f.clone(),
                report.carrier.clone(),
                report.passed.to_string(),
                report.strictly_increasing.to_string(),
                report.zero_anchored.to_string(),
                label(&report.multiplicative),
                report
                    .first_violation
                    .as_ref()
                    .map_or(String::new(), |v| v.reason.clone()),
            ]],
        ),
        Format::Table => {
            let mut s = format!(
                "{} on {}: {}\n  strictly increasing: {}\n  f(0) = 0: {}\n  f(1) = 1: {}\n",
                report.f,
                report.carrier,
                if report.passed {
                    "admissible"
                } else {
                    "rejected"
                },
                report.strictly_increasing,
                report.zero_anchored,
                label(&report.multiplicative),
            );
            if let Some(v) = &report.first_violation {
                let _ = writeln!(s, "  first violation at index {}: {}", v.index, v.reason);
            }
            s
        }
    }
}
