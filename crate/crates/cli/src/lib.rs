//! Command implementations behind the `nda` binary.
//!
//! Each command returns the text to print, or a [`CliError`] that carries
//! the process exit code: 1 usage, 2 validation, 3 evaluation.

pub mod demo;
pub mod output;
pub mod session;

use std::fmt;

use nda_core::exprlang::{eval_str, EvalError};
use nda_core::{
    arith_partial_sums, check_law, practical_convergence, Arithmetic, Carrier, Error,
    FunctionalParameter, Law, Overflow, SequenceSpec,
};

pub use output::Format;
pub use session::Session;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitKind {
    Usage = 1,
    Validation = 2,
    Evaluation = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Usage,
            message: message.into(),
        }
    }

    pub fn code(&self) -> u8 {
        self.kind as u8
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = if e.is_validation() {
            ExitKind::Validation
        } else if e.is_evaluation() {
            ExitKind::Evaluation
        } else {
            ExitKind::Usage
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Syntax(s) => CliError::usage(format!("syntax error: {s}")),
            EvalError::Arith(e) => e.into(),
        }
    }
}

pub type CliResult<T = String> = Result<T, CliError>;

pub fn build_arith(spec: &str, overflow: Option<Overflow>) -> CliResult<Arithmetic> {
    let ar: Arithmetic = spec.parse()?;
    match overflow {
        Some(o) => Ok(ar.with_overflow(o)?),
        None => Ok(ar),
    }
}

pub fn cmd_eval(spec: &str, expr: &str, overflow: Option<Overflow>, format: Format) -> CliResult {
    let ar = build_arith(spec, overflow)?;
    let result = eval_str(expr, &ar)?;
    Ok(output::eval_result(&ar, expr, &result, format))
}

pub fn cmd_laws(
    spec: &str,
    laws: &str,
    range: usize,
    overflow: Option<Overflow>,
    format: Format,
) -> CliResult {
    let ar = build_arith(spec, overflow)?;
    let laws = Law::parse_list(laws)?;
    laws_report(&ar, &laws, range, format)
}

pub(crate) fn laws_report(
    ar: &Arithmetic,
    laws: &[Law],
    range: usize,
    format: Format,
) -> CliResult {
    if range > ar.top() {
        return Err(CliError::usage(format!(
            "range {range} exceeds the carrier (top index {})",
            ar.top()
        )));
    }
    let reports: Vec<_> = laws.iter().map(|&law| check_law(ar, law, range)).collect();
    Ok(output::law_reports(ar, &reports, format))
}

pub fn cmd_series_practical(
    seq: &str,
    budget: usize,
    window: usize,
    tol: f64,
    format: Format,
) -> CliResult {
    let parsed: SequenceSpec = seq.parse()?;
    let v = practical_convergence(&parsed, budget, window, tol)?;
    Ok(output::verdict(seq, &v, format))
}

pub fn cmd_series_sum(
    spec: &str,
    seq: &str,
    terms: usize,
    overflow: Option<Overflow>,
    format: Format,
) -> CliResult {
    let ar = build_arith(spec, overflow)?;
    let parsed: SequenceSpec = seq.parse()?;
    let ps = arith_partial_sums(&ar, &parsed, terms)?;
    Ok(output::partial_sums(&ar, seq, &ps, format))
}

/// Runs one demo; a failed check is reported as an evaluation error after
/// the transcript has been produced.
pub fn cmd_demo(d: demo::Demo, format: Format) -> (String, CliResult<()>) {
    match demo::run(d) {
        Ok(t) => {
            let text = t.render(format);
            let status = if t.passed() {
                Ok(())
            } else {
                Err(CliError {
                    kind: ExitKind::Evaluation,
                    message: format!("demo {} did not reproduce its claims", d.name()),
                })
            };
            (text, status)
        }
        Err(e) => (String::new(), Err(e.into())),
    }
}

/// Validates `<f>@<carrier>`, also accepting a full arithmetic spec.
pub fn cmd_validate(spec: &str, format: Format) -> CliResult {
    let body = spec
        .strip_prefix("projective:")
        .or_else(|| spec.strip_prefix("dual:"))
        .unwrap_or(spec);
    let (f, carrier) = body
        .rsplit_once('@')
        .ok_or_else(|| CliError::usage(format!("expected <f>@<carrier>, got `{spec}`")))?;
    let carrier: Carrier = carrier.parse()?;
    let f: FunctionalParameter = f.parse()?;
    let report = f.validate(&carrier);
    let text = output::validation(&report, format);
    if report.passed {
        Ok(text)
    } else {
        Err(CliError {
            kind: ExitKind::Validation,
            message: text.trim_end().to_string(),
        })
    }
}
