//! The functional parameter `f` of an arithmetic.
//!
//! `f` is evaluated once per carrier point when it is bound to a carrier; the
//! resulting strictly increasing array is what the arithmetic searches. Each
//! memoized value carries an absolute error radius: zero when the value is
//! exact in double-double (identity, quad, integer powers and `2^x - 1` on
//! integer carriers), a few ulps for transcendental evaluations.

use std::cmp::Ordering;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::carrier::{Carrier, Decimal};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;

/// Error radius of a transcendental evaluation, relative to its magnitude.
pub const TRANSCENDENTAL_RADIUS: f64 = 8.0 * f64::EPSILON;

/// Tolerance on `f(1) = 1` for multiplication to be enabled.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// A value of `f` with its absolute error radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Approx {
    pub value: ExtReal,
    pub radius: f64,
}

impl Approx {
    pub fn exact(value: ExtReal) -> Self {
        Approx { value, radius: 0.0 }
    }

    fn inexact(x: f64) -> Self {
        if !x.is_finite() {
            return Approx::exact(ExtReal::from_f64(x));
        }
        Approx {
            value: ExtReal::from_f64(x),
            radius: TRANSCENDENTAL_RADIUS * x.abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableEntry {
    pub key: f64,
    pub value: f64,
    pub line: usize,
}

/// User-supplied `(x, f(x))` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub source: String,
    pub entries: Vec<TableEntry>,
}

impl Table {
    pub fn from_pairs(source: impl Into<String>, pairs: &[(f64, f64)]) -> Self {
        Table {
            source: source.into(),
            entries: pairs
                .iter()
                .enumerate()
                .map(|(i, &(key, value))| TableEntry {
                    key,
                    value,
                    line: i + 1,
                })
                .collect(),
        }
    }

    fn lookup(&self, key: f64) -> Option<&TableEntry> {
        let pos = self
            .entries
            .partition_point(|e| e.key < key - key.abs() * 1e-9);
        self.entries
            .get(pos)
            .filter(|e| (e.key - key).abs() <= 1e-9 * key.abs().max(1e-300))
            .or_else(|| self.entries.iter().find(|e| e.key == key))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Identity,
    Power(f64),
    Exp2m1,
    Quad,
    Atanh(Decimal),
    Table(Arc<Table>),
}

/// A named strictly increasing map from carrier values to `[0, +inf]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalParameter {
    name: String,
    family: Family,
}

impl FunctionalParameter {
    pub fn identity() -> Self {
        Self::new("id", Family::Identity)
    }

    pub fn power(p: f64) -> Self {
        Self::new(format!("pow:{p}"), Family::Power(p))
    }

    pub fn exp2m1() -> Self {
        Self::new("exp2m1", Family::Exp2m1)
    }

    pub fn quad() -> Self {
        Self::new("quad", Family::Quad)
    }

    pub fn atanh(c: Decimal) -> Self {
        Self::new(format!("atanh:{c}"), Family::Atanh(c))
    }

    pub fn table(table: Table) -> Self {
        Self::new(
            format!("table:{}", table.source),
            Family::Table(Arc::new(table)),
        )
    }

    fn new(name: impl Into<String>, family: Family) -> Self {
        FunctionalParameter {
            name: name.into(),
            family,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Evaluates `f(v)`. Table parameters yield NaN for keys they lack.
    pub fn evaluate(&self, v: f64) -> ExtReal {
        if let Family::Table(t) = &self.family {
            return t
                .lookup(v)
                .map_or(ExtReal::NAN, |e| ExtReal::from_f64(e.value));
        }
        if v >= 0.0 && v.fract() == 0.0 && v < 9.0e15 {
            self.eval_rational(v as u128, 1).value
        } else {
            self.eval_real(v).value
        }
    }

    /// `f` at carrier point `i`, computed from the point's exact fraction.
    pub fn point(&self, carrier: &Carrier, i: usize) -> Approx {
        match &self.family {
            Family::Table(t) => match t.lookup(carrier.value_of(i)) {
                Some(e) => Approx::exact(ExtReal::from_f64(e.value)),
                None => Approx::exact(ExtReal::NAN),
            },
            _ => {
                let (num, den) = carrier.rational(i);
                self.eval_rational(num, den)
            }
        }
    }

    fn eval_rational(&self, num: u128, den: u128) -> Approx {
        let integral = num.is_multiple_of(den);
        let n = num / den;
        match &self.family {
            Family::Identity if integral && n <= u64::MAX as u128 => {
                Approx::exact(ExtReal::from_u64(n as u64))
            }
            Family::Power(p) if integral && n <= u64::MAX as u128 && exact_power(n, *p) => {
                Approx::exact(ExtReal::from_u64(n as u64).powi(*p as u32))
            }
            Family::Exp2m1 if integral => {
                if n > 1023 {
                    Approx::exact(ExtReal::INFINITY)
                } else {
                    Approx::exact(ExtReal::exp2_int(n as u32) - ExtReal::ONE)
                }
            }
            Family::Quad if integral && n < (1u128 << 52) => {
                let x = ExtReal::from_u64(n as u64);
                Approx::exact((x + x * x).halve())
            }
            Family::Atanh(c) => atanh_rational(num, den, c),
            _ => self.eval_real(num as f64 / den as f64),
        }
    }

    fn eval_real(&self, x: f64) -> Approx {
        if x == 0.0 {
            return match &self.family {
                Family::Table(_) => Approx::exact(ExtReal::NAN),
                _ => Approx::exact(ExtReal::ZERO),
            };
        }
        match &self.family {
            Family::Identity => Approx::inexact(x),
            Family::Power(p) => Approx::inexact(x.powf(*p)),
            Family::Exp2m1 => Approx::inexact((x * std::f64::consts::LN_2).exp_m1()),
            Family::Quad => Approx::inexact((x + x * x) * 0.5),
            Family::Atanh(c) => {
                let c = c.to_f64();
                if x > c || x < 0.0 {
                    Approx::exact(ExtReal::NAN)
                } else if x == c {
                    Approx::exact(ExtReal::INFINITY)
                } else {
                    Approx::inexact(0.5 * (2.0 * x / (c - x)).ln_1p())
                }
            }
            Family::Table(t) => t.lookup(x).map_or(Approx::exact(ExtReal::NAN), |e| {
                Approx::exact(ExtReal::from_f64(e.value))
            }),
        }
    }

    /// Checks admissibility on `carrier` without keeping the memo.
    pub fn validate(&self, carrier: &Carrier) -> ValidationReport {
        let (report, _) = self.tabulate(carrier);
        report
    }

    /// Validates against `carrier` and memoizes `f` at every point.
    pub fn bind(&self, carrier: &Carrier) -> Result<Binding> {
        let (report, values) = self.tabulate(carrier);
        if !report.passed {
            return Err(Error::Validation(Box::new(report)));
        }
        Ok(Binding {
            f: self.clone(),
            carrier: carrier.clone(),
            multiplicative: report.multiplicative == Multiplicativity::Holds,
            values,
        })
    }

    fn tabulate(&self, carrier: &Carrier) -> (ValidationReport, Vec<Approx>) {
        let mut values: Vec<Approx> = (0..carrier.size())
            .into_par_iter()
            .map(|i| self.point(carrier, i))
            .collect();

        let zero_anchored = values[0].value.is_zero();
        let mut strictly_increasing = true;
        let mut first: Option<Violation> = None;
        let mut violation = |index: usize, reason: String| {
            if first.as_ref().is_none_or(|v| index < v.index) {
                first = Some(Violation { index, reason });
            }
        };

        let top = carrier.top();
        let fmt_v = |i: usize| carrier.format_index(i);
        if !zero_anchored {
            violation(
                0,
                format!("f(0) = {} but must be exactly 0", values[0].value),
            );
        }
        for (i, a) in values.iter().enumerate() {
            if a.value.is_nan() {
                let reason = match &self.family {
                    Family::Table(_) => format!("no table entry for carrier value {}", fmt_v(i)),
                    _ => format!("f({}) is undefined", fmt_v(i)),
                };
                violation(i, reason);
                break;
            }
            if a.value.is_infinite() && i != top {
                violation(i, format!("f({}) = inf below the top element", fmt_v(i)));
                break;
            }
            if a.value < ExtReal::ZERO {
                violation(i, format!("f({}) is negative", fmt_v(i)));
                break;
            }
            if let Some(b) = values.get(i + 1) {
                if b.value.is_nan() {
                    continue;
                }
                if a.value.partial_cmp(&b.value) != Some(Ordering::Less) {
                    strictly_increasing = false;
                    let line = match &self.family {
                        Family::Table(t) => t
                            .lookup(carrier.value_of(i + 1))
                            .map(|e| format!(" (table line {})", e.line))
                            .unwrap_or_default(),
                        _ => String::new(),
                    };
                    violation(
                        i,
                        format!(
                            "not strictly increasing: f({}) = {} >= f({}) = {}{}",
                            fmt_v(i),
                            a.value,
                            fmt_v(i + 1),
                            b.value,
                            line
                        ),
                    );
                    break;
                }
            }
        }

        let mut report = ValidationReport {
            f: self.name.clone(),
            carrier: carrier.to_string(),
            passed: first.is_none(),
            strictly_increasing,
            zero_anchored,
            multiplicative: Multiplicativity::NotApplicable,
            first_violation: first,
        };
        if let Ok(one) = carrier.index_of(1.0) {
            let f1 = values[one].value;
            if (f1.to_f64() - 1.0).abs() <= UNIT_TOLERANCE {
                report.multiplicative = Multiplicativity::Holds;
                values[one] = Approx::exact(ExtReal::ONE);
            } else {
                report.multiplicative = Multiplicativity::Fails;
            }
        }
        (report, values)
    }
}

/// Whether an integer power stays exact in double-double.
fn exact_power(n: u128, p: f64) -> bool {
    if p.fract() != 0.0 || !(1.0..=64.0).contains(&p) {
        return false;
    }
    let bits = 128 - n.leading_zeros();
    (bits as f64) * p <= 100.0
}

/// `artanh(x / c)` with `x = num / den`, evaluated as
/// `ln_1p(2x / (c - x)) / 2` from exact integers.
fn atanh_rational(num: u128, den: u128, c: &Decimal) -> Approx {
    if num == 0 {
        return Approx::exact(ExtReal::ZERO);
    }
    // x / c = (num * 10^scale) / (den * mantissa)
    let p = num.checked_mul(c.denominator());
    let q = den.checked_mul(c.mantissa as u128);
    match (p, q) {
        (Some(p), Some(q)) => {
            if p > q {
                Approx::exact(ExtReal::NAN)
            } else if p == q {
                Approx::exact(ExtReal::INFINITY)
            } else {
                let ratio = (2 * p) as f64 / (q - p) as f64;
                Approx::inexact(0.5 * ratio.ln_1p())
            }
        }
        _ => {
            let x = num as f64 / den as f64;
            let c = c.to_f64();
            if x >= c {
                Approx::exact(if x == c {
                    ExtReal::INFINITY
                } else {
                    ExtReal::NAN
                })
            } else {
                Approx::inexact(0.5 * (2.0 * x / (c - x)).ln_1p())
            }
        }
    }
}

impl fmt::Display for FunctionalParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FromStr for FunctionalParameter {
    type Err = Error;

    /// `id`, `pow:<p>`, `exp2m1`, `quad`, `atanh:<c>`, `table:<path>`.
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (head, arg) = match spec.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (spec, None),
        };
        match (head, arg) {
            ("id", None) => Ok(Self::identity()),
            ("exp2m1", None) => Ok(Self::exp2m1()),
            ("quad", None) => Ok(Self::quad()),
            ("pow", Some(p)) => {
                let p: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::spec(spec, "exponent must be a number"))?;
                if !(p.is_finite() && p > 0.0) {
                    return Err(Error::spec(spec, "exponent must be positive"));
                }
                Ok(Self::new(spec, Family::Power(p)))
            }
            ("atanh", Some(c)) => {
                let c: Decimal = c.parse().map_err(|e: String| Error::spec(spec, e))?;
                if c.is_zero() {
                    return Err(Error::spec(spec, "scale must be positive"));
                }
                Ok(Self::new(spec, Family::Atanh(c)))
            }
            ("table", Some(path)) if !path.is_empty() => load_table(path),
            _ => Err(Error::spec(
                spec,
                "expected id, pow:<p>, exp2m1, quad, atanh:<c> or table:<path>",
            )),
        }
    }
}

/// Reads a table-backed parameter from a file of `<x> <f(x)>` lines.
pub fn load_table(path: impl AsRef<Path>) -> Result<FunctionalParameter> {
    let path = path.as_ref();
    let label = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::Table {
        path: label.clone(),
        line: 0,
        reason: e.to_string(),
    })?;
    let table = parse_table(&text, &label)?;
    Ok(FunctionalParameter::table(table))
}

/// Parses table text; `#` starts a comment. Keys and values must both be
/// strictly increasing in file order.
pub fn parse_table(text: &str, source: &str) -> Result<Table> {
    let err = |line: usize, reason: String| Error::Table {
        path: source.to_string(),
        line,
        reason,
    };
    let mut entries: Vec<TableEntry> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err(
                line,
                format!("expected two numbers, found {}", fields.len()),
            ));
        }
        let key: f64 = fields[0]
            .parse()
            .map_err(|_| err(line, format!("`{}` is not a number", fields[0])))?;
        let value: f64 = fields[1]
            .parse()
            .map_err(|_| err(line, format!("`{}` is not a number", fields[1])))?;
        if !key.is_finite() || key < 0.0 {
            return Err(err(
                line,
                format!("key {key} must be finite and non-negative"),
            ));
        }
        if value.is_nan() || value < 0.0 {
            return Err(err(line, format!("value {value} must be non-negative")));
        }
        if let Some(prev) = entries.last() {
            if key <= prev.key {
                return Err(err(
                    line,
                    format!("keys not increasing ({} then {key})", prev.key),
                ));
            }
            if value <= prev.value {
                return Err(err(
                    line,
                    format!(
                        "not monotone: f({}) = {} then f({key}) = {value}",
                        prev.key, prev.value
                    ),
                ));
            }
        }
        entries.push(TableEntry { key, value, line });
    }
    if entries.is_empty() {
        return Err(err(1, "table is empty".into()));
    }
    Ok(Table {
        source: source.to_string(),
        entries,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Multiplicativity {
    Holds,
    Fails,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub index: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub f: String,
    pub carrier: String,
    pub passed: bool,
    pub strictly_increasing: bool,
    pub zero_anchored: bool,
    pub multiplicative: Multiplicativity,
    pub first_violation: Option<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}: ", self.f, self.carrier)?;
        match &self.first_violation {
            None => write!(f, "ok"),
            Some(v) => write!(f, "fails at index {}: {}", v.index, v.reason),
        }
    }
}

/// A validated parameter memoized over one carrier.
#[derive(Clone, Debug)]
pub struct Binding {
    f: FunctionalParameter,
    carrier: Carrier,
    values: Vec<Approx>,
    multiplicative: bool,
}

impl Binding {
    pub fn parameter(&self) -> &FunctionalParameter {
        &self.f
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn multiplicative(&self) -> bool {
        self.multiplicative
    }

    pub fn values(&self) -> &[Approx] {
        &self.values
    }

    #[inline]
    pub fn at(&self, i: usize) -> Approx {
        self.values[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn carrier(s: &str) -> Carrier {
        s.parse().unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(FunctionalParameter::power(2.0).evaluate(5.0).to_f64(), 25.0);
        assert_eq!(FunctionalParameter::exp2m1().evaluate(5.0).to_f64(), 31.0);
        let atanh: FunctionalParameter = "atanh:1".parse().unwrap();
        assert!(atanh.evaluate(1.0).is_infinite());
        assert!(atanh.evaluate(0.0).is_zero());
        assert_eq!(FunctionalParameter::quad().evaluate(4.0).to_f64(), 10.0);
    }

    #[test]
    fn evaluate_is_deterministic() {
        let f: FunctionalParameter = "pow:1.5".parse().unwrap();
        for v in [0.0, 0.25, 3.0, 17.5, 1e6] {
            assert_eq!(f.evaluate(v).hi().to_bits(), f.evaluate(v).hi().to_bits());
        }
    }

    #[test]
    fn identity_is_exact_on_integers() {
        let c = carrier("int:0:1000");
        let b = FunctionalParameter::identity().bind(&c).unwrap();
        for (i, a) in b.values().iter().enumerate() {
            assert_eq!(a.value, ExtReal::from_u64(i as u64));
            assert_eq!(a.radius, 0.0);
        }
    }

    #[test]
    fn validate_identity() {
        let r = FunctionalParameter::identity().validate(&carrier("int:0:100"));
        assert!(r.passed);
        assert_eq!(r.multiplicative, Multiplicativity::Holds);
    }

    #[test]
    fn validate_atanh_on_grid() {
        let f: FunctionalParameter = "atanh:1".parse().unwrap();
        let c = carrier("grid:0:1:0.001");
        let r = f.validate(&c);
        assert!(r.passed, "{r}");
        assert_eq!(r.multiplicative, Multiplicativity::Fails);
        let b = f.bind(&c).unwrap();
        assert!(b.at(c.top()).value.is_infinite());
        assert!(b.at(c.top() - 1).value.is_finite());
    }

    #[test]
    fn validate_rejects_flat_table() {
        let t = Table::from_pairs(
            "t",
            &[(0., 0.), (1., 1.), (2., 2.), (3., 5.), (4., 5.), (5., 9.)],
        );
        let r = FunctionalParameter::table(t).validate(&carrier("int:0:5"));
        assert!(!r.passed);
        assert!(!r.strictly_increasing);
        assert_eq!(r.first_violation.unwrap().index, 3);
    }

    #[test]
    fn validate_rejects_missing_points_and_nonzero_anchor() {
        let t = Table::from_pairs("t", &[(0., 0.), (1., 1.), (3., 5.)]);
        let r = FunctionalParameter::table(t).validate(&carrier("int:0:3"));
        assert_eq!(r.first_violation.unwrap().index, 2);

        let t = Table::from_pairs("t", &[(0., 0.5), (1., 1.), (2., 5.)]);
        let r = FunctionalParameter::table(t).validate(&carrier("int:0:2"));
        assert!(!r.zero_anchored);
        assert_eq!(r.first_violation.unwrap().index, 0);
    }

    #[test]
    fn atanh_beyond_its_pole_is_rejected() {
        let f: FunctionalParameter = "atanh:1".parse().unwrap();
        let r = f.validate(&carrier("grid:0:2:0.5"));
        assert!(!r.passed);
    }

    #[test]
    fn exp2m1_overflows_past_1023() {
        let r = FunctionalParameter::exp2m1().validate(&carrier("int:0:1100"));
        assert!(!r.passed);
        assert_eq!(r.first_violation.unwrap().index, 1024);
    }

    #[test]
    fn parse_table_examples() {
        let t = parse_table("0 0\n1 1\n2 3\n3 6", "tri").unwrap();
        let f = FunctionalParameter::table(t);
        let b = f.bind(&carrier("int:0:3")).unwrap();
        for i in 0..=3u64 {
            assert_eq!(b.at(i as usize).value.to_f64(), ((i + i * i) / 2) as f64);
        }
        assert!(b.multiplicative());

        assert!(matches!(
            parse_table("", "e"),
            Err(Error::Table { line: 1, .. })
        ));
        assert!(matches!(
            parse_table("2 3\n3 2", "m"),
            Err(Error::Table { line: 2, .. })
        ));
        assert!(matches!(
            parse_table("# header\n0 0\n1 x", "bad"),
            Err(Error::Table { line: 3, .. })
        ));
    }

    #[test]
    fn spec_syntax() {
        for s in ["id", "pow:1.5", "exp2m1", "quad", "atanh:1"] {
            let f: FunctionalParameter = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("pow:-1".parse::<FunctionalParameter>().is_err());
        assert!("pow".parse::<FunctionalParameter>().is_err());
        assert!("sin".parse::<FunctionalParameter>().is_err());
        assert!(matches!(
            "table:/nonexistent/file.tbl".parse::<FunctionalParameter>(),
            Err(Error::Table { .. })
        ));
    }
}
