//! Series: partial sums inside an arithmetic, and budget-relative
//! ("practical") convergence of real sequences.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use statrs::function::factorial::ln_factorial;

use crate::arith::Arithmetic;
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 50;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Sequences are indexed from `n = 1`.
#[derive(Clone, Debug, PartialEq)]
pub enum SequenceSpec {
    Constant(f64),
    /// `r^n / n!`
    PowFact(f64),
    /// `n! / r^n`
    FactPow(f64),
    List(Vec<f64>),
}

impl SequenceSpec {
    /// Number of terms available, `None` when unbounded.
    pub fn term_count(&self) -> Option<usize> {
        match self {
            SequenceSpec::List(v) => Some(v.len()),
            _ => None,
        }
    }

    /// Natural log of `|t_n|`; `-inf` for a zero term.
    pub fn log_term(&self, n: u64) -> f64 {
        match self {
            SequenceSpec::Constant(c) => c.abs().ln(),
            SequenceSpec::PowFact(r) => n as f64 * r.ln() - ln_factorial(n),
            SequenceSpec::FactPow(r) => ln_factorial(n) - n as f64 * r.ln(),
            SequenceSpec::List(v) => v.get(n as usize - 1).map_or(f64::NAN, |x| x.abs().ln()),
        }
    }

    /// The term itself; may overflow to `inf` for the factorial families.
    pub fn term(&self, n: u64) -> f64 {
        match self {
            SequenceSpec::Constant(c) => *c,
            SequenceSpec::List(v) => v.get(n as usize - 1).copied().unwrap_or(f64::NAN),
            _ => self.log_term(n).exp(),
        }
    }
}

impl FromStr for SequenceSpec {
    type Err = Error;

    /// `const:<c>`, `powfact:<r>`, `factpow:<r>`, `list:<v1,v2,...>`.
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (head, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::spec(spec, "expected `<family>:<argument>`"))?;
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::spec(spec, format!("`{s}` is not a finite number")))
        };
        let positive = |s: &str| -> Result<f64> {
            let r = num(s)?;
            if r > 0.0 {
                Ok(r)
            } else {
                Err(Error::spec(spec, "ratio must be positive"))
            }
        };
        match head {
            "const" => Ok(SequenceSpec::Constant(num(arg)?)),
            "powfact" => Ok(SequenceSpec::PowFact(positive(arg)?)),
            "factpow" => Ok(SequenceSpec::FactPow(positive(arg)?)),
            "list" => {
                let values = arg.split(',').map(num).collect::<Result<Vec<_>>>()?;
                if values.is_empty() {
                    return Err(Error::spec(spec, "empty list"));
                }
                Ok(SequenceSpec::List(values))
            }
            _ => Err(Error::spec(
                spec,
                "expected const, powfact, factpow or list",
            )),
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::Constant(c) => write!(f, "const:{c}"),
            SequenceSpec::PowFact(r) => write!(f, "powfact:{r}"),
            SequenceSpec::FactPow(r) => write!(f, "factpow:{r}"),
            SequenceSpec::List(v) => {
                let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "list:{}", items.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialSums {
    pub sums: Vec<f64>,
    /// 1-based `k` after which the sums never change again.
    pub stationary_at: Option<usize>,
}

/// Left-fold partial sums `s_1 = t_1`, `s_{k+1} = s_k (+) t_{k+1}`.
pub fn arith_partial_sums(ar: &Arithmetic, seq: &SequenceSpec, n: usize) -> Result<PartialSums> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one term".into()));
    }
    if let Some(len) = seq.term_count() {
        if n > len {
            return Err(Error::InvalidArgument(format!(
                "sequence has {len} terms, {n} requested"
            )));
        }
    }
    let mut sums = Vec::with_capacity(n);
    let mut s = ar.index(seq.term(1))?;
    sums.push(s);
    for k in 2..=n as u64 {
        let t = ar.index(seq.term(k))?;
        s = ar.add_idx(s, t)?;
        sums.push(s);
    }
    // least k < n with s_j = s_k for every j > k
    let last = sums[n - 1];
    let stationary_at = if n >= 2 && sums[n - 2] == last {
        let mut k = n - 1;
        while k > 1 && sums[k - 2] == last {
            k -= 1;
        }
        Some(k)
    } else {
        None
    };
    Ok(PartialSums {
        sums: sums.into_iter().map(|i| ar.value(i)).collect(),
        stationary_at,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    PracticallyConvergent,
    PracticallyDivergent,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::PracticallyConvergent => "practically-convergent",
            Verdict::PracticallyDivergent => "practically-divergent",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A term magnitude as `mantissa * 10^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Magnitude {
    pub mantissa: f64,
    pub exponent: i64,
}

impl Magnitude {
    pub fn from_ln(ln: f64) -> Self {
        if !ln.is_finite() {
            return Magnitude {
                mantissa: if ln > 0.0 { f64::INFINITY } else { 0.0 },
                exponent: 0,
            };
        }
        let log10 = ln / std::f64::consts::LN_10;
        let exponent = log10.floor();
        Magnitude {
            mantissa: 10f64.powf(log10 - exponent),
            exponent: exponent as i64,
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}e{}", self.mantissa, self.exponent)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendEvidence {
    pub first_term: usize,
    pub last_term: usize,
    /// Smallest and largest per-step change of `ln |t_n|` in the window.
    pub min_step: f64,
    pub max_step: f64,
    pub last_magnitude: Magnitude,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceVerdict {
    pub verdict: Verdict,
    pub budget: usize,
    pub window: usize,
    pub tolerance: f64,
    pub evidence: TrendEvidence,
}

/// Classifies a sequence by the trend of its last `window` terms within a
/// budget of `budget` terms. Every step must move `ln |t_n|` by more than
/// `tol * max(1, |ln t_n|)` in one direction for a decisive verdict.
pub fn practical_convergence(
    seq: &SequenceSpec,
    budget: usize,
    window: usize,
    tol: f64,
) -> Result<ConvergenceVerdict> {
    if window < 2 || budget < window {
        return Err(Error::InvalidArgument(format!(
            "need budget >= window >= 2 (budget {budget}, window {window})"
        )));
    }
    if let Some(len) = seq.term_count() {
        if budget > len {
            return Err(Error::InvalidArgument(format!(
                "sequence has {len} terms, budget is {budget}"
            )));
        }
    }
    let first = budget - window + 1;
    let logs: Vec<f64> = (first..=budget).map(|n| seq.log_term(n as u64)).collect();
    let mut up = true;
    let mut down = true;
    let mut min_step = f64::INFINITY;
    let mut max_step = f64::NEG_INFINITY;
    for w in logs.windows(2) {
        let step = w[1] - w[0];
        let threshold = tol * w[0].abs().max(1.0);
        if step.is_nan() {
            up = false;
            down = false;
            continue;
        }
        min_step = min_step.min(step);
        max_step = max_step.max(step);
        up &= step > threshold;
        down &= step < -threshold;
    }
    let verdict = match (up, down) {
        (true, _) => Verdict::PracticallyDivergent,
        (_, true) => Verdict::PracticallyConvergent,
        _ => Verdict::Inconclusive,
    };
    Ok(ConvergenceVerdict {
        verdict,
        budget,
        window,
        tolerance: tol,
        evidence: TrendEvidence {
            first_term: first,
            last_term: budget,
            min_step,
            max_step,
            last_magnitude: Magnitude::from_ln(logs[logs.len() - 1]),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(spec: &str, k: usize) -> Verdict {
        let seq: SequenceSpec = spec.parse().unwrap();
        practical_convergence(&seq, k, DEFAULT_WINDOW, DEFAULT_TOLERANCE)
            .unwrap()
            .verdict
    }

    #[test]
    fn astronomer_and_mathematician() {
        assert_eq!(verdict("powfact:1000", 100), Verdict::PracticallyDivergent);
        assert_eq!(verdict("factpow:1000", 100), Verdict::PracticallyConvergent);
        assert_eq!(
            verdict("powfact:1000", 5000),
            Verdict::PracticallyConvergent
        );
        assert_eq!(verdict("factpow:1000", 5000), Verdict::PracticallyDivergent);
    }

    #[test]
    fn window_straddling_the_peak_is_inconclusive() {
        assert_eq!(verdict("powfact:1000", 1020), Verdict::Inconclusive);
        assert_eq!(verdict("const:3", 60), Verdict::Inconclusive);
    }

    #[test]
    fn rejects_bad_windows() {
        let seq = SequenceSpec::Constant(1.0);
        assert!(practical_convergence(&seq, 10, 1, 1e-12).is_err());
        assert!(practical_convergence(&seq, 10, 20, 1e-12).is_err());
    }

    #[test]
    fn log_terms_match_direct_evaluation() {
        let seq = SequenceSpec::PowFact(10.0);
        // 10^5 / 5! = 833.33...
        assert!((seq.term(5) - 100000.0 / 120.0).abs() < 1e-9);
        let seq = SequenceSpec::FactPow(2.0);
        assert!((seq.term(4) - 24.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn magnitude_formatting() {
        let m = Magnitude::from_ln(1234.5f64.ln());
        assert_eq!(m.exponent, 3);
        assert!((m.mantissa - 1.2345).abs() < 1e-12);
    }

    #[test]
    fn sequence_syntax() {
        for s in ["const:1", "powfact:1000", "factpow:1000", "list:2,2,2,2"] {
            assert_eq!(s.parse::<SequenceSpec>().unwrap().to_string(), s);
        }
        assert!("powfact:-1".parse::<SequenceSpec>().is_err());
        assert!("list:".parse::<SequenceSpec>().is_err());
        assert!("geom:2".parse::<SequenceSpec>().is_err());
    }

    #[test]
    fn partial_sum_examples() {
        let e: Arithmetic = "projective:exp2m1@int:0:100".parse().unwrap();
        let ps = arith_partial_sums(&e, &SequenceSpec::Constant(1.0), 1000).unwrap();
        assert!(ps.sums.iter().all(|&s| s == 1.0));
        assert_eq!(ps.stationary_at, Some(1));

        let id: Arithmetic = "projective:id@int:0:1000000".parse().unwrap();
        let ps = arith_partial_sums(&id, &SequenceSpec::Constant(1.0), 100).unwrap();
        assert_eq!(ps.sums, (1..=100).map(f64::from).collect::<Vec<_>>());
        assert_eq!(ps.stationary_at, None);

        let p2: Arithmetic = "projective:pow:2@int:0:100".parse().unwrap();
        let ps = arith_partial_sums(&p2, &"list:2,2,2,2".parse().unwrap(), 4).unwrap();
        assert_eq!(ps.sums, vec![2.0; 4]);
        assert_eq!(ps.stationary_at, Some(1));
    }

    #[test]
    fn partial_sum_errors() {
        let d: Arithmetic = "dual:id@int:0:10".parse().unwrap();
        assert_eq!(
            arith_partial_sums(&d, &SequenceSpec::Constant(4.0), 5),
            Err(Error::CarrierExhausted)
        );
        assert!(matches!(
            arith_partial_sums(&d, &SequenceSpec::Constant(0.5), 2),
            Err(Error::OffCarrier { .. })
        ));
        assert!(arith_partial_sums(&d, &"list:1,2".parse().unwrap(), 3).is_err());
    }
}
