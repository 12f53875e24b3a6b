//! Narrated scenarios. Every printed equality is computed when the demo
//! runs; the expected values below only decide whether a check holds.

use clap::ValueEnum;
use nda_core::exprlang::{eval_str, EvalError, EvalResult};
use nda_core::{Arithmetic, Error};
use serde_json::json;

use crate::output::Format;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    Heap,
    Payphone,
    Bogo,
    Cans,
    Lightspeed,
}

impl Demo {
    pub const ALL: [Demo; 5] = [
        Demo::Heap,
        Demo::Payphone,
        Demo::Bogo,
        Demo::Cans,
        Demo::Lightspeed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Demo::Heap => "heap",
            Demo::Payphone => "payphone",
            Demo::Bogo => "bogo",
            Demo::Cans => "cans",
            Demo::Lightspeed => "lightspeed",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub claim: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transcript {
    pub demo: Demo,
    /// `None` for scenarios that use raw data instead of an arithmetic.
    pub arith: Option<String>,
    pub story: &'static str,
    pub checks: Vec<Check>,
}

impl Transcript {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "demo": self.demo.name(),
                        "arith": self.arith,
                        "claim": c.claim,
                        "holds": c.holds,
                    })
                    .to_string()
                        + "\n"
                })
                .collect(),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["demo", "arith", "claim", "holds"])
                    .expect("in-memory write");
                for c in &self.checks {
                    w.write_record([
                        self.demo.name(),
                        self.arith.as_deref().unwrap_or(""),
                        &c.claim,
                        if c.holds { "true" } else { "false" },
                    ])
                    .expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
            }
            Format::Table => {
                let mut s = format!("== {} ==\n{}\n", self.demo.name(), self.story);
                if let Some(a) = &self.arith {
                    s.push_str(&format!("arithmetic: {a}\n"));
                }
                for c in &self.checks {
                    let mark = if c.holds { "ok" } else { "MISMATCH" };
                    s.push_str(&format!("  {}  [{mark}]\n", c.claim));
                }
                s
            }
        }
    }
}

fn arith(spec: &str) -> Result<Arithmetic, Error> {
    spec.parse()
}

/// Evaluates `a + b + ...` and renders it with the operands exactly as
/// written, e.g. `5 (+) 5 = 5`.
fn sum_claim(ar: &Arithmetic, operands: &[&str], expected: f64) -> Result<Check, Error> {
    let result = eval_str(&operands.join(" + "), ar).map_err(|e| match e {
        EvalError::Arith(e) => e,
        EvalError::Syntax(e) => Error::InvalidArgument(e.to_string()),
    })?;
    let EvalResult::Value { value, text } = result else {
        unreachable!("a sum is a value")
    };
    Ok(Check {
        claim: format!("{} = {text}", operands.join(" (+) ")),
        holds: ar.index(value)? == ar.index(expected)?,
    })
}

pub fn run(demo: Demo) -> Result<Transcript, Error> {
    match demo {
        Demo::Heap => heap(),
        Demo::Payphone => payphone(),
        Demo::Bogo => bogo(),
        Demo::Cans => Ok(cans()),
        Demo::Lightspeed => lightspeed(),
    }
}

fn heap() -> Result<Transcript, Error> {
    let spec = "projective:exp2m1@int:0:100";
    let ar = arith(spec)?;
    let mut checks = vec![sum_claim(&ar, &["10", "1"], 10.0)?];
    let k = ar.index(10.0)?;
    let one = ar.index(1.0)?;
    let mut s = k;
    for _ in 0..1000 {
        s = ar.add_idx(s, one)?;
    }
    checks.push(Check {
        claim: format!("10 (+) 1 (+) 1 ... (1000 grains) = {}", ar.format(s)),
        holds: s == k,
    });
    Ok(Transcript {
        demo: Demo::Heap,
        arith: Some(spec.into()),
        story: "A heap of sand is still the same heap after one more grain. \
                Adding 1 to K leaves K unchanged here, however often it is repeated.",
        checks,
    })
}

fn payphone() -> Result<Transcript, Error> {
    let spec = "projective:exp2m1@int:0:100";
    let ar = arith(spec)?;
    let total = ar.nsum(1.0, 1000)?;
    let five = ar.index(5.0)?;
    let one = ar.index(1.0)?;
    let mut s = one;
    let mut reached_five = s == five;
    for _ in 1..1000 {
        s = ar.add_idx(s, one)?;
        reached_five |= s == five;
    }
    Ok(Transcript {
        demo: Demo::Payphone,
        arith: Some(spec.into()),
        story: "A call costs 5 and coins of 1 go in one after another. \
                The running total never gets past the first coin.",
        checks: vec![
            Check {
                claim: format!(
                    "nsum(1, 1000) = 1 (+) 1 (+) ... (+) 1 = {}",
                    ar.format(ar.index(total)?)
                ),
                holds: total == 1.0,
            },
            Check {
                claim: format!("partial sums of 1s reach 5 within 1000 terms: {reached_five}"),
                holds: !reached_five,
            },
        ],
    })
}

fn bogo() -> Result<Transcript, Error> {
    let spec = "projective:exp2m1@int:0:100";
    let ar = arith(spec)?;
    Ok(Transcript {
        demo: Demo::Bogo,
        arith: Some(spec.into()),
        story: "Buy one, get one free: two items at 5 cost 5 in total.",
        checks: vec![sum_claim(&ar, &["5", "5"], 5.0)?],
    })
}

/// Prices in cents by number of cans.
const TARIFF: [(u32, u64); 2] = [(1, 105), (2, 200)];

fn cents(c: u64) -> String {
    format!("{}.{:02}", c / 100, c % 100)
}

fn cans() -> Transcript {
    let price = |n: u32| TARIFF.iter().find(|t| t.0 == n).map(|t| t.1).unwrap_or(0);
    let a = price(1);
    let two_a = price(2);
    let sum = a + a;
    Transcript {
        demo: Demo::Cans,
        arith: None,
        story: "One can costs 1.05 and a pack of two costs 2.00. \
                The tariff is raw price data, so no functional parameter is claimed.",
        checks: vec![
            Check {
                claim: format!(
                    "price(1) + price(1) = {} != {} = price(2)",
                    cents(sum),
                    cents(two_a)
                ),
                holds: sum != two_a,
            },
            Check {
                claim: format!(
                    "a + a != 2a with a = {}: {}",
                    cents(a),
                    if sum != two_a { "yes" } else { "no" }
                ),
                holds: sum != two_a,
            },
        ],
    }
}

fn lightspeed() -> Result<Transcript, Error> {
    let spec = "projective:atanh:1@grid:0:1:0.001";
    let ar = arith(spec)?;
    let mut checks = vec![sum_claim(&ar, &["0.5", "0.5"], 0.8)?];

    // Relativistic velocity addition as an independent cross-check.
    let (u, v) = (0.5, 0.5);
    let closed = (u + v) / (1.0 + u * v);
    let grid = ar.add(u, v)?;
    checks.push(Check {
        claim: format!(
            "(u + v) / (1 + uv) at u = v = 0.5 gives {}",
            ar.carrier().format_value(ar.carrier().clamp(closed))
        ),
        holds: ar.index(grid)? == ar.index(ar.carrier().clamp(closed))?,
    });

    checks.push(sum_claim(&ar, &["1.000", "0.600"], 1.0)?);
    let c = ar.top();
    let absorbed = (0..=ar.top())
        .filter(|&v| matches!(ar.add_idx(c, v), Ok(s) if s == c))
        .count();
    checks.push(Check {
        claim: format!(
            "{} (+) v = {} for {absorbed} of {} grid values v",
            ar.format(c),
            ar.format(c),
            ar.carrier().size()
        ),
        holds: absorbed == ar.carrier().size(),
    });
    Ok(Transcript {
        demo: Demo::Lightspeed,
        arith: Some(spec.into()),
        story: "Speeds as fractions of c combine by the relativistic rule. \
                Adding any speed to c gives c again.",
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_demo_passes() {
        for d in Demo::ALL {
            let t = run(d).unwrap();
            assert!(t.passed(), "{t:?}");
        }
    }

    #[test]
    fn headline_lines() {
        let table = |d| run(d).unwrap().render(Format::Table);
        assert!(table(Demo::Lightspeed).contains("0.5 (+) 0.5 = 0.800"));
        assert!(table(Demo::Lightspeed).contains("1.000 (+) 0.600 = 1.000"));
        assert!(table(Demo::Bogo).contains("5 (+) 5 = 5"));
        assert!(table(Demo::Heap).contains("10 (+) 1 = 10"));
        assert!(table(Demo::Cans).contains("2.10 != 2.00"));
    }
}
