//! Projective and dual arithmetics.
//!
//! Both families compute `a (+) b` by forming the target `t = f(a) + f(b)` and
//! pulling it back onto the carrier through the memoized, strictly increasing
//! values of `f`:
//!
//! * projective: the greatest `v` with `f(v) <= t`, saturating at the top;
//! * dual: the least `v` with `f(v) >= t`, or `CarrierExhausted` when no point
//!   is large enough (unless the arithmetic was built to saturate).
//!
//! Multiplication and the clamped subtraction use the same pull-back with
//! `t = f(a) * f(b)` and `t = max(f(a) - f(b), 0)`. The pull-back is a binary
//! search over the memo; `f` is never inverted numerically. A memo value and a
//! target are treated as equal when they differ by less than their combined
//! error radii, which is zero for exactly computed parameters.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::carrier::Carrier;
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::funcparam::{Approx, Binding, FunctionalParameter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Projective,
    Dual,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Projective => "projective",
            Kind::Dual => "dual",
        })
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "projective" => Ok(Kind::Projective),
            "dual" => Ok(Kind::Dual),
            other => Err(Error::spec(other, "kind must be `projective` or `dual`")),
        }
    }
}

/// What a dual arithmetic does when a result falls past the top element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Overflow {
    Saturate,
    Error,
}

impl FromStr for Overflow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "saturate" => Ok(Overflow::Saturate),
            "error" => Ok(Overflow::Error),
            other => Err(Error::spec(other, "overflow must be `saturate` or `error`")),
        }
    }
}

/// The pulled-back quantity of one operation.
#[derive(Clone, Copy, Debug)]
struct Target {
    value: ExtReal,
    radius: f64,
}

impl Target {
    fn sum(a: Approx, b: Approx) -> Self {
        Target {
            value: a.value + b.value,
            radius: a.radius + b.radius,
        }
    }

    fn product(a: Approx, b: Approx) -> Self {
        if a.value.is_zero() || b.value.is_zero() {
            return Target {
                value: ExtReal::ZERO,
                radius: 0.0,
            };
        }
        let (x, y) = (a.value.to_f64().abs(), b.value.to_f64().abs());
        Target {
            value: a.value * b.value,
            radius: x * b.radius + y * a.radius + a.radius * b.radius,
        }
    }

    fn difference(a: Approx, b: Approx) -> Self {
        Target {
            value: a.value - b.value,
            radius: a.radius + b.radius,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Arithmetic {
    kind: Kind,
    overflow: Overflow,
    binding: Arc<Binding>,
    one: Option<usize>,
}

impl Arithmetic {
    /// Validates `f` on `carrier` and builds the arithmetic. Projective
    /// arithmetics saturate; dual ones report exhaustion by default.
    pub fn new(kind: Kind, f: &FunctionalParameter, carrier: &Carrier) -> Result<Self> {
        let binding = f.bind(carrier)?;
        Ok(Self::from_binding(kind, Arc::new(binding)))
    }

    pub fn from_binding(kind: Kind, binding: Arc<Binding>) -> Self {
        let one = if binding.multiplicative() {
            binding.carrier().index_of(1.0).ok()
        } else {
            None
        };
        Arithmetic {
            kind,
            overflow: match kind {
                Kind::Projective => Overflow::Saturate,
                Kind::Dual => Overflow::Error,
            },
            binding,
            one,
        }
    }

    /// Sets the overflow policy. Projective arithmetics always saturate.
    pub fn with_overflow(mut self, overflow: Overflow) -> Result<Self> {
        if self.kind == Kind::Projective && overflow == Overflow::Error {
            return Err(Error::InvalidArgument(
                "projective arithmetics always saturate".into(),
            ));
        }
        self.overflow = overflow;
        Ok(self)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn overflow(&self) -> Overflow {
        self.overflow
    }

    pub fn carrier(&self) -> &Carrier {
        self.binding.carrier()
    }

    pub fn parameter(&self) -> &FunctionalParameter {
        self.binding.parameter()
    }

    pub fn binding(&self) -> &Arc<Binding> {
        &self.binding
    }

    pub fn multiplicative(&self) -> bool {
        self.binding.multiplicative()
    }

    pub fn top(&self) -> usize {
        self.carrier().top()
    }

    /// Memoized `f` at point `i`.
    pub fn f_at(&self, i: usize) -> ExtReal {
        self.binding.at(i).value
    }

    pub fn value(&self, i: usize) -> f64 {
        self.carrier().value_of(i)
    }

    pub fn index(&self, v: f64) -> Result<usize> {
        self.carrier().index_of(v)
    }

    pub fn format(&self, i: usize) -> String {
        self.carrier().format_index(i)
    }

    fn check(&self, i: usize) -> Result<()> {
        if i > self.top() {
            return Err(Error::IndexOutOfRange {
                index: i,
                size: self.carrier().size(),
            });
        }
        Ok(())
    }

    /// Orders `f(v)` against the target, with ties inside the error radii.
    #[inline]
    fn compare(&self, v: usize, t: &Target) -> Ordering {
        let fv = self.binding.at(v);
        match (fv.value.is_infinite(), t.value.is_infinite()) {
            (true, true) => return Ordering::Equal,
            (false, true) => return Ordering::Less,
            (true, false) => return Ordering::Greater,
            _ => {}
        }
        let diff = (fv.value - t.value).to_f64();
        if diff.abs() <= fv.radius + t.radius {
            Ordering::Equal
        } else if diff < 0.0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    /// First index in `lo..=hi` where `pred` turns false (`hi + 1` if never).
    fn partition(&self, lo: usize, hi: usize, pred: impl Fn(usize) -> bool) -> usize {
        let (mut lo, mut hi) = (lo, hi + 1);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if pred(mid) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Pulls the target back onto `lo..=hi`, where `lo` is known to be a
    /// lower bound for the result.
    fn round(&self, t: Target, lo: usize, hi: usize) -> Result<usize> {
        match self.kind {
            Kind::Projective => {
                let first_above =
                    self.partition(lo, hi, |v| self.compare(v, &t) != Ordering::Greater);
                Ok(first_above.saturating_sub(1).max(lo))
            }
            Kind::Dual => {
                if lo > hi {
                    return self.exhausted();
                }
                let first = self.partition(lo, hi, |v| self.compare(v, &t) == Ordering::Less);
                if first > hi {
                    self.exhausted()
                } else {
                    Ok(first)
                }
            }
        }
    }

    fn exhausted(&self) -> Result<usize> {
        match self.overflow {
            Overflow::Saturate => Ok(self.top()),
            Overflow::Error => Err(Error::CarrierExhausted),
        }
    }

    pub fn add_idx(&self, a: usize, b: usize) -> Result<usize> {
        self.check(a)?;
        self.check(b)?;
        let t = Target::sum(self.binding.at(a), self.binding.at(b));
        // f(0) = 0 and f is strictly increasing, so the result is at least
        // max(a, b), and strictly above it for a dual sum of positive terms.
        let mut lo = a.max(b);
        if self.kind == Kind::Dual && a.min(b) > 0 {
            lo += 1;
        }
        self.round(t, lo, self.top())
    }

    pub fn mul_idx(&self, a: usize, b: usize) -> Result<usize> {
        self.check(a)?;
        self.check(b)?;
        let one = self.one.ok_or(Error::MultiplicationUnavailable)?;
        if a == 0 || b == 0 {
            return Ok(0);
        }
        let t = Target::product(self.binding.at(a), self.binding.at(b));
        let mut lo = 0;
        if a >= one && b >= one {
            lo = a.max(b);
            if self.kind == Kind::Dual && a.min(b) > one {
                lo += 1;
            }
        }
        self.round(t, lo, self.top())
    }

    /// Clamped subtraction `max(f(a) - f(b), 0)` pulled back like addition.
    pub fn sub_idx(&self, a: usize, b: usize) -> Result<usize> {
        self.check(a)?;
        self.check(b)?;
        if b >= a {
            return Ok(0);
        }
        if b == 0 {
            return Ok(a);
        }
        let t = Target::difference(self.binding.at(a), self.binding.at(b));
        let hi = match self.kind {
            Kind::Projective => a - 1,
            Kind::Dual => a,
        };
        self.round(t, 0, hi)
    }

    /// `m (+) m (+) ... (+) m` with `k` terms, folded left to right.
    pub fn nsum_idx(&self, m: usize, k: u64) -> Result<usize> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "nsum needs at least one term".into(),
            ));
        }
        self.check(m)?;
        let mut s = m;
        for _ in 1..k {
            let next = self.add_idx(s, m)?;
            if next == s {
                break;
            }
            s = next;
        }
        Ok(s)
    }

    /// `a << b`: adding `a` leaves `b` unchanged.
    pub fn mll_idx(&self, a: usize, b: usize) -> Result<bool> {
        match self.add_idx(b, a) {
            Ok(s) => Ok(s == b),
            Err(Error::CarrierExhausted) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Dual `a << b`: adding `a` moves `b` only to its successor.
    pub fn mll_dual_idx(&self, a: usize, b: usize) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        if b == self.top() {
            return Err(Error::SuccessorOfTop);
        }
        match self.add_idx(b, a) {
            Ok(s) => Ok(s == b + 1),
            Err(Error::CarrierExhausted) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// `a <<< b`: multiplying by `a` leaves `b` unchanged.
    pub fn mlll_idx(&self, a: usize, b: usize) -> Result<bool> {
        match self.mul_idx(b, a) {
            Ok(p) => Ok(p == b),
            Err(Error::CarrierExhausted) => Ok(false),
            Err(e) => Err(e),
        }
    }

    fn lift(&self, a: f64, b: f64, op: impl Fn(usize, usize) -> Result<usize>) -> Result<f64> {
        let r = op(self.index(a)?, self.index(b)?)?;
        Ok(self.value(r))
    }

    pub fn add(&self, a: f64, b: f64) -> Result<f64> {
        self.lift(a, b, |a, b| self.add_idx(a, b))
    }

    pub fn mul(&self, a: f64, b: f64) -> Result<f64> {
        self.lift(a, b, |a, b| self.mul_idx(a, b))
    }

    pub fn sub(&self, a: f64, b: f64) -> Result<f64> {
        self.lift(a, b, |a, b| self.sub_idx(a, b))
    }

    pub fn nsum(&self, m: f64, k: u64) -> Result<f64> {
        let r = self.nsum_idx(self.index(m)?, k)?;
        Ok(self.value(r))
    }

    pub fn mll(&self, a: f64, b: f64) -> Result<bool> {
        self.mll_idx(self.index(a)?, self.index(b)?)
    }

    pub fn mll_dual(&self, a: f64, b: f64) -> Result<bool> {
        self.mll_dual_idx(self.index(a)?, self.index(b)?)
    }

    pub fn mlll(&self, a: f64, b: f64) -> Result<bool> {
        self.mlll_idx(self.index(a)?, self.index(b)?)
    }
}

impl fmt::Display for Arithmetic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}@{}", self.kind, self.parameter(), self.carrier())
    }
}

impl FromStr for Arithmetic {
    type Err = Error;

    /// `<kind>:<f-spec>@<carrier-spec>`, e.g. `projective:pow:1.5@int:0:1000`.
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::spec(spec, "expected `<kind>:<f-spec>@<carrier-spec>`"))?;
        let (f, carrier) = rest
            .rsplit_once('@')
            .ok_or_else(|| Error::spec(spec, "missing `@<carrier-spec>`"))?;
        let kind: Kind = kind.parse()?;
        let carrier: Carrier = carrier.parse()?;
        let f: FunctionalParameter = f.parse()?;
        Arithmetic::new(kind, &f, &carrier)
    }
}
