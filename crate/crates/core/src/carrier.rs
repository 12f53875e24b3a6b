//! Finite ordered carriers: `int:0:<max>` and `grid:0:<max>:<step>`.
//!
//! A carrier is stored as a point count and an exact decimal step. Values are
//! derived from indices on demand (`i * step`), never accumulated.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Upper bound on the number of carrier points. Every arithmetic memoizes f
/// at each point, so this caps memory at a few hundred MiB.
pub const MAX_POINTS: usize = 1 << 24;

/// Relative tolerance for recognizing a value as a grid point.
pub const GRID_TOLERANCE: f64 = 1e-9;

/// Non-negative decimal `mantissa / 10^scale`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Decimal {
    pub mantissa: u64,
    pub scale: u32,
}

impl Decimal {
    pub fn integer(n: u64) -> Self {
        Decimal {
            mantissa: n,
            scale: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0
    }

    pub fn denominator(&self) -> u128 {
        10u128.pow(self.scale)
    }

    pub fn to_f64(&self) -> f64 {
        self.mantissa as f64 / self.denominator() as f64
    }

    /// Mantissa rescaled to `scale` (which must be >= self.scale).
    fn rescaled(&self, scale: u32) -> Option<u128> {
        (self.mantissa as u128).checked_mul(10u128.checked_pow(scale - self.scale)?)
    }
}

impl FromStr for Decimal {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if int_part.is_empty() || !all_digits(int_part) || !all_digits(frac_part) {
            return Err(format!("`{s}` is not a non-negative decimal number"));
        }
        if s.contains('.') && frac_part.is_empty() {
            return Err(format!("`{s}` has a dangling decimal point"));
        }
        let frac = frac_part.trim_end_matches('0');
        let digits = format!("{int_part}{frac}");
        let mantissa: u64 = digits
            .parse()
            .map_err(|_| format!("`{s}` has too many significant digits"))?;
        Ok(Decimal {
            mantissa,
            scale: frac.len() as u32,
        })
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_scaled(self.mantissa as u128, self.scale, None))
    }
}

/// Renders `n / 10^scale`, padded to `min_decimals` decimals when given.
fn format_scaled(n: u128, scale: u32, min_decimals: Option<u32>) -> String {
    let digits = n.to_string();
    let scale = scale as usize;
    let (int_part, frac_part) = if digits.len() > scale {
        let (i, f) = digits.split_at(digits.len() - scale);
        (i.to_string(), f.to_string())
    } else {
        ("0".to_string(), format!("{digits:0>scale$}"))
    };
    let frac = match min_decimals {
        Some(_) => frac_part,
        None => frac_part.trim_end_matches('0').to_string(),
    };
    if frac.is_empty() {
        int_part
    } else {
        format!("{int_part}.{frac}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CarrierKind {
    IntegerRange,
    RealGrid,
}

/// A finite ordered set `{0, step, 2*step, ..., top*step}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Carrier {
    kind: CarrierKind,
    top: usize,
    step: Decimal,
}

impl Carrier {
    /// `int:0:max`.
    pub fn integer(max: u64) -> Result<Self> {
        let spec = format!("int:0:{max}");
        Self::checked(CarrierKind::IntegerRange, max, Decimal::integer(1), &spec)
    }

    /// `grid:0:max:step`, where `max` must be a whole number of steps.
    pub fn grid(max: Decimal, step: Decimal) -> Result<Self> {
        let spec = format!("grid:0:{max}:{step}");
        if step.is_zero() {
            return Err(Error::InvalidCarrier {
                spec,
                reason: "step must be positive".into(),
            });
        }
        let scale = max.scale.max(step.scale);
        let (m, s) = match (max.rescaled(scale), step.rescaled(scale)) {
            (Some(m), Some(s)) => (m, s),
            _ => return Err(Error::spec(&spec, "decimal overflow")),
        };
        if m % s != 0 {
            return Err(Error::InvalidCarrier {
                spec,
                reason: "max is not a whole number of steps".into(),
            });
        }
        let top = u64::try_from(m / s).map_err(|_| Error::InvalidCarrier {
            spec: spec.clone(),
            reason: "too many points".into(),
        })?;
        Self::checked(CarrierKind::RealGrid, top, step, &spec)
    }

    fn checked(kind: CarrierKind, top: u64, step: Decimal, spec: &str) -> Result<Self> {
        if top < 1 {
            return Err(Error::InvalidCarrier {
                spec: spec.to_string(),
                reason: "a carrier needs at least two points".into(),
            });
        }
        if top >= MAX_POINTS as u64 {
            return Err(Error::InvalidCarrier {
                spec: spec.to_string(),
                reason: format!("more than {MAX_POINTS} points"),
            });
        }
        Ok(Carrier {
            kind,
            top: top as usize,
            step,
        })
    }

    pub fn kind(&self) -> CarrierKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.top + 1
    }

    /// Index of the largest element.
    pub fn top(&self) -> usize {
        self.top
    }

    pub fn step(&self) -> Decimal {
        self.step
    }

    pub fn min(&self) -> f64 {
        0.0
    }

    pub fn max(&self) -> f64 {
        self.value_of(self.top)
    }

    /// Decimal places used when printing values.
    pub fn decimals(&self) -> u32 {
        self.step.scale
    }

    pub fn value_at(&self, i: usize) -> Result<f64> {
        if i > self.top {
            return Err(Error::IndexOutOfRange {
                index: i,
                size: self.size(),
            });
        }
        Ok(self.value_of(i))
    }

    /// `value_at` without the range check.
    pub(crate) fn value_of(&self, i: usize) -> f64 {
        let (num, den) = self.rational(i);
        if den == 1 {
            num as f64
        } else {
            num as f64 / den as f64
        }
    }

    /// The point `i` as an exact fraction `num / den`.
    pub fn rational(&self, i: usize) -> (u128, u128) {
        (
            i as u128 * self.step.mantissa as u128,
            self.step.denominator(),
        )
    }

    pub fn index_of(&self, v: f64) -> Result<usize> {
        let off = || Error::OffCarrier { value: v };
        if !v.is_finite() {
            return Err(off());
        }
        let step = self.step.to_f64();
        let raw = (v / step).round();
        if raw < 0.0 || raw > self.top as f64 {
            return Err(off());
        }
        let i = raw as usize;
        let point = self.value_of(i);
        if (v - point).abs() <= GRID_TOLERANCE * point.abs().max(step) {
            Ok(i)
        } else {
            Err(off())
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.index_of(v).is_ok()
    }

    pub fn succ(&self, v: f64) -> Result<f64> {
        let i = self.index_of(v)?;
        if i == self.top {
            return Err(Error::SuccessorOfTop);
        }
        Ok(self.value_of(i + 1))
    }

    /// Predecessor, `None` at zero.
    pub fn pred(&self, v: f64) -> Result<Option<f64>> {
        let i = self.index_of(v)?;
        Ok(i.checked_sub(1).map(|j| self.value_of(j)))
    }

    /// Clamps into `[min, max]`; the identity on carrier values.
    pub fn clamp(&self, v: f64) -> f64 {
        if v.is_nan() {
            return self.min();
        }
        v.clamp(self.min(), self.max())
    }

    /// Exact decimal rendering of the point `i` with the grid's precision,
    /// e.g. `0.800` on a 0.001 grid.
    pub fn format_index(&self, i: usize) -> String {
        let (num, _) = self.rational(i);
        format_scaled(num, self.step.scale, Some(self.step.scale))
    }

    pub fn format_value(&self, v: f64) -> String {
        match self.index_of(v) {
            Ok(i) => self.format_index(i),
            Err(_) => format!("{:.*}", self.decimals() as usize, v),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.top).map(|i| self.value_of(i))
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CarrierKind::IntegerRange => write!(f, "int:0:{}", self.top),
            CarrierKind::RealGrid => {
                let (num, _) = self.rational(self.top);
                let max = format_scaled(num, self.step.scale, None);
                write!(f, "grid:0:{}:{}", max, self.step)
            }
        }
    }
}

impl FromStr for Carrier {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let zero_min = |min: &str| -> Result<()> {
            match min.parse::<Decimal>() {
                Ok(d) if d.is_zero() => Ok(()),
                Ok(_) => Err(Error::InvalidCarrier {
                    spec: spec.to_string(),
                    reason: "min must be 0".into(),
                }),
                Err(_) if min.trim_start().starts_with('-') => Err(Error::InvalidCarrier {
                    spec: spec.to_string(),
                    reason: "min must be 0".into(),
                }),
                Err(e) => Err(Error::spec(spec, e)),
            }
        };
        match parts.as_slice() {
            ["int", min, max] => {
                zero_min(min)?;
                let max: u64 = max
                    .trim()
                    .parse()
                    .map_err(|_| Error::spec(spec, "max must be a non-negative integer"))?;
                Carrier::integer(max)
            }
            ["grid", min, max, step] => {
                zero_min(min)?;
                let max: Decimal = max.parse().map_err(|e: String| Error::spec(spec, e))?;
                let step: Decimal = step.parse().map_err(|e: String| Error::spec(spec, e))?;
                Carrier::grid(max, step)
            }
            _ => Err(Error::spec(
                spec,
                "expected `int:<min>:<max>` or `grid:<min>:<max>:<step>`",
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int100() -> Carrier {
        "int:0:100".parse().unwrap()
    }

    fn milli() -> Carrier {
        "grid:0:1:0.001".parse().unwrap()
    }

    #[test]
    fn value_at_examples() {
        assert_eq!(int100().value_at(0).unwrap(), 0.0);
        assert_eq!(int100().value_at(7).unwrap(), 7.0);
        assert_eq!(milli().value_at(800).unwrap(), 0.8);
        assert!(matches!(
            int100().value_at(101),
            Err(Error::IndexOutOfRange { index: 101, .. })
        ));
    }

    #[test]
    fn index_of_examples() {
        assert_eq!(int100().index_of(42.0).unwrap(), 42);
        assert_eq!(milli().index_of(0.8).unwrap(), 800);
        assert!(matches!(
            int100().index_of(3.5),
            Err(Error::OffCarrier { .. })
        ));
        assert!(milli().index_of(0.0005).is_err());
        assert!(int100().index_of(-1.0).is_err());
        assert!(int100().index_of(f64::NAN).is_err());
    }

    #[test]
    fn succ_examples() {
        assert_eq!(int100().succ(5.0).unwrap(), 6.0);
        assert_eq!(milli().succ(0.5).unwrap(), 0.501);
        assert_eq!(int100().succ(100.0), Err(Error::SuccessorOfTop));
    }

    #[test]
    fn succ_walk_reaches_max() {
        let c: Carrier = "grid:0:0.5:0.01".parse().unwrap();
        let mut v = c.min();
        for _ in 0..c.size() - 1 {
            let next = c.succ(v).unwrap();
            assert!(next > v);
            v = next;
        }
        assert_eq!(v, c.max());
    }

    #[test]
    fn rejects_bad_carriers() {
        assert!(matches!(
            "int:1:10".parse::<Carrier>(),
            Err(Error::InvalidCarrier { .. })
        ));
        assert!(matches!(
            "int:-5:10".parse::<Carrier>(),
            Err(Error::InvalidCarrier { .. })
        ));
        assert!(matches!(
            "int:0:0".parse::<Carrier>(),
            Err(Error::InvalidCarrier { .. })
        ));
        assert!(matches!(
            "grid:0:1:0.3".parse::<Carrier>(),
            Err(Error::InvalidCarrier { .. })
        ));
        assert!(matches!(
            "grid:0:1:0".parse::<Carrier>(),
            Err(Error::InvalidCarrier { .. })
        ));
        assert!(matches!(
            "float:0:1".parse::<Carrier>(),
            Err(Error::Spec { .. })
        ));
        assert!(matches!(
            "int:0:ten".parse::<Carrier>(),
            Err(Error::Spec { .. })
        ));
    }

    #[test]
    fn display_round_trips() {
        for s in ["int:0:1000000", "grid:0:1:0.001", "grid:0:2.5:0.25"] {
            let c: Carrier = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
    }

    #[test]
    fn formatting_uses_grid_precision() {
        let c = milli();
        assert_eq!(c.format_index(800), "0.800");
        assert_eq!(c.format_index(1000), "1.000");
        assert_eq!(c.format_index(5), "0.005");
        assert_eq!(int100().format_index(42), "42");
    }

    #[test]
    fn clamp_behaviour() {
        let c = int100();
        assert_eq!(c.clamp(-3.0), 0.0);
        assert_eq!(c.clamp(250.0), 100.0);
        for v in c.points() {
            assert_eq!(c.clamp(v), v);
        }
    }
}
