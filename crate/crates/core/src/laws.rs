//! Exhaustive law checking over a sub-carrier `[0..R]`.
//!
//! Tuples are visited in shell order: first by their largest coordinate, then
//! lexicographically. The reported witness is therefore the lexicographically
//! smallest violation inside the smallest cube `[0..k]^arity` that contains
//! one, and it does not move when `R` grows. Scans run in parallel over the
//! first coordinate and reduce to that minimum, so reports do not depend on
//! the thread count.
//!
//! Tuples where either side of a law overflows a dual arithmetic's window are
//! counted as skipped rather than violations: the window is a finite slice of
//! an unbounded arithmetic, and both sides are undefined there.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{Arithmetic, Kind};
use crate::error::{Error, Result};

/// Carriers up to this size get full operation tables for triple scans.
const TABLE_LIMIT: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    CommutativityAdd,
    CommutativityMul,
    AssocAdd,
    AssocMul,
    Distributivity,
    NeutralZero,
    NeutralOne,
    Archimedean,
    TheoremArchimedeanMll,
}

impl Law {
    pub const ALL: [Law; 9] = [
        Law::CommutativityAdd,
        Law::CommutativityMul,
        Law::AssocAdd,
        Law::AssocMul,
        Law::Distributivity,
        Law::NeutralZero,
        Law::NeutralOne,
        Law::Archimedean,
        Law::TheoremArchimedeanMll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Law::CommutativityAdd => "commutativity-add",
            Law::CommutativityMul => "commutativity-mul",
            Law::AssocAdd => "assoc-add",
            Law::AssocMul => "assoc-mul",
            Law::Distributivity => "distributivity",
            Law::NeutralZero => "neutral-zero",
            Law::NeutralOne => "neutral-one",
            Law::Archimedean => "archimedean",
            Law::TheoremArchimedeanMll => "theorem-archimedean-mll",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Law::NeutralZero | Law::NeutralOne => 1,
            Law::CommutativityAdd | Law::CommutativityMul => 2,
            Law::AssocAdd | Law::AssocMul | Law::Distributivity => 3,
            Law::Archimedean | Law::TheoremArchimedeanMll => 2,
        }
    }

    pub fn needs_mul(self) -> bool {
        matches!(
            self,
            Law::CommutativityMul | Law::AssocMul | Law::Distributivity | Law::NeutralOne
        )
    }

    /// Parses a comma-separated list; `all` expands to every law. The result
    /// is deduplicated and in canonical order.
    pub fn parse_list(s: &str) -> Result<Vec<Law>> {
        let mut laws = Vec::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            if item == "all" {
                laws.extend(Law::ALL);
            } else {
                laws.push(item.parse()?);
            }
        }
        if laws.is_empty() {
            return Err(Error::spec(s, "no laws given"));
        }
        laws.sort();
        laws.dedup();
        Ok(laws)
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Law {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let law = match s.trim() {
            "commutativity-add" | "comm-add" => Law::CommutativityAdd,
            "commutativity-mul" | "comm-mul" => Law::CommutativityMul,
            "assoc-add" => Law::AssocAdd,
            "assoc-mul" => Law::AssocMul,
            "distributivity" | "dist" => Law::Distributivity,
            "neutral-zero" => Law::NeutralZero,
            "neutral-one" => Law::NeutralOne,
            "archimedean" => Law::Archimedean,
            "theorem-archimedean-mll" | "theorem" => Law::TheoremArchimedeanMll,
            other => return Err(Error::spec(other, "unknown law")),
        };
        Ok(law)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Holds,
    Fails,
    NotApplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::NotApplicable => "not-applicable",
        })
    }
}

/// Outcome of checking one law on `[0..R]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawReport {
    pub law: Law,
    pub status: Status,
    /// Carrier values of the minimal counterexample.
    pub witness: Option<Vec<f64>>,
    /// The two differing sides at the witness, `lhs != rhs`.
    pub sides: Option<(f64, f64)>,
    /// Largest carrier value examined (the range is `[0, range]`).
    pub range: f64,
    pub pairs_checked: u64,
    pub violations: u64,
    pub skipped: u64,
    pub note: Option<String>,
}

impl LawReport {
    fn new(law: Law, status: Status, range: f64) -> Self {
        LawReport {
            law,
            status,
            witness: None,
            sides: None,
            range,
            pairs_checked: 0,
            violations: 0,
            skipped: 0,
            note: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArchimedeanReport {
    pub archimedean: bool,
    /// `(m, n)`: sums of `m` stall at `fixed_point` and never reach `n`.
    pub witness: Option<(f64, f64)>,
    pub fixed_point: Option<f64>,
    pub range: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremReport {
    pub consistent: bool,
    pub archimedean: bool,
    /// Whether `a << b` implied `a = 0` for every pair examined.
    pub mll_implies_zero: bool,
    pub archimedean_witness: Option<(f64, f64)>,
    /// Smallest `(a, b)` with `a << b` and `a != 0`.
    pub mll_witness: Option<(f64, f64)>,
    /// The pair refuting the equivalence, when inconsistent.
    pub falsifying: Option<(f64, f64)>,
    pub range: f64,
    /// The equivalence is stated for projective arithmetics; dual results
    /// are an extrapolation.
    pub extrapolated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityPattern {
    /// `a (+) b = a` with `b > 0`.
    APlusBEqA,
    /// `a (*) a = a` with `a > 1`.
    ATimesAEqA,
}

impl FromStr for IdentityPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a_plus_b_eq_a" => Ok(IdentityPattern::APlusBEqA),
            "a_times_a_eq_a" => Ok(IdentityPattern::ATimesAEqA),
            other => Err(Error::spec(
                other,
                "expected a_plus_b_eq_a or a_times_a_eq_a",
            )),
        }
    }
}

/// Operation backend for scans; `None` means the dual window overflowed.
trait Ops: Sync {
    fn add(&self, a: usize, b: usize) -> Option<usize>;
    fn mul(&self, a: usize, b: usize) -> Option<usize>;
}

struct Direct<'a>(&'a Arithmetic);

impl Ops for Direct<'_> {
    fn add(&self, a: usize, b: usize) -> Option<usize> {
        self.0.add_idx(a, b).ok()
    }

    fn mul(&self, a: usize, b: usize) -> Option<usize> {
        self.0.mul_idx(a, b).ok()
    }
}

struct Tabled {
    size: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
}

const EXHAUSTED: u32 = u32::MAX;

impl Tabled {
    fn build(ar: &Arithmetic, with_mul: bool) -> Self {
        let size = ar.carrier().size();
        let fill = |op: &(dyn Fn(usize, usize) -> Option<usize> + Sync)| -> Vec<u32> {
            (0..size * size)
                .into_par_iter()
                .map(|k| op(k / size, k % size).map_or(EXHAUSTED, |v| v as u32))
                .collect()
        };
        let direct = Direct(ar);
        let add = fill(&|a, b| direct.add(a, b));
        let mul = if with_mul {
            fill(&|a, b| direct.mul(a, b))
        } else {
            Vec::new()
        };
        Tabled { size, add, mul }
    }

    #[inline]
    fn get(table: &[u32], size: usize, a: usize, b: usize) -> Option<usize> {
        match table[a * size + b] {
            EXHAUSTED => None,
            v => Some(v as usize),
        }
    }
}

impl Ops for Tabled {
    fn add(&self, a: usize, b: usize) -> Option<usize> {
        Tabled::get(&self.add, self.size, a, b)
    }

    fn mul(&self, a: usize, b: usize) -> Option<usize> {
        Tabled::get(&self.mul, self.size, a, b)
    }
}

enum Outcome {
    Holds,
    Fails(usize, usize),
    Skipped,
}

#[derive(Default)]
struct Tally {
    checked: u64,
    skipped: u64,
    violations: u64,
    best: Option<(Vec<usize>, (usize, usize))>,
}

fn shell_key(t: &[usize]) -> (usize, &[usize]) {
    (t.iter().copied().max().unwrap_or(0), t)
}

impl Tally {
    fn offer(&mut self, tuple: &[usize], sides: (usize, usize)) {
        self.violations += 1;
        let better = match &self.best {
            None => true,
            Some((w, _)) => shell_key(tuple) < shell_key(w),
        };
        if better {
            self.best = Some((tuple.to_vec(), sides));
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.violations += other.violations;
        if let Some((w, s)) = other.best {
            let better = match &self.best {
                None => true,
                Some((mine, _)) => shell_key(&w) < shell_key(mine),
            };
            if better {
                self.best = Some((w, s));
            }
        }
        self
    }
}

/// Visits every tuple of `[0..=r]^arity` and tallies the outcomes.
fn scan(arity: usize, r: usize, eval: &(dyn Fn(&[usize]) -> Outcome + Sync)) -> Tally {
    (0..=r)
        .into_par_iter()
        .map(|first| {
            let mut tally = Tally::default();
            let mut tuple = vec![0; arity];
            tuple[0] = first;
            loop {
                match eval(&tuple) {
                    Outcome::Holds => tally.checked += 1,
                    Outcome::Skipped => tally.skipped += 1,
                    Outcome::Fails(l, rr) => {
                        tally.checked += 1;
                        tally.offer(&tuple, (l, rr));
                    }
                }
                // advance the trailing coordinates as a mixed-radix counter
                let mut pos = arity;
                loop {
                    if pos == 1 {
                        return tally;
                    }
                    pos -= 1;
                    if tuple[pos] < r {
                        tuple[pos] += 1;
                        break;
                    }
                    tuple[pos] = 0;
                }
            }
        })
        .reduce(Tally::default, Tally::merge)
}

fn compare(lhs: Option<usize>, rhs: Option<usize>) -> Outcome {
    match (lhs, rhs) {
        (Some(l), Some(r)) if l == r => Outcome::Holds,
        (Some(l), Some(r)) => Outcome::Fails(l, r),
        _ => Outcome::Skipped,
    }
}

fn scan_law(ops: &dyn Ops, law: Law, r: usize, one: usize) -> Tally {
    let add = |a, b| ops.add(a, b);
    let mul = |a, b| ops.mul(a, b);
    match law {
        Law::CommutativityAdd => scan(2, r, &|t| compare(add(t[0], t[1]), add(t[1], t[0]))),
        Law::CommutativityMul => scan(2, r, &|t| compare(mul(t[0], t[1]), mul(t[1], t[0]))),
        Law::AssocAdd => scan(3, r, &|t| {
            let lhs = add(t[0], t[1]).and_then(|ab| add(ab, t[2]));
            let rhs = add(t[1], t[2]).and_then(|bc| add(t[0], bc));
            compare(lhs, rhs)
        }),
        Law::AssocMul => scan(3, r, &|t| {
            let lhs = mul(t[0], t[1]).and_then(|ab| mul(ab, t[2]));
            let rhs = mul(t[1], t[2]).and_then(|bc| mul(t[0], bc));
            compare(lhs, rhs)
        }),
        Law::Distributivity => scan(3, r, &|t| {
            let lhs = add(t[1], t[2]).and_then(|bc| mul(t[0], bc));
            let rhs = match (mul(t[0], t[1]), mul(t[0], t[2])) {
                (Some(ab), Some(ac)) => add(ab, ac),
                _ => None,
            };
            compare(lhs, rhs)
        }),
        Law::NeutralZero => scan(1, r, &|t| match compare(add(t[0], 0), Some(t[0])) {
            Outcome::Holds => compare(add(0, t[0]), Some(t[0])),
            other => other,
        }),
        Law::NeutralOne => scan(1, r, &|t| match compare(mul(t[0], one), Some(t[0])) {
            Outcome::Holds => compare(mul(one, t[0]), Some(t[0])),
            other => other,
        }),
        Law::Archimedean | Law::TheoremArchimedeanMll => unreachable!("not a tuple law"),
    }
}

fn clamp_range(ar: &Arithmetic, r: usize) -> usize {
    r.min(ar.top())
}

fn with_ops<T>(ar: &Arithmetic, r: usize, with_mul: bool, body: impl FnOnce(&dyn Ops) -> T) -> T {
    // Second-level operands may leave [0..R], so tables cover the carrier.
    if ar.carrier().size() <= TABLE_LIMIT && r >= 8 {
        let tabled = Tabled::build(ar, with_mul);
        body(&tabled)
    } else {
        body(&Direct(ar))
    }
}

/// Checks one law exhaustively over `[0..R]` (R is clamped to the carrier).
pub fn check_law(ar: &Arithmetic, law: Law, r: usize) -> LawReport {
    let r = clamp_range(ar, r);
    let range = ar.value(r);
    match law {
        Law::Archimedean => return archimedean_law_report(ar, r),
        Law::TheoremArchimedeanMll => return theorem_law_report(ar, r),
        _ => {}
    }
    if law.needs_mul() && !ar.multiplicative() {
        let mut report = LawReport::new(law, Status::NotApplicable, range);
        report.note = Some("multiplication unavailable: f(1) != 1".into());
        return report;
    }
    let one = ar.index(1.0).unwrap_or(1);
    let tally = with_ops(ar, r, law.needs_mul(), |ops| scan_law(ops, law, r, one));
    let mut report = LawReport::new(
        law,
        if tally.violations == 0 {
            Status::Holds
        } else {
            Status::Fails
        },
        range,
    );
    report.pairs_checked = tally.checked;
    report.skipped = tally.skipped;
    report.violations = tally.violations;
    if let Some((w, (l, rr))) = tally.best {
        report.witness = Some(w.iter().map(|&i| ar.value(i)).collect());
        report.sides = Some((ar.value(l), ar.value(rr)));
    }
    if tally.skipped > 0 {
        report.note = Some(format!(
            "{} tuples overflow the dual window and were skipped",
            tally.skipped
        ));
    }
    report
}

fn archimedean_law_report(ar: &Arithmetic, r: usize) -> LawReport {
    let arch = check_archimedean(ar, r);
    let mut report = LawReport::new(
        Law::Archimedean,
        if arch.archimedean {
            Status::Holds
        } else {
            Status::Fails
        },
        arch.range,
    );
    report.pairs_checked = r as u64;
    if let (Some((m, n)), Some(p)) = (arch.witness, arch.fixed_point) {
        report.witness = Some(vec![m, n]);
        report.violations = 1;
        report.note = Some(format!(
            "sums of {} stall at {} and never reach {}",
            ar.carrier().format_value(m),
            ar.carrier().format_value(p),
            ar.carrier().format_value(n)
        ));
    }
    report
}

fn theorem_law_report(ar: &Arithmetic, r: usize) -> LawReport {
    let th = verify_archimedean_theorem(ar, r);
    let mut report = LawReport::new(
        Law::TheoremArchimedeanMll,
        if th.consistent {
            Status::Holds
        } else {
            Status::Fails
        },
        th.range,
    );
    report.pairs_checked = (r as u64) * (r as u64 + 1);
    if let Some((a, b)) = th.falsifying {
        report.witness = Some(vec![a, b]);
        report.violations = 1;
    }
    let mut note = format!(
        "archimedean={} mll-implies-zero={}",
        th.archimedean, th.mll_implies_zero
    );
    if th.extrapolated {
        note.push_str(" (dual kind: extrapolated)");
    }
    report.note = Some(note);
    report
}

/// Decides the Archimedean property on `[0..R]`.
///
/// For each `m` in `1..=R` the sums `m, m(+)m, ...` are followed until they
/// pass `R`, overflow, or stall at a fixed point `p`. A fixed point below the
/// top element is a witness `(m, succ(p))`: the sums never reach `succ(p)`.
/// Stalling at the saturated top is not a witness, since every `n` below the
/// top has been passed.
pub fn check_archimedean(ar: &Arithmetic, r: usize) -> ArchimedeanReport {
    let r = clamp_range(ar, r);
    let top = ar.top();
    let mut report = ArchimedeanReport {
        archimedean: true,
        witness: None,
        fixed_point: None,
        range: ar.value(r),
    };
    for m in 1..=r {
        let mut s = m;
        loop {
            if s > r {
                break;
            }
            match ar.add_idx(s, m) {
                Err(_) => break,
                Ok(next) if next == s => {
                    if s < top {
                        report.archimedean = false;
                        report.witness = Some((ar.value(m), ar.value(s + 1)));
                        report.fixed_point = Some(ar.value(s));
                        return report;
                    }
                    break;
                }
                Ok(next) => s = next,
            }
        }
    }
    report
}

/// Checks that "Archimedean" and "`a << b` implies `a = 0`" agree on
/// `[0..R]`. Pairs with `b` at the top element are left out: the saturated
/// top absorbs everything in a finite window.
pub fn verify_archimedean_theorem(ar: &Arithmetic, r: usize) -> TheoremReport {
    let r = clamp_range(ar, r);
    let arch = check_archimedean(ar, r);
    let b_max = r.min(ar.top().saturating_sub(1));
    let mll_witness = (1..=r)
        .into_par_iter()
        .filter_map(|a| {
            (0..=b_max)
                .find(|&b| ar.mll_idx(a, b).unwrap_or(false))
                .map(|b| (a, b))
        })
        .min()
        .map(|(a, b)| (ar.value(a), ar.value(b)));
    let mll_implies_zero = mll_witness.is_none();
    let consistent = arch.archimedean == mll_implies_zero;
    let falsifying = if consistent {
        None
    } else if arch.archimedean {
        mll_witness
    } else {
        arch.witness
    };
    TheoremReport {
        consistent,
        archimedean: arch.archimedean,
        mll_implies_zero,
        archimedean_witness: arch.witness,
        mll_witness,
        falsifying,
        range: arch.range,
        extrapolated: ar.kind() == Kind::Dual,
    }
}

/// The least element `L` with `L (+) a = L` for every carrier `a`.
pub fn find_largest_number(ar: &Arithmetic) -> Option<f64> {
    // add(L, a) never drops below L and grows with a, so a = top decides.
    let top = ar.top();
    (0..=top)
        .find(|&l| matches!(ar.add_idx(l, top), Ok(s) if s == l))
        .map(|l| ar.value(l))
}

/// All instances of `pattern` on `[0..R]`, in lexicographic order.
pub fn search_identities(
    ar: &Arithmetic,
    pattern: IdentityPattern,
    r: usize,
) -> Result<Vec<Vec<f64>>> {
    let r = clamp_range(ar, r);
    match pattern {
        IdentityPattern::APlusBEqA => Ok((0..=r)
            .flat_map(|a| (1..=r).map(move |b| (a, b)))
            .filter(|&(a, b)| matches!(ar.add_idx(a, b), Ok(s) if s == a))
            .map(|(a, b)| vec![ar.value(a), ar.value(b)])
            .collect()),
        IdentityPattern::ATimesAEqA => {
            if !ar.multiplicative() {
                return Err(Error::MultiplicationUnavailable);
            }
            let one = ar.index(1.0)?;
            Ok((one + 1..=r)
                .filter(|&a| matches!(ar.mul_idx(a, a), Ok(p) if p == a))
                .map(|a| vec![ar.value(a)])
                .collect())
        }
    }
}
