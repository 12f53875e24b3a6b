//! Non-Diophantine arithmetics over finite carriers.
//!
//! An [`Arithmetic`] is a carrier, a strictly increasing functional parameter
//! `f` with `f(0) = 0`, and a family kind. With `f(x) = x` both families reduce
//! to ordinary (clamped) integer arithmetic; other parameters give arithmetics
//! where `2 + 2 = 3`, `5 + 5 = 5`, or `n + 1 = n`.

pub mod arith;
pub mod carrier;
pub mod error;
pub mod exprlang;
pub mod extreal;
pub mod funcparam;
pub mod laws;
pub mod series;

pub use arith::{Arithmetic, Kind, Overflow};
pub use carrier::{Carrier, CarrierKind, Decimal};
pub use error::{Error, Result};
pub use extreal::ExtReal;
pub use funcparam::{load_table, parse_table, Binding, FunctionalParameter, ValidationReport};
pub use laws::{
    check_archimedean, check_law, find_largest_number, search_identities,
    verify_archimedean_theorem, ArchimedeanReport, IdentityPattern, Law, LawReport, Status,
    TheoremReport,
};
pub use series::{
    arith_partial_sums, practical_convergence, ConvergenceVerdict, Magnitude, PartialSums,
    SequenceSpec, TrendEvidence, Verdict,
};
