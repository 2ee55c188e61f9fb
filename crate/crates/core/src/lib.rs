//! Token-sensitive enclosure semantics for measurement-bearing expressions.
//!
//! A measured leaf `meas(t, [lo,hi], d)` names an observation event `t` whose
//! hidden exact value lies in `[lo,hi]`. Repeated occurrences of one token share
//! that value; distinct tokens vary independently. The warranted enclosure of an
//! expression is the set of values it takes over all such assignments, and a
//! rewrite `src ⇝ tgt` is licensed when the target's enclosure is contained in
//! the source's.
//!
//! ```
//! use warrant_core::{classify, parse, RewriteClass, SampleConfig};
//!
//! let cfg = SampleConfig::default();
//! let zero = parse("exact(0,d)").unwrap();
//! let same = parse("meas(t,[2,5],d) - meas(t,[2,5],d)").unwrap();
//! let distinct = parse("meas(t1,[2,5],d) - meas(t2,[2,5],d)").unwrap();
//! assert_eq!(classify(&same, &zero, &cfg).class, RewriteClass::Interchangeable);
//! assert_eq!(classify(&distinct, &zero, &cfg).class, RewriteClass::OneWayOnlyForward);
//! ```

pub mod audit;
pub mod blind;
pub mod enclosure;
pub mod expr;
pub mod families;
pub mod gen;
pub mod interval;
pub mod rational;
pub mod ratfn;
pub mod rewrite;
pub mod semantics;
pub mod syntax;

pub use blind::{blind_compare, blind_enclosure, forget_tokens, BlindExpr, ComparisonReport};
pub use enclosure::{
    affine_enclosure, certify, enclosure, membership, over_approx, to_affine, under_approx_samples,
    AffineForm, EnclosureOutcome, Membership, Refutation, Sample, SampleConfig,
};
pub use expr::{Dim, Expr, InfeasibleToken, Token};
pub use families::{Family, FamilySpec, Mode};
pub use interval::{Extent, Interval};
pub use rational::Rational;
pub use rewrite::{check_conservativity, classify, licensed, Classification, RewriteClass, Verdict3};
pub use semantics::{eval, exact_value, token_consistent, TokenEnv};
pub use syntax::{parse, print, ParseError};
