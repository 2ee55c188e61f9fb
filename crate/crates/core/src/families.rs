//! Generators for the three token-sensitive rewrite families.
//!
//! Each family has a same-token variant, interchangeable with its simplified
//! target, and a distinct-token variant that only rewrites one way.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{Dim, Expr, Token};
use crate::interval::Interval;
use crate::rewrite::RewriteClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `x - x` toward `0`.
    Cancellation,
    /// `(s + b) - b` toward `s`.
    Background,
    /// `x / x` toward `1`.
    Division,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Same,
    Distinct,
}

impl Mode {
    pub fn flipped(self) -> Mode {
        match self {
            Mode::Same => Mode::Distinct,
            Mode::Distinct => Mode::Same,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("{family} needs a nondegenerate interval, got {interval}")]
    Degenerate { family: Family, interval: Interval },
    #[error("division needs 0 < lo < hi, got {0}")]
    NotPositive(Interval),
    #[error("background family needs a signal interval")]
    MissingSignal,
    #[error("unknown {what} `{value}`")]
    Unknown { what: &'static str, value: String },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Cancellation => "cancellation",
            Family::Background => "background",
            Family::Division => "division",
        })
    }
}

impl FromStr for Family {
    type Err = SpecError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cancellation" => Ok(Family::Cancellation),
            "background" => Ok(Family::Background),
            "division" => Ok(Family::Division),
            _ => Err(SpecError::Unknown {
                what: "family",
                value: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Same => "same",
            Mode::Distinct => "distinct",
        })
    }
}

impl FromStr for Mode {
    type Err = SpecError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "same" => Ok(Mode::Same),
            "distinct" => Ok(Mode::Distinct),
            _ => Err(SpecError::Unknown {
                what: "mode",
                value: s.to_string(),
            }),
        }
    }
}

/// One instance of a family.
///
/// `interval` is the measured interval for cancellation and division, and
/// the background interval for the background family, whose signal interval
/// is `signal`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub mode: Mode,
    pub interval: Interval,
    pub signal: Option<Interval>,
    pub dim: Dim,
}

impl FamilySpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.interval.is_point() {
            return Err(SpecError::Degenerate {
                family: self.family,
                interval: self.interval.clone(),
            });
        }
        match self.family {
            Family::Division if !self.interval.lo().is_positive() => {
                Err(SpecError::NotPositive(self.interval.clone()))
            }
            Family::Background if self.signal.is_none() => Err(SpecError::MissingSignal),
            _ => Ok(()),
        }
    }

    /// The same parameters with the other token mode.
    pub fn counterpart(&self) -> FamilySpec {
        FamilySpec {
            mode: self.mode.flipped(),
            ..self.clone()
        }
    }

    /// The `(source, target)` rewrite pair. Distinct mode uses fresh token
    /// names for every observation; same mode reuses one.
    pub fn pair(&self) -> Result<(Expr, Expr), SpecError> {
        self.validate()?;
        let d = &self.dim;
        let i = &self.interval;
        let meas = |name: &str, interval: &Interval| Expr::meas(&Token::new(name), interval.clone(), d);
        let (a, b) = match self.mode {
            Mode::Same => ("t", "t"),
            Mode::Distinct => ("t1", "t2"),
        };
        Ok(match self.family {
            Family::Cancellation => (Expr::sub(meas(a, i), meas(b, i)), Expr::exact(0, d)),
            Family::Division => (Expr::div(meas(a, i), meas(b, i)), Expr::exact(1, d)),
            Family::Background => {
                let signal = self.signal.as_ref().expect("validated");
                let (b1, b2) = match self.mode {
                    Mode::Same => ("tb", "tb"),
                    Mode::Distinct => ("tb1", "tb2"),
                };
                let s = meas("ts", signal);
                (Expr::sub(Expr::add(s.clone(), meas(b1, i)), meas(b2, i)), s)
            }
        })
    }

    pub fn expected(&self) -> RewriteClass {
        match self.mode {
            Mode::Same => RewriteClass::Interchangeable,
            Mode::Distinct => RewriteClass::OneWayOnlyForward,
        }
    }
}
