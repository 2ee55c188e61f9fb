//! Closed rational intervals and their compositional arithmetic.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

#[derive(Deserialize)]
struct RawInterval {
    lo: Rational,
    hi: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("interval lower bound {lo} exceeds upper bound {hi}")]
pub struct IntervalOrderError {
    pub lo: Rational,
    pub hi: Rational,
}

impl TryFrom<RawInterval> for Interval {
    type Error = IntervalOrderError;
    fn try_from(raw: RawInterval) -> Result<Self, Self::Error> {
        Interval::new(raw.lo, raw.hi)
    }
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, IntervalOrderError> {
        if lo > hi {
            Err(IntervalOrderError { lo, hi })
        } else {
            Ok(Interval { lo, hi })
        }
    }

    pub fn point(q: Rational) -> Self {
        Interval {
            lo: q.clone(),
            hi: q,
        }
    }

    /// Integer-endpoint convenience constructor; panics if `lo > hi`.
    pub fn ints(lo: i64, hi: i64) -> Self {
        Interval::new(lo.into(), hi.into()).expect("ordered integer interval")
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = Rational::max_of(&self.lo, &other.lo).clone();
        let hi = Rational::min_of(&self.hi, &other.hi).clone();
        Interval::new(lo, hi).ok()
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: Rational::min_of(&self.lo, &other.lo).clone(),
            hi: Rational::max_of(&self.hi, &other.hi).clone(),
        }
    }

    /// Smallest interval holding every value of a non-empty iterator.
    pub fn hull_of<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<Interval> {
        values.into_iter().fold(None, |acc: Option<Interval>, v| {
            Some(match acc {
                None => Interval::point(v.clone()),
                Some(i) => i.hull(&Interval::point(v.clone())),
            })
        })
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        Interval::hull_of(products.iter()).expect("four products")
    }

    /// Image under total division. A point denominator at zero yields `[0,0]`;
    /// any other denominator touching zero is unbounded.
    pub fn div(&self, other: &Interval) -> Extent {
        if other.lo.is_zero() && other.hi.is_zero() {
            return Extent::Bounded(Interval::point(Rational::zero()));
        }
        if other.contains_zero() {
            return Extent::Unbounded;
        }
        let quotients = [
            self.lo.div_total(&other.lo),
            self.lo.div_total(&other.hi),
            self.hi.div_total(&other.lo),
            self.hi.div_total(&other.hi),
        ];
        Extent::Bounded(Interval::hull_of(quotients.iter()).expect("four quotients"))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A closed interval or an unbounded set of rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Extent {
    Bounded(Interval),
    Unbounded,
}

impl Extent {
    pub fn bounded(&self) -> Option<&Interval> {
        match self {
            Extent::Bounded(i) => Some(i),
            Extent::Unbounded => None,
        }
    }

    /// `true` unless the value is certainly outside a bounded extent.
    pub fn may_contain(&self, q: &Rational) -> bool {
        match self {
            Extent::Bounded(i) => i.contains(q),
            Extent::Unbounded => true,
        }
    }

    fn lift2(a: &Extent, b: &Extent, op: impl FnOnce(&Interval, &Interval) -> Extent) -> Extent {
        match (a, b) {
            (Extent::Bounded(x), Extent::Bounded(y)) => op(x, y),
            _ => Extent::Unbounded,
        }
    }

    // Any unbounded operand makes the result unbounded.

    pub fn add(&self, other: &Extent) -> Extent {
        Extent::lift2(self, other, |x, y| Extent::Bounded(x.add(y)))
    }

    pub fn sub(&self, other: &Extent) -> Extent {
        Extent::lift2(self, other, |x, y| Extent::Bounded(x.sub(y)))
    }

    pub fn mul(&self, other: &Extent) -> Extent {
        Extent::lift2(self, other, |x, y| Extent::Bounded(x.mul(y)))
    }

    pub fn div(&self, other: &Extent) -> Extent {
        Extent::lift2(self, other, |x, y| x.div(y))
    }

    pub fn neg(&self) -> Extent {
        match self {
            Extent::Bounded(x) => Extent::Bounded(x.neg()),
            Extent::Unbounded => Extent::Unbounded,
        }
    }
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extent::Bounded(i) => write!(f, "{i}"),
            Extent::Unbounded => f.write_str("unbounded"),
        }
    }
}
