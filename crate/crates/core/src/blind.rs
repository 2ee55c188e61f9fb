//! Token-erased expressions and their compositional interval semantics.
//!
//! Erasing tokens keeps intervals, dimension tags and tree shape, but loses
//! whether two leaves name the same observation. [`blind_compare`] exhibits
//! pairs that agree on everything the erased form keeps while their rewrite
//! classes differ.

use std::fmt;

use serde::Serialize;

use crate::enclosure::SampleConfig;
use crate::expr::{Dim, Expr};
use crate::interval::{Extent, Interval};
use crate::rational::Rational;
use crate::rewrite::{classify, Classification, RewriteClass};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum BlindExpr {
    Exact(Rational, Dim),
    Meas(Interval, Dim),
    Add(Box<BlindExpr>, Box<BlindExpr>),
    Sub(Box<BlindExpr>, Box<BlindExpr>),
    Mul(Box<BlindExpr>, Box<BlindExpr>),
    Div(Box<BlindExpr>, Box<BlindExpr>),
    Neg(Box<BlindExpr>),
}

pub fn forget_tokens(e: &Expr) -> BlindExpr {
    let bx = |a: &Expr| Box::new(forget_tokens(a));
    match e {
        Expr::Exact(q, d) => BlindExpr::Exact(q.clone(), d.clone()),
        Expr::Meas(_, i, d) => BlindExpr::Meas(i.clone(), d.clone()),
        Expr::Add(a, b) => BlindExpr::Add(bx(a), bx(b)),
        Expr::Sub(a, b) => BlindExpr::Sub(bx(a), bx(b)),
        Expr::Mul(a, b) => BlindExpr::Mul(bx(a), bx(b)),
        Expr::Div(a, b) => BlindExpr::Div(bx(a), bx(b)),
        Expr::Neg(a) => BlindExpr::Neg(bx(a)),
    }
}

/// Interval image with every leaf occurrence varying independently.
pub fn blind_enclosure(b: &BlindExpr) -> Extent {
    match b {
        BlindExpr::Exact(q, _) => Extent::Bounded(Interval::point(q.clone())),
        BlindExpr::Meas(i, _) => Extent::Bounded(i.clone()),
        BlindExpr::Add(x, y) => blind_enclosure(x).add(&blind_enclosure(y)),
        BlindExpr::Sub(x, y) => blind_enclosure(x).sub(&blind_enclosure(y)),
        BlindExpr::Mul(x, y) => blind_enclosure(x).mul(&blind_enclosure(y)),
        BlindExpr::Div(x, y) => blind_enclosure(x).div(&blind_enclosure(y)),
        BlindExpr::Neg(x) => blind_enclosure(x).neg(),
    }
}

impl fmt::Display for BlindExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlindExpr::Exact(q, d) => write!(f, "exact({q},{d})"),
            BlindExpr::Meas(i, d) => write!(f, "meas(_,{i},{d})"),
            BlindExpr::Add(a, b) => write!(f, "({a} + {b})"),
            BlindExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            BlindExpr::Mul(a, b) => write!(f, "({a} * {b})"),
            BlindExpr::Div(a, b) => write!(f, "({a} / {b})"),
            BlindExpr::Neg(a) => write!(f, "-{a}"),
        }
    }
}

impl fmt::Debug for BlindExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ClassComparison {
    /// Each expression classified as a rewrite source toward a common target.
    AgainstTarget {
        left: Classification,
        right: Classification,
    },
    /// The left expression classified against the right one.
    Mutual { classification: Classification },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub erased_equal: bool,
    pub left_blind: Extent,
    pub right_blind: Extent,
    pub blind_equal: bool,
    pub classes: ClassComparison,
    /// The blind summaries agree while the token-sensitive classes provably differ.
    pub insufficiency: bool,
}

pub fn blind_compare(
    left: &Expr,
    right: &Expr,
    target: Option<&Expr>,
    cfg: &SampleConfig,
) -> ComparisonReport {
    let erased_equal = forget_tokens(left) == forget_tokens(right);
    let left_blind = blind_enclosure(&forget_tokens(left));
    let right_blind = blind_enclosure(&forget_tokens(right));
    let blind_equal = left_blind == right_blind;
    let (classes, differ) = match target {
        Some(tgt) => {
            let l = classify(left, tgt, cfg);
            let r = classify(right, tgt, cfg);
            let differ = l.class.is_decided() && r.class.is_decided() && l.class != r.class;
            (ClassComparison::AgainstTarget { left: l, right: r }, differ)
        }
        None => {
            let c = classify(left, right, cfg);
            let differ = c.class.is_decided() && c.class != RewriteClass::Interchangeable;
            (ClassComparison::Mutual { classification: c }, differ)
        }
    };
    ComparisonReport {
        erased_equal,
        left_blind,
        right_blind,
        blind_equal,
        classes,
        insufficiency: erased_equal && blind_equal && differ,
    }
}
