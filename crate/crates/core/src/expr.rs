//! Expression syntax: exact leaves, measured leaves, and arithmetic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::Interval;
use crate::rational::Rational;

/// Identity of one observation event. Only equality is semantically relevant;
/// the ordering exists so maps over tokens iterate deterministically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Token(Arc<str>);

impl Token {
    pub fn new(name: impl AsRef<str>) -> Self {
        Token(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Dimension tag carried by leaves. Never evaluated.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Dim(Arc<str>);

impl Dim {
    pub fn new(tag: impl AsRef<str>) -> Self {
        Dim(Arc::from(tag.as_ref()))
    }

    pub fn tag(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Exact(Rational, Dim),
    Meas(Token, Interval, Dim),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("token `{0}` has disjoint interval declarations")]
pub struct InfeasibleToken(pub Token);

impl Expr {
    pub fn exact(q: impl Into<Rational>, d: &Dim) -> Expr {
        Expr::Exact(q.into(), d.clone())
    }

    pub fn meas(t: &Token, i: Interval, d: &Dim) -> Expr {
        Expr::Meas(t.clone(), i, d.clone())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    /// True iff no measured leaf occurs.
    pub fn is_exact(&self) -> bool {
        match self {
            Expr::Exact(..) => true,
            Expr::Meas(..) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_exact() && b.is_exact()
            }
            Expr::Neg(a) => a.is_exact(),
        }
    }

    /// Visits every measured leaf in left-to-right order.
    pub fn for_each_meas<'a>(&'a self, f: &mut impl FnMut(&'a Token, &'a Interval, &'a Dim)) {
        match self {
            Expr::Exact(..) => {}
            Expr::Meas(t, i, d) => f(t, i, d),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.for_each_meas(f);
                b.for_each_meas(f);
            }
            Expr::Neg(a) => a.for_each_meas(f),
        }
    }

    pub fn tokens(&self) -> BTreeSet<Token> {
        let mut out = BTreeSet::new();
        self.for_each_meas(&mut |t, _, _| {
            out.insert(t.clone());
        });
        out
    }

    /// Every dimension tag in the tree, exact leaves included.
    pub fn dims(&self) -> BTreeSet<Dim> {
        let mut out = BTreeSet::new();
        self.collect_dims(&mut out);
        out
    }

    fn collect_dims(&self, out: &mut BTreeSet<Dim>) {
        match self {
            Expr::Exact(_, d) | Expr::Meas(_, _, d) => {
                out.insert(d.clone());
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_dims(out);
                b.collect_dims(out);
            }
            Expr::Neg(a) => a.collect_dims(out),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Exact(..) | Expr::Meas(..) => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.node_count() + b.node_count()
            }
            Expr::Neg(a) => 1 + a.node_count(),
        }
    }

    /// Per-token intersection of all declared intervals.
    pub fn effective_intervals(&self) -> Result<BTreeMap<Token, Interval>, InfeasibleToken> {
        let mut boxes: BTreeMap<Token, Interval> = BTreeMap::new();
        let mut infeasible: Option<Token> = None;
        self.for_each_meas(&mut |t, i, _| {
            if infeasible.is_some() {
                return;
            }
            match boxes.get(t) {
                None => {
                    boxes.insert(t.clone(), i.clone());
                }
                Some(prev) => match prev.intersect(i) {
                    Some(narrowed) => {
                        boxes.insert(t.clone(), narrowed);
                    }
                    None => infeasible = Some(t.clone()),
                },
            }
        });
        match infeasible {
            Some(t) => Err(InfeasibleToken(t)),
            None => Ok(boxes),
        }
    }

    /// Structural equality that ignores dimension tags.
    pub fn same_shape(&self, other: &Expr) -> bool {
        match (self, other) {
            (Expr::Exact(p, _), Expr::Exact(q, _)) => p == q,
            (Expr::Meas(s, i, _), Expr::Meas(t, j, _)) => s == t && i == j,
            (Expr::Add(a, b), Expr::Add(c, d))
            | (Expr::Sub(a, b), Expr::Sub(c, d))
            | (Expr::Mul(a, b), Expr::Mul(c, d))
            | (Expr::Div(a, b), Expr::Div(c, d)) => a.same_shape(c) && b.same_shape(d),
            (Expr::Neg(a), Expr::Neg(b)) => a.same_shape(b),
            _ => false,
        }
    }

    /// Applies `f` to every token, leaving the rest of the tree intact.
    pub fn rename_tokens(&self, f: &impl Fn(&Token) -> Token) -> Expr {
        match self {
            Expr::Exact(..) => self.clone(),
            Expr::Meas(t, i, d) => Expr::Meas(f(t), i.clone(), d.clone()),
            Expr::Add(a, b) => Expr::add(a.rename_tokens(f), b.rename_tokens(f)),
            Expr::Sub(a, b) => Expr::sub(a.rename_tokens(f), b.rename_tokens(f)),
            Expr::Mul(a, b) => Expr::mul(a.rename_tokens(f), b.rename_tokens(f)),
            Expr::Div(a, b) => Expr::div(a.rename_tokens(f), b.rename_tokens(f)),
            Expr::Neg(a) => Expr::neg(a.rename_tokens(f)),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn effective_intervals_intersect() {
        let e = parse("meas(t,[2,5],d)+meas(t,[4,8],d)").unwrap();
        let boxes = e.effective_intervals().unwrap();
        assert_eq!(boxes.len(), 1);
        assert_eq!(boxes[&Token::new("t")], Interval::ints(4, 5));
    }

    #[test]
    fn effective_intervals_infeasible() {
        let e = parse("meas(t,[0,1],d)+meas(t,[2,3],d)").unwrap();
        assert_eq!(e.effective_intervals(), Err(InfeasibleToken(Token::new("t"))));
    }

    #[test]
    fn effective_intervals_independent_tokens() {
        let e = parse("meas(t1,[2,5],d)-meas(t2,[2,5],d)").unwrap();
        let boxes = e.effective_intervals().unwrap();
        assert_eq!(boxes[&Token::new("t1")], Interval::ints(2, 5));
        assert_eq!(boxes[&Token::new("t2")], Interval::ints(2, 5));
    }

    #[test]
    fn effective_intervals_ignore_dims_and_exact_leaves() {
        let a = parse("meas(t,[2,5],m) * exact(3,s) + meas(t,[1,4],kg)").unwrap();
        let b = parse("meas(t,[2,5],d) + meas(t,[1,4],d)").unwrap();
        assert_eq!(a.effective_intervals(), b.effective_intervals());
    }

    #[test]
    fn exactness_is_syntactic() {
        assert!(parse("exact(2,d)+exact(3,d)").unwrap().is_exact());
        assert!(!parse("meas(t,[2,5],d)").unwrap().is_exact());
        let e = parse("-(exact(1,d)/exact(0,d))").unwrap();
        assert!(e.is_exact());
        assert!(e.effective_intervals().unwrap().is_empty());
    }
}
