//! Rational-function normal form over tokens.
//!
//! Some non-affine expressions, such as a same-token quotient `t / t` on a
//! positive interval, are equal to an affine function of their tokens on every
//! token-consistent environment. This module finds such reductions: it builds
//! `numerator / denominator` polynomials bottom-up, refusing any division whose
//! divisor is not certified nonzero on the feasible box, and then divides
//! exactly. A zero remainder with an affine quotient is a certificate that the
//! expression's warranted enclosure is the range of that quotient.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::expr::{Expr, Token};
use crate::interval::{Extent, Interval};
use crate::rational::Rational;

/// Above this many terms the reduction gives up.
const TERM_LIMIT: usize = 256;

/// Power product of tokens, sorted by token with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
struct Monomial(Vec<(Token, u32)>);

impl Monomial {
    fn degree(&self) -> u32 {
        self.0.iter().map(|(_, k)| k).sum()
    }

    fn var(t: &Token) -> Monomial {
        Monomial(vec![(t.clone(), 1)])
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut merged: BTreeMap<Token, u32> = self.0.iter().cloned().collect();
        for (t, k) in &other.0 {
            *merged.entry(t.clone()).or_insert(0) += k;
        }
        Monomial(merged.into_iter().collect())
    }

    /// `self / other` when `other` divides `self`.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut merged: BTreeMap<Token, u32> = self.0.iter().cloned().collect();
        for (t, k) in &other.0 {
            let have = merged.get_mut(t)?;
            if *have < *k {
                return None;
            }
            *have -= k;
        }
        Some(Monomial(merged.into_iter().filter(|(_, k)| *k > 0).collect()))
    }

    fn exponent(&self, t: &Token) -> u32 {
        self.0
            .iter()
            .find(|(s, _)| s == t)
            .map_or(0, |(_, k)| *k)
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order; earlier tokens rank higher.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let mut tokens: Vec<&Token> = self.0.iter().chain(&other.0).map(|(t, _)| t).collect();
            tokens.sort();
            tokens.dedup();
            for t in tokens {
                match self.exponent(t).cmp(&other.exponent(t)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
struct Poly(BTreeMap<Monomial, Rational>);

impl Poly {
    fn constant(q: Rational) -> Poly {
        let mut p = Poly::default();
        p.add_term(Monomial::default(), q);
        p
    }

    fn var(t: &Token) -> Poly {
        let mut p = Poly::default();
        p.add_term(Monomial::var(t), Rational::one());
        p
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(m).or_insert_with(Rational::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.0.retain(|_, v| !v.is_zero());
        }
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }

    fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.0.iter().next_back()
    }

    fn len(&self) -> usize {
        self.0.len()
    }

    /// Division by a single polynomial; the remainder is zero iff `divisor | self`.
    fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let (lead_m, lead_c) = divisor.leading().expect("nonzero divisor");
        let mut quotient = Poly::default();
        let mut remainder = Poly::default();
        let mut rest = self.clone();
        while let Some((m, c)) = rest.leading().map(|(m, c)| (m.clone(), c.clone())) {
            match m.div(lead_m) {
                Some(factor) => {
                    let coeff = c.div_total(lead_c);
                    let mut step = Poly::default();
                    step.add_term(factor.clone(), coeff.clone());
                    quotient.add_term(factor, coeff);
                    rest = rest.sub(&step.mul(divisor));
                }
                None => {
                    remainder.add_term(m.clone(), c.clone());
                    rest.0.remove(&m);
                }
            }
        }
        (quotient, remainder)
    }
}

struct Fraction {
    num: Poly,
    den: Poly,
}

/// Affine function `constant + Σ coeffs[t]·t`, the result of a successful reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub constant: Rational,
    pub coeffs: BTreeMap<Token, Rational>,
}

/// Interval image of `e` where every token reads its effective box.
pub(crate) fn box_image(e: &Expr, boxes: &BTreeMap<Token, Interval>) -> Extent {
    match e {
        Expr::Exact(q, _) => Extent::Bounded(Interval::point(q.clone())),
        Expr::Meas(t, i, _) => Extent::Bounded(boxes.get(t).unwrap_or(i).clone()),
        Expr::Add(a, b) => box_image(a, boxes).add(&box_image(b, boxes)),
        Expr::Sub(a, b) => box_image(a, boxes).sub(&box_image(b, boxes)),
        Expr::Mul(a, b) => box_image(a, boxes).mul(&box_image(b, boxes)),
        Expr::Div(a, b) => box_image(a, boxes).div(&box_image(b, boxes)),
        Expr::Neg(a) => box_image(a, boxes).neg(),
    }
}

fn nonzero_on_box(e: &Expr, boxes: &BTreeMap<Token, Interval>) -> bool {
    matches!(box_image(e, boxes), Extent::Bounded(i) if !i.contains_zero())
}

fn fraction(e: &Expr, boxes: &BTreeMap<Token, Interval>) -> Option<Fraction> {
    let f = match e {
        Expr::Exact(q, _) => Fraction {
            num: Poly::constant(q.clone()),
            den: Poly::constant(Rational::one()),
        },
        Expr::Meas(t, _, _) => Fraction {
            num: Poly::var(t),
            den: Poly::constant(Rational::one()),
        },
        Expr::Neg(a) => {
            let a = fraction(a, boxes)?;
            Fraction {
                num: a.num.neg(),
                den: a.den,
            }
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (a, b) = (fraction(a, boxes)?, fraction(b, boxes)?);
            let rhs = if matches!(e, Expr::Add(..)) {
                b.num
            } else {
                b.num.neg()
            };
            if a.den == b.den {
                Fraction {
                    num: a.num.add(&rhs),
                    den: a.den,
                }
            } else {
                Fraction {
                    num: a.num.mul(&b.den).add(&rhs.mul(&a.den)),
                    den: a.den.mul(&b.den),
                }
            }
        }
        Expr::Mul(a, b) => {
            let (a, b) = (fraction(a, boxes)?, fraction(b, boxes)?);
            Fraction {
                num: a.num.mul(&b.num),
                den: a.den.mul(&b.den),
            }
        }
        Expr::Div(a, b) => {
            if b.is_exact() && crate::semantics::exact_value(b).ok()?.is_zero() {
                return Some(Fraction {
                    num: Poly::default(),
                    den: Poly::constant(Rational::one()),
                });
            }
            if !nonzero_on_box(b, boxes) {
                return None;
            }
            let (a, b) = (fraction(a, boxes)?, fraction(b, boxes)?);
            Fraction {
                num: a.num.mul(&b.den),
                den: a.den.mul(&b.num),
            }
        }
    };
    if f.num.len() > TERM_LIMIT || f.den.len() > TERM_LIMIT {
        return None;
    }
    Some(f)
}

/// Finds an affine function equal to `e` on every environment consistent with
/// `boxes`, or `None` when the reduction does not apply.
///
/// `boxes` must be the effective intervals of `e`.
pub fn reduce_to_affine(e: &Expr, boxes: &BTreeMap<Token, Interval>) -> Option<Reduction> {
    let f = fraction(e, boxes)?;
    if f.den.is_zero() {
        return None;
    }
    let (quotient, remainder) = f.num.div_rem(&f.den);
    if !remainder.is_zero() {
        return None;
    }
    let mut constant = Rational::zero();
    let mut coeffs = BTreeMap::new();
    for (m, c) in quotient.0 {
        match m.0.as_slice() {
            [] => constant = c,
            [(t, 1)] => {
                coeffs.insert(t.clone(), c);
            }
            _ => return None,
        }
    }
    Some(Reduction { constant, coeffs })
}
