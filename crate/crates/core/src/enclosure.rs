//! Warranted enclosures.
//!
//! The enclosure of an expression is the set of values it takes over all
//! token-consistent environments. On the affine fragment it is computed
//! exactly as a closed interval. Elsewhere it is bracketed between sampled
//! witnesses (an under-approximation) and token-blind interval arithmetic
//! (an over-approximation).

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::blind::{blind_enclosure, forget_tokens};
use crate::expr::{Expr, InfeasibleToken, Token};
use crate::interval::{Extent, Interval};
use crate::rational::Rational;
use crate::ratfn::reduce_to_affine;
use crate::semantics::{eval, exact_value, token_consistent, TokenEnv};

pub const DEFAULT_GRID: usize = 5;
pub const DEFAULT_BUDGET: usize = 100_000;

/// Sampling parameters for the non-affine path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    /// Points per token, endpoints included. At least 2.
    pub grid: usize,
    /// Maximum number of environments enumerated.
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("grid must have at least 2 points per token, got {0}")]
    Grid(usize),
    #[error("budget must be positive")]
    Budget,
}

impl SampleConfig {
    pub fn new(grid: usize, budget: usize) -> Result<Self, ConfigError> {
        if grid < 2 {
            return Err(ConfigError::Grid(grid));
        }
        if budget == 0 {
            return Err(ConfigError::Budget);
        }
        Ok(SampleConfig { grid, budget })
    }
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            grid: DEFAULT_GRID,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// `constant + Σ coeffs[t]·σ(t)` over the box of effective intervals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AffineForm {
    pub constant: Rational,
    pub coeffs: BTreeMap<Token, Rational>,
    pub boxes: BTreeMap<Token, Interval>,
}

impl AffineForm {
    pub fn value(&self, sigma: &TokenEnv) -> Rational {
        self.coeffs
            .iter()
            .fold(self.constant.clone(), |acc, (t, c)| acc + c * &sigma.get(t))
    }

    fn coeff(&self, t: &Token) -> Rational {
        self.coeffs.get(t).cloned().unwrap_or_else(Rational::zero)
    }

    /// Environment at the box corner minimizing (or maximizing) the form.
    /// Tokens with a zero coefficient sit at their lower endpoint.
    pub fn corner(&self, maximize: bool) -> TokenEnv {
        self.boxes
            .iter()
            .map(|(t, i)| {
                let c = self.coeff(t);
                let high = if maximize { c.is_positive() } else { c.is_negative() };
                let v = if high { i.hi() } else { i.lo() };
                (t.clone(), v.clone())
            })
            .collect()
    }

    /// Exact range: per-token minima and maxima of `c·ℓ` and `c·u`.
    pub fn range(&self) -> Interval {
        let (mut lo, mut hi) = (self.constant.clone(), self.constant.clone());
        for (t, c) in &self.coeffs {
            let i = &self.boxes[t];
            let (a, b) = (c * i.lo(), c * i.hi());
            lo = lo + Rational::min_of(&a, &b);
            hi = hi + Rational::max_of(&a, &b);
        }
        Interval::new(lo, hi).expect("min sum below max sum")
    }

    /// An environment in the box where the form equals `q`, by convex
    /// combination of the two extreme corners.
    pub fn witness(&self, q: &Rational) -> Option<TokenEnv> {
        if !self.range().contains(q) {
            return None;
        }
        let low = self.corner(false);
        let high = self.corner(true);
        let (vl, vh) = (self.value(&low), self.value(&high));
        if vl == vh {
            return Some(low);
        }
        let lambda = (q - &vl).div_total(&(&vh - &vl));
        Some(
            self.boxes
                .keys()
                .map(|t| {
                    let (a, b) = (low.get(t), high.get(t));
                    let v = &a + &(&lambda * &(&b - &a));
                    (t.clone(), v)
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AffineError {
    #[error("expression is not affine in its tokens")]
    NotAffine,
    #[error(transparent)]
    Infeasible(#[from] InfeasibleToken),
}

type Linear = (Rational, BTreeMap<Token, Rational>);

fn scale(lin: Linear, k: &Rational) -> Linear {
    let (c, coeffs) = lin;
    (&c * k, coeffs.into_iter().map(|(t, v)| (t, &v * k)).collect())
}

fn combine(a: Linear, b: Linear, sign: i64) -> Linear {
    let k = Rational::from(sign);
    let (ca, mut coeffs) = a;
    let (cb, other) = b;
    for (t, v) in other {
        let slot = coeffs.entry(t).or_insert_with(Rational::zero);
        *slot = &*slot + &(&v * &k);
    }
    (ca + &cb * &k, coeffs)
}

fn linear(e: &Expr) -> Result<Linear, AffineError> {
    if e.is_exact() {
        let q = exact_value(e).expect("exact subtree");
        return Ok((q, BTreeMap::new()));
    }
    match e {
        Expr::Exact(..) => unreachable!("handled above"),
        Expr::Meas(t, _, _) => Ok((Rational::zero(), BTreeMap::from([(t.clone(), Rational::one())]))),
        Expr::Add(a, b) => Ok(combine(linear(a)?, linear(b)?, 1)),
        Expr::Sub(a, b) => Ok(combine(linear(a)?, linear(b)?, -1)),
        Expr::Neg(a) => Ok(scale(linear(a)?, &Rational::from(-1))),
        Expr::Mul(a, b) => {
            if a.is_exact() {
                Ok(scale(linear(b)?, &exact_value(a).expect("exact")))
            } else if b.is_exact() {
                Ok(scale(linear(a)?, &exact_value(b).expect("exact")))
            } else {
                Err(AffineError::NotAffine)
            }
        }
        Expr::Div(a, b) => {
            if !b.is_exact() {
                return Err(AffineError::NotAffine);
            }
            let den = exact_value(b).expect("exact");
            // x / 0 = 0; tokens keep a zero coefficient so their boxes still count.
            let k = den.recip().unwrap_or_else(Rational::zero);
            Ok(scale(linear(a)?, &k))
        }
    }
}

/// Normalizes an affine-reducible expression. Infeasible token declarations
/// are reported before affinity is checked.
pub fn to_affine(e: &Expr) -> Result<AffineForm, AffineError> {
    let boxes = e.effective_intervals()?;
    let (constant, coeffs) = linear(e)?;
    Ok(AffineForm {
        constant,
        coeffs,
        boxes,
    })
}

/// One token-consistent environment and the value it produces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sample {
    pub env: TokenEnv,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnclosureOutcome {
    /// No environment is token-consistent.
    EmptySet,
    /// Every rational in the interval is warranted, and nothing else.
    ExactInterval(Interval),
    /// Each `under` value is warranted; every warranted value lies in `over`.
    Unknown { under: Vec<Sample>, over: Extent },
}

impl EnclosureOutcome {
    pub fn exact_interval(&self) -> Option<&Interval> {
        match self {
            EnclosureOutcome::ExactInterval(i) => Some(i),
            _ => None,
        }
    }
}

pub fn affine_enclosure(f: &AffineForm) -> EnclosureOutcome {
    EnclosureOutcome::ExactInterval(f.range())
}

/// Token-blind interval arithmetic; contains the warranted enclosure.
pub fn over_approx(e: &Expr) -> Extent {
    blind_enclosure(&forget_tokens(e))
}

/// Interior sample fractions: 1/2, 1/4, 3/4, 1/8, 3/8, ...
///
/// Taking a prefix keeps the point set for `k` points a subset of the set
/// for `k + 1`, and gives evenly spaced points when `k - 1` is a power of two.
fn interior_fractions(count: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(count);
    let mut level: i64 = 2;
    while out.len() < count {
        let mut j = 1;
        while j < level && out.len() < count {
            out.push(Rational::new(j, level));
            j += 2;
        }
        level *= 2;
    }
    out
}

fn sample_points(i: &Interval, grid: usize) -> Vec<Rational> {
    if i.is_point() {
        return vec![i.lo().clone()];
    }
    let width = i.hi() - i.lo();
    let mut points = vec![i.lo().clone(), i.hi().clone()];
    points.extend(
        interior_fractions(grid.saturating_sub(2))
            .iter()
            .map(|f| i.lo() + &(&width * f)),
    );
    points
}

/// Lazily enumerates grid environments: all endpoint corners first, then the
/// remaining combinations, each phase in lexicographic token order.
pub struct EnvGrid {
    tokens: Vec<Token>,
    points: Vec<Vec<Rational>>,
    index: Vec<usize>,
    endpoint_phase: bool,
    done: bool,
}

impl EnvGrid {
    pub fn new(boxes: &BTreeMap<Token, Interval>, grid: usize) -> Self {
        let tokens: Vec<Token> = boxes.keys().cloned().collect();
        let points: Vec<Vec<Rational>> = boxes.values().map(|i| sample_points(i, grid)).collect();
        EnvGrid {
            index: vec![0; tokens.len()],
            tokens,
            points,
            endpoint_phase: true,
            done: false,
        }
    }

    /// Total number of environments the iterator will yield.
    pub fn size(&self) -> u128 {
        self.points
            .iter()
            .map(|p| p.len() as u128)
            .try_fold(1u128, |acc, n| acc.checked_mul(n))
            .unwrap_or(u128::MAX)
    }

    fn radix(&self, slot: usize) -> usize {
        if self.endpoint_phase {
            self.points[slot].len().min(2)
        } else {
            self.points[slot].len()
        }
    }

    fn advance(&mut self) {
        for slot in (0..self.index.len()).rev() {
            self.index[slot] += 1;
            if self.index[slot] < self.radix(slot) {
                return;
            }
            self.index[slot] = 0;
        }
        if self.endpoint_phase {
            self.endpoint_phase = false;
        } else {
            self.done = true;
        }
    }
}

impl Iterator for EnvGrid {
    type Item = TokenEnv;

    fn next(&mut self) -> Option<TokenEnv> {
        loop {
            if self.done {
                return None;
            }
            let in_endpoint_phase = self.endpoint_phase;
            let corner = self.index.iter().all(|&k| k < 2);
            let env: TokenEnv = self
                .tokens
                .iter()
                .zip(&self.index)
                .zip(&self.points)
                .map(|((t, &k), pts)| (t.clone(), pts[k].clone()))
                .collect();
            if self.tokens.is_empty() {
                self.done = true;
            } else {
                self.advance();
            }
            // Corners were already produced in the first phase.
            if in_endpoint_phase || !corner {
                return Some(env);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("grid needs {required} environments, budget is {budget}")]
pub struct BudgetExceeded {
    pub required: u128,
    pub budget: usize,
    /// The first `budget` samples in enumeration order.
    pub partial: Vec<Sample>,
}

/// Warranted values found on the sampling grid.
pub fn under_approx_samples(e: &Expr, cfg: &SampleConfig) -> Result<Vec<Sample>, BudgetExceeded> {
    let Ok(boxes) = e.effective_intervals() else {
        return Ok(Vec::new());
    };
    let grid = EnvGrid::new(&boxes, cfg.grid.max(2));
    let required = grid.size();
    let samples: Vec<Sample> = grid
        .take(cfg.budget)
        .filter(|env| token_consistent(env, e))
        .map(|env| Sample {
            value: eval(&env, e),
            env,
        })
        .collect();
    if required > cfg.budget as u128 {
        Err(BudgetExceeded {
            required,
            budget: cfg.budget,
            partial: samples,
        })
    } else {
        Ok(samples)
    }
}

/// How an exact enclosure was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Syntactically affine.
    Affine,
    /// Equal to an affine function after exact rational-function cancellation.
    Reduced,
}

/// A certified description of the enclosure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certified {
    Empty,
    Range { form: AffineForm, route: Route },
}

impl Certified {
    pub fn interval(&self) -> Option<Interval> {
        match self {
            Certified::Empty => None,
            Certified::Range { form, .. } => Some(form.range()),
        }
    }
}

/// Certifies the enclosure when possible: infeasible declarations, the affine
/// fragment, or a rational-function reduction to an affine form.
pub fn certify(e: &Expr) -> Option<Certified> {
    let boxes = match e.effective_intervals() {
        Ok(b) => b,
        Err(_) => return Some(Certified::Empty),
    };
    match to_affine(e) {
        Ok(form) => {
            return Some(Certified::Range {
                form,
                route: Route::Affine,
            })
        }
        Err(AffineError::Infeasible(_)) => return Some(Certified::Empty),
        Err(AffineError::NotAffine) => {}
    }
    let reduction = reduce_to_affine(e, &boxes)?;
    Some(Certified::Range {
        form: AffineForm {
            constant: reduction.constant,
            coeffs: reduction.coeffs,
            boxes,
        },
        route: Route::Reduced,
    })
}

/// The warranted enclosure. Only the affine fragment yields `ExactInterval`.
pub fn enclosure(e: &Expr, cfg: &SampleConfig) -> EnclosureOutcome {
    match to_affine(e) {
        Ok(form) => affine_enclosure(&form),
        Err(AffineError::Infeasible(_)) => EnclosureOutcome::EmptySet,
        Err(AffineError::NotAffine) => {
            let under = under_approx_samples(e, cfg).unwrap_or_else(|b| b.partial);
            EnclosureOutcome::Unknown {
                under,
                over: over_approx(e),
            }
        }
    }
}

/// Why a value is certainly not warranted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Refutation {
    /// The enclosure is empty.
    Empty,
    /// Outside an exactly known enclosure.
    OutsideExact { interval: Interval, route: Route },
    /// Outside the blind over-approximation.
    OutsideOver { interval: Interval },
}

impl Refutation {
    /// Re-checks that `q` is excluded by this refutation.
    pub fn excludes(&self, q: &Rational) -> bool {
        match self {
            Refutation::Empty => true,
            Refutation::OutsideExact { interval, .. } | Refutation::OutsideOver { interval } => {
                !interval.contains(q)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Membership {
    Holds { witness: TokenEnv },
    Fails { refutation: Refutation },
    Unknown,
}

fn first_hit(e: &Expr, envs: impl Iterator<Item = TokenEnv>, q: &Rational) -> Option<TokenEnv> {
    envs.filter(|env| token_consistent(env, e))
        .find(|env| &eval(env, e) == q)
}

/// Decides `q ∈ Encl(e)` where a certificate allows; otherwise searches the
/// sampling grid and the blind over-approximation.
pub fn membership(e: &Expr, q: &Rational, cfg: &SampleConfig) -> Membership {
    match certify(e) {
        Some(Certified::Empty) => Membership::Fails {
            refutation: Refutation::Empty,
        },
        Some(Certified::Range { form, route }) => {
            let range = form.range();
            if !range.contains(q) {
                return Membership::Fails {
                    refutation: Refutation::OutsideExact {
                        interval: range,
                        route,
                    },
                };
            }
            // Prefer a corner environment; fall back to the convex combination.
            let corners = EnvGrid::new(&form.boxes, 2).take(cfg.budget);
            let witness = first_hit(e, corners, q).or_else(|| form.witness(q));
            match witness {
                Some(w) if token_consistent(&w, e) && &eval(&w, e) == q => {
                    Membership::Holds { witness: w }
                }
                _ => Membership::Unknown,
            }
        }
        None => {
            let boxes = e.effective_intervals().expect("feasible when uncertified");
            let grid = EnvGrid::new(&boxes, cfg.grid).take(cfg.budget);
            if let Some(w) = first_hit(e, grid, q) {
                return Membership::Holds { witness: w };
            }
            match over_approx(e) {
                Extent::Bounded(interval) if !interval.contains(q) => Membership::Fails {
                    refutation: Refutation::OutsideOver { interval },
                },
                _ => Membership::Unknown,
            }
        }
    }
}
