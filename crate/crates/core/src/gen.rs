//! Random expression generators for property tests, acceptance runs and benches.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::expr::{Dim, Expr, Token};
use crate::families::{Family, FamilySpec, Mode};
use crate::interval::Interval;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_tokens: usize,
    pub max_nodes: usize,
    /// Numerators are drawn so values stay within `[-bound, bound]`.
    pub bound: i64,
    pub max_denominator: i64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_tokens: 4,
            max_nodes: 12,
            bound: 10,
            max_denominator: 8,
        }
    }
}

pub fn rational<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Rational {
    let den = rng.gen_range(1..=cfg.max_denominator);
    let num = rng.gen_range(-cfg.bound * den..=cfg.bound * den);
    Rational::new(num, den)
}

pub fn interval<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Interval {
    let a = rational(rng, cfg);
    let b = rational(rng, cfg);
    if a <= b {
        Interval::new(a, b).expect("ordered")
    } else {
        Interval::new(b, a).expect("ordered")
    }
}

/// Token pool with one base interval per token.
struct Pool {
    tokens: Vec<(Token, Interval)>,
    dim: Dim,
}

impl Pool {
    fn new<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Pool {
        let n = rng.gen_range(1..=cfg.max_tokens.max(1));
        Pool {
            tokens: (0..n)
                .map(|k| (Token::new(format!("t{k}")), interval(rng, cfg)))
                .collect(),
            dim: Dim::new("d"),
        }
    }

    /// A measured leaf. Occasionally declares a wider interval than the base,
    /// so effective intervals come from intersection.
    fn leaf<R: Rng + ?Sized>(&self, rng: &mut R) -> Expr {
        let (t, base) = self.tokens.choose(rng).expect("nonempty pool");
        let declared = if rng.gen_bool(0.15) {
            let pad = Rational::new(rng.gen_range(0..=4), rng.gen_range(1..=4));
            Interval::new(base.lo() - &pad, base.hi() + &pad).expect("widened")
        } else {
            base.clone()
        };
        Expr::meas(t, declared, &self.dim)
    }
}

fn split<R: Rng + ?Sized>(rng: &mut R, budget: usize) -> (usize, usize) {
    let left = rng.gen_range(1..budget - 1);
    (left, budget - 1 - left)
}

/// An expression with no measured leaves and at most `budget` nodes.
pub fn exact_expr<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, budget: usize) -> Expr {
    let d = Dim::new("d");
    if budget < 3 || rng.gen_bool(0.35) {
        if budget >= 2 && rng.gen_bool(0.2) {
            return Expr::neg(exact_expr(rng, cfg, budget - 1));
        }
        return Expr::Exact(rational(rng, cfg), d);
    }
    let (l, r) = split(rng, budget);
    let (a, b) = (exact_expr(rng, cfg, l), exact_expr(rng, cfg, r));
    match rng.gen_range(0..4) {
        0 => Expr::add(a, b),
        1 => Expr::sub(a, b),
        2 => Expr::mul(a, b),
        _ => Expr::div(a, b),
    }
}

fn affine_node<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, pool: &Pool, budget: usize) -> Expr {
    if budget < 3 || rng.gen_bool(0.25) {
        if budget >= 2 && rng.gen_bool(0.2) {
            return Expr::neg(affine_node(rng, cfg, pool, budget - 1));
        }
        return if rng.gen_bool(0.8) {
            pool.leaf(rng)
        } else {
            Expr::Exact(rational(rng, cfg), pool.dim.clone())
        };
    }
    let (l, r) = split(rng, budget);
    match rng.gen_range(0..5) {
        0 => Expr::add(affine_node(rng, cfg, pool, l), affine_node(rng, cfg, pool, r)),
        1 => Expr::sub(affine_node(rng, cfg, pool, l), affine_node(rng, cfg, pool, r)),
        2 => Expr::mul(exact_expr(rng, cfg, l), affine_node(rng, cfg, pool, r)),
        3 => Expr::mul(affine_node(rng, cfg, pool, l), exact_expr(rng, cfg, r)),
        _ => Expr::div(affine_node(rng, cfg, pool, l), exact_expr(rng, cfg, r)),
    }
}

/// An expression in the affine fragment.
pub fn affine_expr<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Expr {
    let pool = Pool::new(rng, cfg);
    let budget = rng.gen_range(1..=cfg.max_nodes);
    affine_node(rng, cfg, &pool, budget)
}

fn any_node<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, pool: &Pool, budget: usize) -> Expr {
    if budget < 3 || rng.gen_bool(0.25) {
        if budget >= 2 && rng.gen_bool(0.2) {
            return Expr::neg(any_node(rng, cfg, pool, budget - 1));
        }
        return if rng.gen_bool(0.75) {
            pool.leaf(rng)
        } else {
            Expr::Exact(rational(rng, cfg), pool.dim.clone())
        };
    }
    let (l, r) = split(rng, budget);
    let (a, b) = (any_node(rng, cfg, pool, l), any_node(rng, cfg, pool, r));
    match rng.gen_range(0..4) {
        0 => Expr::add(a, b),
        1 => Expr::sub(a, b),
        2 => Expr::mul(a, b),
        _ => Expr::div(a, b),
    }
}

/// An arbitrary expression, products and quotients of measurements included.
pub fn any_expr<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Expr {
    let pool = Pool::new(rng, cfg);
    let budget = rng.gen_range(1..=cfg.max_nodes);
    any_node(rng, cfg, &pool, budget)
}

/// A valid instance of `family` in `mode`, with small rational endpoints.
pub fn family_spec<R: Rng + ?Sized>(rng: &mut R, family: Family, mode: Mode) -> FamilySpec {
    let cfg = GenConfig::default();
    let nondegenerate = |rng: &mut R, positive: bool| loop {
        let i = interval(rng, &cfg);
        if !i.is_point() && (!positive || i.lo().is_positive()) {
            return i;
        }
    };
    let measured = nondegenerate(rng, family == Family::Division);
    let signal = (family == Family::Background).then(|| interval(rng, &cfg));
    FamilySpec {
        family,
        mode,
        interval: measured,
        signal,
        dim: Dim::new("d"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enclosure::to_affine;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_respect_their_fragments() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = GenConfig::default();
        for _ in 0..300 {
            let e = affine_expr(&mut rng, &cfg);
            assert!(e.node_count() <= cfg.max_nodes, "{e}");
            assert!(e.tokens().len() <= cfg.max_tokens);
            assert!(to_affine(&e).is_ok(), "{e}");
            assert!(exact_expr(&mut rng, &cfg, 7).is_exact());
            assert!(any_expr(&mut rng, &cfg).node_count() <= cfg.max_nodes);
        }
    }

    #[test]
    fn family_specs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for family in [Family::Cancellation, Family::Background, Family::Division] {
            for _ in 0..50 {
                assert!(family_spec(&mut rng, family, Mode::Same).validate().is_ok());
            }
        }
    }
}
