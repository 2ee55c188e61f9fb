use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use warrant_core::audit::{check_classification, check_enclosure};
use warrant_core::enclosure::{affine_enclosure, EnvGrid};
use warrant_core::gen::{self, GenConfig};
use warrant_core::{
    blind_enclosure, certify, check_conservativity, classify, enclosure, eval, exact_value,
    forget_tokens, licensed, membership, over_approx, to_affine, token_consistent,
    under_approx_samples, Dim, EnclosureOutcome, Expr, Extent, Interval, Membership, Rational,
    RewriteClass, SampleConfig, Token, TokenEnv,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cfg() -> GenConfig {
    GenConfig::default()
}

fn meas(t: &str, i: Interval) -> Expr {
    Expr::meas(&Token::new(t), i, &Dim::new("d"))
}

/// Environments over the declared intervals plus a stray token, in and out of range.
fn probe_envs(e: &Expr, r: &mut ChaCha8Rng) -> Vec<TokenEnv> {
    let mut tokens = Vec::new();
    e.for_each_meas(&mut |t, i, _| tokens.push((t.clone(), i.clone())));
    (0..8)
        .map(|_| {
            let mut env = TokenEnv::new();
            for (t, i) in &tokens {
                let v = if r.gen_bool(0.8) {
                    let w = i.hi() - i.lo();
                    i.lo() + &(&w * &Rational::new(r.gen_range(0..=4), 4))
                } else {
                    gen::rational(r, &cfg())
                };
                env.bind(t.clone(), v);
            }
            env
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eval_ignores_tokens_not_in_the_expression(seed in any::<u64>(), v in -50i64..50) {
        let mut r = rng(seed);
        let e = gen::any_expr(&mut r, &cfg());
        for env in probe_envs(&e, &mut r) {
            let stray = env.clone().with(&Token::new("unrelated"), v);
            prop_assert_eq!(eval(&env, &e), eval(&stray, &e));
            prop_assert_eq!(token_consistent(&env, &e), token_consistent(&stray, &e));
        }
    }

    #[test]
    fn exact_expressions_ignore_the_environment(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = gen::exact_expr(&mut r, &cfg(), 9);
        let value = exact_value(&e).unwrap();
        let env = TokenEnv::new().with(&Token::new("t"), gen::rational(&mut r, &cfg()));
        prop_assert_eq!(eval(&env, &e), value.clone());
        prop_assert!(token_consistent(&env, &e));
        prop_assert_eq!(enclosure(&e, &SampleConfig::default()), EnclosureOutcome::ExactInterval(Interval::point(value)));
    }

    #[test]
    fn consistency_is_membership_in_effective_intervals(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = gen::any_expr(&mut r, &cfg());
        let boxes = e.effective_intervals().unwrap();
        for env in probe_envs(&e, &mut r) {
            let inside = boxes.iter().all(|(t, i)| i.contains(&env.get(t)));
            prop_assert_eq!(token_consistent(&env, &e), inside);
        }
    }

    #[test]
    fn enclosure_evidence_is_sound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = gen::any_expr(&mut r, &cfg());
        let out = enclosure(&e, &SampleConfig::default());
        prop_assert!(check_enclosure(&e, &out).is_ok(), "{}: {:?}", e, out);
        let over = over_approx(&e);
        for env in probe_envs(&e, &mut r) {
            if token_consistent(&env, &e) {
                let v = eval(&env, &e);
                prop_assert!(over.may_contain(&v), "{} at {:?}: {} outside {}", e, env, v, over);
                if let EnclosureOutcome::ExactInterval(i) = &out {
                    prop_assert!(i.contains(&v));
                }
            }
        }
    }

    #[test]
    fn over_approximation_is_the_blind_enclosure(seed in any::<u64>()) {
        let e = gen::any_expr(&mut rng(seed), &cfg());
        prop_assert_eq!(over_approx(&e), blind_enclosure(&forget_tokens(&e)));
    }

    #[test]
    fn erasure_forgets_token_names(seed in any::<u64>()) {
        let e = gen::any_expr(&mut rng(seed), &cfg());
        let renamed = e.rename_tokens(&|t: &Token| Token::new(format!("{}_x", t.name())));
        let merged = e.rename_tokens(&|_: &Token| Token::new("one"));
        prop_assert_eq!(forget_tokens(&renamed), forget_tokens(&e));
        prop_assert_eq!(blind_enclosure(&forget_tokens(&merged)), blind_enclosure(&forget_tokens(&e)));
    }

    #[test]
    fn affine_enclosure_matches_corner_enumeration(seed in any::<u64>()) {
        let e = gen::affine_expr(&mut rng(seed), &cfg());
        let boxes = e.effective_intervals().unwrap();
        let values: Vec<Rational> = EnvGrid::new(&boxes, 2).map(|env| eval(&env, &e)).collect();
        let expected = Interval::hull_of(&values).unwrap();
        prop_assert_eq!(affine_enclosure(&to_affine(&e).unwrap()), EnclosureOutcome::ExactInterval(expected));
    }

    #[test]
    fn grid_refinement_only_adds_samples(seed in any::<u64>(), k in 2usize..6) {
        let e = gen::any_expr(&mut rng(seed), &GenConfig { max_tokens: 3, ..cfg() });
        let at = |grid| {
            let c = SampleConfig::new(grid, 100_000).unwrap();
            under_approx_samples(&e, &c).unwrap().into_iter().map(|s| s.env.to_string()).collect::<BTreeSet<_>>()
        };
        let (coarse, fine) = (at(k), at(k + 1));
        prop_assert!(coarse.is_subset(&fine));
        if !e.tokens().is_empty() {
            prop_assert!(coarse.len() < fine.len() || coarse.len() == 1);
        }
    }

    #[test]
    fn empty_enclosure_iff_no_consistent_environment(a in -6i64..6, b in 0i64..4, c in -6i64..6, d in 0i64..4) {
        let (i, j) = (Interval::ints(a, a + b), Interval::ints(c, c + d));
        let e = Expr::mul(meas("t", i.clone()), Expr::add(meas("t", j.clone()), meas("u", Interval::ints(0, 1))));
        let out = enclosure(&e, &SampleConfig::default());
        let feasible = i.intersect(&j).is_some();
        prop_assert_eq!(out == EnclosureOutcome::EmptySet, !feasible);
        let wide = SampleConfig::new(9, 100_000).unwrap();
        prop_assert_eq!(under_approx_samples(&e, &wide).unwrap().is_empty(), !feasible);
    }

    #[test]
    fn licensing_is_reflexive(seed in any::<u64>()) {
        let e = gen::any_expr(&mut rng(seed), &cfg());
        prop_assert!(licensed(&e, &e, &SampleConfig::default()).holds());
        prop_assert_eq!(classify(&e, &e, &SampleConfig::default()).class, RewriteClass::Interchangeable);
    }

    #[test]
    fn classes_decompose_into_directions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = if r.gen_bool(0.5) {
            (gen::affine_expr(&mut r, &cfg()), gen::affine_expr(&mut r, &cfg()))
        } else {
            (gen::any_expr(&mut r, &cfg()), gen::any_expr(&mut r, &cfg()))
        };
        let c = classify(&a, &b, &SampleConfig::default());
        prop_assert!(check_classification(&a, &b, &c).is_ok());
        let expected = match (c.forward.holds(), c.forward.fails(), c.backward.holds(), c.backward.fails()) {
            (true, _, true, _) => RewriteClass::Interchangeable,
            (true, _, _, true) => RewriteClass::OneWayOnlyForward,
            (_, true, true, _) => RewriteClass::OneWayOnlyBackward,
            (_, true, _, true) => RewriteClass::Incomparable,
            _ => RewriteClass::Undetermined,
        };
        prop_assert_eq!(c.class, expected);
    }

    #[test]
    fn affine_pairs_are_always_decided(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (gen::affine_expr(&mut r, &cfg()), gen::affine_expr(&mut r, &cfg()));
        let c = classify(&a, &b, &SampleConfig::default());
        prop_assert!(c.class.is_decided(), "{} vs {}", a, b);
        let (ia, ib) = (certify(&a).unwrap().interval().unwrap(), certify(&b).unwrap().interval().unwrap());
        prop_assert_eq!(c.forward.holds(), ib.is_subset_of(&ia));
        prop_assert_eq!(c.backward.holds(), ia.is_subset_of(&ib));
    }

    #[test]
    fn licensing_is_transitive_on_certified_pairs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let small = GenConfig { max_tokens: 2, max_nodes: 5, ..cfg() };
        let es: Vec<Expr> = (0..3).map(|_| gen::affine_expr(&mut r, &small)).collect();
        let sc = SampleConfig::default();
        if licensed(&es[0], &es[1], &sc).holds() && licensed(&es[1], &es[2], &sc).holds() {
            prop_assert!(licensed(&es[0], &es[2], &sc).holds());
        }
        let nested: Vec<Expr> = [(-4, 4), (-2, 3), (0, 1)].iter().enumerate()
            .map(|(k, &(lo, hi))| meas(&format!("n{k}"), Interval::ints(lo, hi)))
            .collect();
        prop_assert!(licensed(&nested[0], &nested[1], &sc).holds());
        prop_assert!(licensed(&nested[1], &nested[2], &sc).holds());
        prop_assert!(licensed(&nested[0], &nested[2], &sc).holds());
    }

    #[test]
    fn exact_targets_reduce_to_membership(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = gen::any_expr(&mut r, &cfg());
        let q = gen::rational(&mut r, &cfg());
        let sc = SampleConfig::default();
        let verdict = licensed(&e, &Expr::Exact(q.clone(), Dim::new("d")), &sc);
        match membership(&e, &q, &sc) {
            Membership::Holds { .. } => prop_assert!(verdict.holds()),
            Membership::Fails { .. } => prop_assert!(verdict.fails()),
            Membership::Unknown => prop_assert!(verdict.is_unknown()),
        }
    }

    #[test]
    fn exact_fragment_is_conservative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let small = GenConfig { bound: 2, max_denominator: 2, ..cfg() };
        let a = gen::exact_expr(&mut r, &small, 5);
        let b = gen::exact_expr(&mut r, &small, 5);
        prop_assert_eq!(check_conservativity(&a, &b, &SampleConfig::default()), Ok(true));
    }

    #[test]
    fn interval_operations_contain_pointwise_results(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (i, j) = (gen::interval(&mut r, &cfg()), gen::interval(&mut r, &cfg()));
        let pick = |r: &mut ChaCha8Rng, i: &Interval| {
            let w = i.hi() - i.lo();
            i.lo() + &(&w * &Rational::new(r.gen_range(0..=8), 8))
        };
        let (x, y) = (pick(&mut r, &i), pick(&mut r, &j));
        prop_assert!(i.add(&j).contains(&(&x + &y)));
        prop_assert!(i.sub(&j).contains(&(&x - &y)));
        prop_assert!(i.mul(&j).contains(&(&x * &y)));
        prop_assert!(i.neg().contains(&-x.clone()));
        prop_assert!(i.div(&j).may_contain(&x.div_total(&y)));
    }
}

#[test]
fn conservativity_rejects_measured_inputs() {
    let m = meas("t", Interval::ints(0, 1));
    assert!(check_conservativity(&m, &Expr::exact(1, &Dim::new("d")), &SampleConfig::default()).is_err());
}

#[test]
fn fails_verdicts_carry_target_values_outside_the_source() {
    let mut r = rng(99);
    let sc = SampleConfig::default();
    let mut seen = 0;
    for _ in 0..300 {
        let (a, b) = (gen::any_expr(&mut r, &cfg()), gen::any_expr(&mut r, &cfg()));
        let c = classify(&a, &b, &sc);
        check_classification(&a, &b, &c).unwrap();
        for (src, tgt, v) in [(&a, &b, &c.forward), (&b, &a, &c.backward)] {
            if let warrant_core::Verdict3::Fails { counterexample } = v {
                assert!(token_consistent(&counterexample.env, tgt));
                assert_eq!(eval(&counterexample.env, tgt), counterexample.value);
                let blind = over_approx(src);
                if let Extent::Bounded(i) = blind {
                    if !i.contains(&counterexample.value) {
                        seen += 1;
                    }
                }
                assert!(counterexample.refutation.excludes(&counterexample.value));
            }
        }
    }
    assert!(seen > 0);
}
