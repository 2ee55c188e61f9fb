//! Rewrite classification over warranted enclosures.
//!
//! `src ⇝ tgt` holds when `Encl(tgt) ⊆ Encl(src)`. Both directions together
//! give interchangeability. Because no general decision procedure exists, each
//! direction is a three-valued verdict carrying evidence that can be
//! re-checked independently (see [`crate::audit`]).

use serde::Serialize;
use thiserror::Error;

use crate::enclosure::{
    certify, membership, over_approx, under_approx_samples, Certified, Membership, Refutation,
    Route, Sample, SampleConfig,
};
use crate::expr::Expr;
use crate::interval::{Extent, Interval};
use crate::rational::Rational;
use crate::semantics::{eval, exact_value, TokenEnv};

/// What is known about the target's enclosure in a containment proof.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetBound {
    Exact { interval: Interval, route: Route },
    Over { interval: Interval },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// Source and target are the same expression up to dimension tags.
    Identical,
    /// The target admits no consistent environment.
    Vacuous,
    /// The target's enclosure is `{value}` and `env` realizes it in the source.
    Witness { env: TokenEnv, value: Rational },
    /// The target's enclosure lies inside the source's exact enclosure.
    Containment {
        target: TargetBound,
        source: Interval,
        source_route: Route,
    },
}

/// A value warranted by the target, certified absent from the source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Token-consistent for the target.
    pub env: TokenEnv,
    pub value: Rational,
    pub refutation: Refutation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict3 {
    Holds { evidence: Evidence },
    Fails { counterexample: Counterexample },
    Unknown { reason: String, target_samples: usize },
}

impl Verdict3 {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict3::Holds { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict3::Fails { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict3::Unknown { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RewriteClass {
    Interchangeable,
    OneWayOnlyForward,
    OneWayOnlyBackward,
    /// Each direction is refuted.
    Incomparable,
    Undetermined,
}

impl RewriteClass {
    pub fn is_decided(self) -> bool {
        self != RewriteClass::Undetermined
    }

    pub fn is_one_way(self) -> bool {
        matches!(
            self,
            RewriteClass::OneWayOnlyForward | RewriteClass::OneWayOnlyBackward
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub class: RewriteClass,
    /// `src ⇝ tgt`
    pub forward: Verdict3,
    /// `tgt ⇝ src`
    pub backward: Verdict3,
}

fn refute(src_cert: &Option<Certified>, src_over: &Extent, v: &Rational) -> Option<Refutation> {
    match src_cert {
        Some(Certified::Empty) => Some(Refutation::Empty),
        Some(Certified::Range { form, route }) => {
            let interval = form.range();
            (!interval.contains(v)).then_some(Refutation::OutsideExact {
                interval,
                route: *route,
            })
        }
        None => match src_over {
            Extent::Bounded(interval) if !interval.contains(v) => Some(Refutation::OutsideOver {
                interval: interval.clone(),
            }),
            _ => None,
        },
    }
}

fn fails(env: TokenEnv, value: Rational, refutation: Refutation) -> Verdict3 {
    Verdict3::Fails {
        counterexample: Counterexample {
            env,
            value,
            refutation,
        },
    }
}

/// Decides `Encl(tgt) ⊆ Encl(src)` where possible.
///
/// Order of attempts: identical expressions; an empty or singleton target
/// (membership of its one value); two certified enclosures (interval
/// containment); a target witness outside the source; the target's blind
/// over-approximation inside the source's exact enclosure.
pub fn licensed(src: &Expr, tgt: &Expr, cfg: &SampleConfig) -> Verdict3 {
    if src.same_shape(tgt) {
        return Verdict3::Holds {
            evidence: Evidence::Identical,
        };
    }
    let tgt_cert = certify(tgt);
    match &tgt_cert {
        Some(Certified::Empty) => {
            return Verdict3::Holds {
                evidence: Evidence::Vacuous,
            }
        }
        Some(Certified::Range { form, .. }) if form.range().is_point() => {
            let q = form.range().lo().clone();
            return match membership(src, &q, cfg) {
                Membership::Holds { witness } => Verdict3::Holds {
                    evidence: Evidence::Witness {
                        env: witness,
                        value: q,
                    },
                },
                Membership::Fails { refutation } => fails(form.corner(false), q, refutation),
                Membership::Unknown => Verdict3::Unknown {
                    reason: format!("membership of {q} in the source enclosure is undecided"),
                    target_samples: 0,
                },
            };
        }
        _ => {}
    }

    let src_cert = certify(src);
    if let Some(Certified::Range { form: tf, route: tr }) = &tgt_cert {
        let t = tf.range();
        match &src_cert {
            Some(Certified::Empty) => {
                let env = tf.corner(false);
                return fails(env, t.lo().clone(), Refutation::Empty);
            }
            Some(Certified::Range { form: sf, route: sr }) => {
                let s = sf.range();
                if t.is_subset_of(&s) {
                    return Verdict3::Holds {
                        evidence: Evidence::Containment {
                            target: TargetBound::Exact {
                                interval: t,
                                route: *tr,
                            },
                            source: s,
                            source_route: *sr,
                        },
                    };
                }
                let (env, value) = if t.hi() > s.hi() {
                    (tf.corner(true), t.hi().clone())
                } else {
                    (tf.corner(false), t.lo().clone())
                };
                return fails(
                    env,
                    value,
                    Refutation::OutsideExact {
                        interval: s,
                        route: *sr,
                    },
                );
            }
            None => {}
        }
    }

    // Refutation by target witnesses.
    let src_over = over_approx(src);
    let witnesses: Vec<Sample> = match &tgt_cert {
        Some(Certified::Range { form, .. }) => [form.corner(false), form.corner(true)]
            .into_iter()
            .map(|env| Sample {
                value: eval(&env, tgt),
                env,
            })
            .collect(),
        _ => under_approx_samples(tgt, cfg).unwrap_or_else(|b| b.partial),
    };
    for w in &witnesses {
        if let Some(r) = refute(&src_cert, &src_over, &w.value) {
            return fails(w.env.clone(), w.value.clone(), r);
        }
    }

    // Confirmation through the target's blind over-approximation.
    if let Some(Certified::Range { form: sf, route: sr }) = &src_cert {
        let s = sf.range();
        if let Extent::Bounded(over) = over_approx(tgt) {
            if over.is_subset_of(&s) {
                return Verdict3::Holds {
                    evidence: Evidence::Containment {
                        target: TargetBound::Over { interval: over },
                        source: s,
                        source_route: *sr,
                    },
                };
            }
        }
    }

    Verdict3::Unknown {
        reason: "no certified containment and no refuting witness".into(),
        target_samples: witnesses.len(),
    }
}

pub fn classify(src: &Expr, tgt: &Expr, cfg: &SampleConfig) -> Classification {
    let forward = licensed(src, tgt, cfg);
    let backward = licensed(tgt, src, cfg);
    let class = match (&forward, &backward) {
        (Verdict3::Holds { .. }, Verdict3::Holds { .. }) => RewriteClass::Interchangeable,
        (Verdict3::Holds { .. }, Verdict3::Fails { .. }) => RewriteClass::OneWayOnlyForward,
        (Verdict3::Fails { .. }, Verdict3::Holds { .. }) => RewriteClass::OneWayOnlyBackward,
        (Verdict3::Fails { .. }, Verdict3::Fails { .. }) => RewriteClass::Incomparable,
        _ => RewriteClass::Undetermined,
    };
    Classification {
        class,
        forward,
        backward,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("conservativity check needs two expressions without measured leaves")]
pub struct PreconditionViolated;

/// On exact expressions, `classify` must say Interchangeable exactly when the
/// values agree and Incomparable otherwise.
pub fn check_conservativity(
    e: &Expr,
    e2: &Expr,
    cfg: &SampleConfig,
) -> Result<bool, PreconditionViolated> {
    let (Ok(a), Ok(b)) = (exact_value(e), exact_value(e2)) else {
        return Err(PreconditionViolated);
    };
    let expected = if a == b {
        RewriteClass::Interchangeable
    } else {
        RewriteClass::Incomparable
    };
    Ok(classify(e, e2, cfg).class == expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Token;
    use crate::syntax::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn cfg() -> SampleConfig {
        SampleConfig::default()
    }

    #[test]
    fn distinct_cancellation_forward_holds_with_shared_endpoint() {
        let v = licensed(&p("meas(t1,[2,5],d)-meas(t2,[2,5],d)"), &p("exact(0,d)"), &cfg());
        let env = TokenEnv::new().with(&Token::new("t1"), 2).with(&Token::new("t2"), 2);
        assert_eq!(
            v,
            Verdict3::Holds {
                evidence: Evidence::Witness { env, value: 0.into() }
            }
        );
    }

    #[test]
    fn distinct_cancellation_backward_fails_at_width() {
        let v = licensed(&p("exact(0,d)"), &p("meas(t1,[2,5],d)-meas(t2,[2,5],d)"), &cfg());
        let Verdict3::Fails { counterexample } = v else {
            panic!("expected failure, got {v:?}");
        };
        assert_eq!(counterexample.value, 3);
        assert_eq!(
            counterexample.env,
            TokenEnv::new().with(&Token::new("t1"), 5).with(&Token::new("t2"), 2)
        );
    }

    #[test]
    fn reflexive_even_off_the_affine_fragment() {
        for s in [
            "meas(t1,[1,2],d)/meas(t2,[1,2],d)",
            "meas(a,[-1,1],d)*meas(b,[-1,1],d)/meas(a,[-1,1],d)",
            "exact(3,d)",
        ] {
            assert!(licensed(&p(s), &p(s), &cfg()).holds(), "{s}");
        }
    }

    #[test]
    fn family_classes() {
        let c = |a: &str, b: &str| classify(&p(a), &p(b), &cfg()).class;
        assert_eq!(c("meas(t,[2,5],d)-meas(t,[2,5],d)", "exact(0,d)"), RewriteClass::Interchangeable);
        assert_eq!(c("meas(t1,[2,5],d)-meas(t2,[2,5],d)", "exact(0,d)"), RewriteClass::OneWayOnlyForward);
        assert_eq!(c("exact(0,d)", "meas(t1,[2,5],d)-meas(t2,[2,5],d)"), RewriteClass::OneWayOnlyBackward);
        assert_eq!(c("exact(2,d)+exact(2,d)", "exact(5,d)"), RewriteClass::Incomparable);
        assert_eq!(c("meas(t,[1,2],d)/meas(t,[1,2],d)", "exact(1,d)"), RewriteClass::Interchangeable);
        assert_eq!(c("meas(t1,[1,2],d)/meas(t2,[1,2],d)", "exact(1,d)"), RewriteClass::OneWayOnlyForward);
    }

    #[test]
    fn zero_touching_self_division_is_not_interchangeable() {
        // With 0 in the interval, t/t takes both 0 and 1.
        let c = classify(&p("meas(t,[0,2],d)/meas(t,[0,2],d)"), &p("exact(1,d)"), &cfg());
        assert_eq!(c.class, RewriteClass::OneWayOnlyForward);
    }

    #[test]
    fn empty_target_is_licensed_by_anything() {
        let v = licensed(&p("exact(4,d)"), &p("meas(t,[0,1],d)+meas(t,[2,3],d)"), &cfg());
        assert_eq!(v, Verdict3::Holds { evidence: Evidence::Vacuous });
        let back = licensed(&p("meas(t,[0,1],d)+meas(t,[2,3],d)"), &p("exact(4,d)"), &cfg());
        assert!(matches!(
            back,
            Verdict3::Fails { counterexample: Counterexample { refutation: Refutation::Empty, .. } }
        ));
    }

    #[test]
    fn blind_over_confirms_containment() {
        // Target is non-affine but its blind range [1/4, 1] sits inside [0, 2].
        let v = licensed(
            &p("meas(s,[0,2],d)"),
            &p("meas(a,[1/2,1],d)*meas(b,[1/2,1],d)"),
            &cfg(),
        );
        assert!(matches!(
            v,
            Verdict3::Holds { evidence: Evidence::Containment { target: TargetBound::Over { .. }, .. } }
        ));
    }

    #[test]
    fn undetermined_is_reported() {
        // Equal enclosures, but neither side is certified and no sample separates them.
        let c = classify(
            &p("meas(a,[1,2],d)/meas(b,[1,2],d)"),
            &p("meas(c,[1,2],d)/meas(e,[1,2],d)"),
            &cfg(),
        );
        assert_eq!(c.class, RewriteClass::Undetermined);
        assert!(c.forward.is_unknown() && c.backward.is_unknown());
    }

    #[test]
    fn conservativity_checks() {
        assert_eq!(check_conservativity(&p("exact(3,d)+exact(4,d)"), &p("exact(7,d)"), &cfg()), Ok(true));
        assert_eq!(check_conservativity(&p("exact(3,d)"), &p("exact(4,d)"), &cfg()), Ok(true));
        assert_eq!(check_conservativity(&p("exact(1,d)/exact(0,d)"), &p("exact(0,d)"), &cfg()), Ok(true));
        assert_eq!(
            check_conservativity(&p("meas(t,[0,1],d)"), &p("exact(0,d)"), &cfg()),
            Err(PreconditionViolated)
        );
    }

    #[test]
    fn dimension_tags_are_ignored() {
        let c = classify(&p("meas(t,[2,5],m)-meas(t,[2,5],m)"), &p("exact(0,s)"), &cfg());
        assert_eq!(c.class, RewriteClass::Interchangeable);
    }
}
