//! Independent re-validation of emitted evidence.
//!
//! Every witness environment is re-evaluated with the structural semantics and
//! every certificate is recomputed from the expression it refers to.

use thiserror::Error;

use crate::enclosure::{certify, over_approx, Certified, EnclosureOutcome, Refutation};
use crate::expr::Expr;
use crate::interval::{Extent, Interval};
use crate::rational::Rational;
use crate::rewrite::{Classification, Evidence, TargetBound, Verdict3};
use crate::semantics::{eval, token_consistent, TokenEnv};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("witness environment is not token-consistent with `{expr}`")]
    Inconsistent { expr: String },
    #[error("witness evaluates `{expr}` to {actual}, claimed {claimed}")]
    WrongValue {
        expr: String,
        claimed: Rational,
        actual: Rational,
    },
    #[error("certificate for `{expr}` does not reproduce: {detail}")]
    Certificate { expr: String, detail: String },
    #[error("refutation does not exclude {value}")]
    NotExcluded { value: Rational },
}

/// `env` is consistent with `e` and evaluates it to `value`.
pub fn check_witness(e: &Expr, env: &TokenEnv, value: &Rational) -> Result<(), AuditError> {
    if !token_consistent(env, e) {
        return Err(AuditError::Inconsistent { expr: e.to_string() });
    }
    let actual = eval(env, e);
    if &actual != value {
        return Err(AuditError::WrongValue {
            expr: e.to_string(),
            claimed: value.clone(),
            actual,
        });
    }
    Ok(())
}

fn certificate_error(e: &Expr, detail: impl Into<String>) -> AuditError {
    AuditError::Certificate {
        expr: e.to_string(),
        detail: detail.into(),
    }
}

fn certified_interval(e: &Expr) -> Result<Interval, AuditError> {
    match certify(e) {
        Some(Certified::Range { form, .. }) => Ok(form.range()),
        Some(Certified::Empty) => Err(certificate_error(e, "enclosure is empty")),
        None => Err(certificate_error(e, "enclosure is not certified")),
    }
}

/// The refutation is a true statement about `e` and excludes `value`.
pub fn check_refutation(e: &Expr, refutation: &Refutation, value: &Rational) -> Result<(), AuditError> {
    match refutation {
        Refutation::Empty => {
            if e.effective_intervals().is_ok() {
                return Err(certificate_error(e, "claimed empty but declarations are feasible"));
            }
        }
        Refutation::OutsideExact { interval, .. } => {
            let actual = certified_interval(e)?;
            if &actual != interval {
                return Err(certificate_error(e, format!("claimed {interval}, recomputed {actual}")));
            }
        }
        Refutation::OutsideOver { interval } => {
            let actual = over_approx(e);
            if actual != Extent::Bounded(interval.clone()) {
                return Err(certificate_error(e, format!("claimed over {interval}, recomputed {actual}")));
            }
        }
    }
    if refutation.excludes(value) {
        Ok(())
    } else {
        Err(AuditError::NotExcluded { value: value.clone() })
    }
}

/// Re-validates the evidence of a verdict for `src ⇝ tgt`.
pub fn check_verdict(src: &Expr, tgt: &Expr, verdict: &Verdict3) -> Result<(), AuditError> {
    match verdict {
        Verdict3::Unknown { .. } => Ok(()),
        Verdict3::Fails { counterexample: c } => {
            check_witness(tgt, &c.env, &c.value)?;
            check_refutation(src, &c.refutation, &c.value)
        }
        Verdict3::Holds { evidence } => match evidence {
            Evidence::Identical => {
                if src.same_shape(tgt) {
                    Ok(())
                } else {
                    Err(certificate_error(tgt, "not identical to the source"))
                }
            }
            Evidence::Vacuous => {
                if tgt.effective_intervals().is_err() {
                    Ok(())
                } else {
                    Err(certificate_error(tgt, "claimed empty but declarations are feasible"))
                }
            }
            Evidence::Witness { env, value } => {
                check_witness(src, env, value)?;
                let t = certified_interval(tgt)?;
                if t == Interval::point(value.clone()) {
                    Ok(())
                } else {
                    Err(certificate_error(tgt, format!("enclosure {t} is not the singleton {{{value}}}")))
                }
            }
            Evidence::Containment { target, source, .. } => {
                let s = certified_interval(src)?;
                if &s != source {
                    return Err(certificate_error(src, format!("claimed {source}, recomputed {s}")));
                }
                let t = match target {
                    TargetBound::Exact { interval, .. } => {
                        let t = certified_interval(tgt)?;
                        if &t != interval {
                            return Err(certificate_error(tgt, format!("claimed {interval}, recomputed {t}")));
                        }
                        t
                    }
                    TargetBound::Over { interval } => {
                        if over_approx(tgt) != Extent::Bounded(interval.clone()) {
                            return Err(certificate_error(tgt, "over-approximation does not reproduce"));
                        }
                        interval.clone()
                    }
                };
                if t.is_subset_of(&s) {
                    Ok(())
                } else {
                    Err(certificate_error(tgt, format!("{t} is not inside {s}")))
                }
            }
        },
    }
}

pub fn check_classification(src: &Expr, tgt: &Expr, c: &Classification) -> Result<(), AuditError> {
    check_verdict(src, tgt, &c.forward)?;
    check_verdict(tgt, src, &c.backward)
}

/// Under-witnesses re-evaluate and lie inside the over-approximation.
pub fn check_enclosure(e: &Expr, outcome: &EnclosureOutcome) -> Result<(), AuditError> {
    match outcome {
        EnclosureOutcome::EmptySet => {
            if e.effective_intervals().is_err() {
                Ok(())
            } else {
                Err(certificate_error(e, "claimed empty but declarations are feasible"))
            }
        }
        EnclosureOutcome::ExactInterval(i) => {
            let actual = certified_interval(e)?;
            if &actual == i {
                Ok(())
            } else {
                Err(certificate_error(e, format!("claimed {i}, recomputed {actual}")))
            }
        }
        EnclosureOutcome::Unknown { under, over } => {
            for s in under {
                check_witness(e, &s.env, &s.value)?;
                if !over.may_contain(&s.value) {
                    return Err(certificate_error(e, format!("witness {} outside {over}", s.value)));
                }
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enclosure::SampleConfig;
    use crate::expr::Token;
    use crate::rewrite::{classify, Counterexample};
    use crate::syntax::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn classifications_audit_clean() {
        let cfg = SampleConfig::default();
        for (a, b) in [
            ("meas(t1,[2,5],d)-meas(t2,[2,5],d)", "exact(0,d)"),
            ("meas(t,[1,2],d)/meas(t,[1,2],d)", "exact(1,d)"),
            ("meas(t1,[1,2],d)/meas(t2,[1,2],d)", "exact(1,d)"),
            ("(meas(ts,[10,11],d)+meas(tb1,[1,2],d))-meas(tb2,[1,2],d)", "meas(ts,[10,11],d)"),
        ] {
            let c = classify(&p(a), &p(b), &cfg);
            check_classification(&p(a), &p(b), &c).unwrap();
        }
    }

    #[test]
    fn forged_counterexample_is_caught() {
        let forged = Verdict3::Fails {
            counterexample: Counterexample {
                env: TokenEnv::new().with(&Token::new("t"), 9),
                value: 0.into(),
                refutation: Refutation::Empty,
            },
        };
        let err = check_verdict(&p("exact(0,d)"), &p("meas(t,[2,5],d)-meas(t,[2,5],d)"), &forged);
        assert!(matches!(err, Err(AuditError::Inconsistent { .. })));
    }

    #[test]
    fn wrong_certificate_is_caught() {
        let forged = Verdict3::Fails {
            counterexample: Counterexample {
                env: TokenEnv::new().with(&Token::new("t"), 2),
                value: 2.into(),
                refutation: Refutation::OutsideExact {
                    interval: Interval::ints(3, 4),
                    route: crate::enclosure::Route::Affine,
                },
            },
        };
        let err = check_verdict(&p("meas(u,[0,9],d)"), &p("meas(t,[2,5],d)"), &forged);
        assert!(matches!(err, Err(AuditError::Certificate { .. })));
    }
}
