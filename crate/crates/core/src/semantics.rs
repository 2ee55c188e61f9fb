//! Hidden-value environments and structural evaluation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Expr, Token};
use crate::rational::Rational;

/// Assignment of one hidden exact value per observation token.
///
/// Unbound tokens read as zero, so lookup is total.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenEnv {
    bindings: BTreeMap<Token, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvParseError {
    #[error("line {line}: expected `token = rational`")]
    Malformed { line: usize },
    #[error("line {line}: invalid token name `{name}`")]
    BadToken { line: usize, name: String },
    #[error("line {line}: {source}")]
    BadValue {
        line: usize,
        source: crate::rational::RationalError,
    },
    #[error("line {line}: token `{name}` bound twice")]
    Duplicate { line: usize, name: String },
}

impl TokenEnv {
    pub fn new() -> Self {
        TokenEnv::default()
    }

    pub fn with(mut self, t: &Token, v: impl Into<Rational>) -> Self {
        self.bind(t.clone(), v.into());
        self
    }

    pub fn bind(&mut self, t: Token, v: Rational) {
        self.bindings.insert(t, v);
    }

    pub fn get(&self, t: &Token) -> Rational {
        self.bindings.get(t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn bindings(&self) -> &BTreeMap<Token, Rational> {
        &self.bindings
    }

    /// Parses the line-oriented `token = rational` format; `#` starts a comment.
    pub fn parse(text: &str) -> Result<TokenEnv, EnvParseError> {
        let mut env = TokenEnv::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (name, value) = content
                .split_once('=')
                .ok_or(EnvParseError::Malformed { line })?;
            let name = name.trim();
            let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(EnvParseError::BadToken {
                    line,
                    name: name.to_string(),
                });
            }
            let value: Rational = value
                .trim()
                .parse()
                .map_err(|source| EnvParseError::BadValue { line, source })?;
            let token = Token::new(name);
            if env.bindings.contains_key(&token) {
                return Err(EnvParseError::Duplicate {
                    line,
                    name: name.to_string(),
                });
            }
            env.bind(token, value);
        }
        Ok(env)
    }
}

impl fmt::Display for TokenEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, v) in &self.bindings {
            writeln!(f, "{t} = {v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TokenEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.bindings.iter()).finish()
    }
}

impl FromIterator<(Token, Rational)> for TokenEnv {
    fn from_iter<I: IntoIterator<Item = (Token, Rational)>>(iter: I) -> Self {
        TokenEnv {
            bindings: iter.into_iter().collect(),
        }
    }
}

/// Structural evaluation with total division (`x / 0 = 0`).
pub fn eval(sigma: &TokenEnv, e: &Expr) -> Rational {
    match e {
        Expr::Exact(q, _) => q.clone(),
        Expr::Meas(t, _, _) => sigma.get(t),
        Expr::Add(a, b) => eval(sigma, a) + eval(sigma, b),
        Expr::Sub(a, b) => eval(sigma, a) - eval(sigma, b),
        Expr::Mul(a, b) => eval(sigma, a) * eval(sigma, b),
        Expr::Div(a, b) => eval(sigma, a).div_total(&eval(sigma, b)),
        Expr::Neg(a) => -eval(sigma, a),
    }
}

/// Every measured occurrence's interval contains the token's hidden value.
pub fn token_consistent(sigma: &TokenEnv, e: &Expr) -> bool {
    match e {
        Expr::Exact(..) => true,
        Expr::Meas(t, i, _) => i.contains(&sigma.get(t)),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            token_consistent(sigma, a) && token_consistent(sigma, b)
        }
        Expr::Neg(a) => token_consistent(sigma, a),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expression contains a measured leaf")]
pub struct NotExact;

/// Value of an expression without measured leaves.
pub fn exact_value(e: &Expr) -> Result<Rational, NotExact> {
    if e.is_exact() {
        Ok(eval(&TokenEnv::new(), e))
    } else {
        Err(NotExact)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn t(name: &str) -> Token {
        Token::new(name)
    }

    #[test]
    fn distinct_difference_evaluates() {
        let e = parse("meas(t1,[2,5],d)-meas(t2,[2,5],d)").unwrap();
        let sigma = TokenEnv::new().with(&t("t1"), 5).with(&t("t2"), 2);
        assert_eq!(eval(&sigma, &e), 3);
    }

    #[test]
    fn division_by_zero_is_zero() {
        let e = parse("exact(1,d)/exact(0,d)").unwrap();
        assert_eq!(eval(&TokenEnv::new(), &e), 0);
        assert_eq!(eval(&TokenEnv::new().with(&t("x"), 7), &e), 0);
    }

    #[test]
    fn same_token_difference_is_zero() {
        let e = parse("meas(t,[2,5],d)-meas(t,[2,5],d)").unwrap();
        assert_eq!(eval(&TokenEnv::new().with(&t("t"), 3), &e), 0);
    }

    #[test]
    fn consistency() {
        let leaf = parse("meas(t,[2,5],d)").unwrap();
        assert!(token_consistent(&TokenEnv::new().with(&t("t"), 2), &leaf));
        assert!(!token_consistent(&TokenEnv::new().with(&t("t"), 6), &leaf));
        let both = parse("meas(t,[2,5],d)+meas(t,[4,8],d)").unwrap();
        let sigma = TokenEnv::new().with(&t("t"), Rational::new(9, 2));
        assert!(token_consistent(&sigma, &both));
        assert!(token_consistent(&TokenEnv::new(), &parse("exact(9,d)").unwrap()));
    }

    #[test]
    fn exact_values() {
        assert_eq!(exact_value(&parse("exact(3,d)+exact(4,d)").unwrap()), Ok(7.into()));
        assert_eq!(exact_value(&parse("exact(1,d)/exact(0,d)").unwrap()), Ok(0.into()));
        assert_eq!(exact_value(&parse("meas(t,[2,5],d)").unwrap()), Err(NotExact));
    }

    #[test]
    fn env_file_format() {
        let env = TokenEnv::parse("# hidden values\nt1 = 9/2\n\n t2=-3 # trailing\n").unwrap();
        assert_eq!(env.get(&t("t1")), Rational::new(9, 2));
        assert_eq!(env.get(&t("t2")), -3);
        assert_eq!(env.get(&t("zz")), 0);
        assert_eq!(TokenEnv::parse(&env.to_string()).unwrap(), env);
        assert!(matches!(TokenEnv::parse("t1 9"), Err(EnvParseError::Malformed { line: 1 })));
        assert!(matches!(TokenEnv::parse("1t = 9"), Err(EnvParseError::BadToken { .. })));
        assert!(matches!(TokenEnv::parse("t = 1/0"), Err(EnvParseError::BadValue { .. })));
        assert!(matches!(
            TokenEnv::parse("t = 1\nt = 2"),
            Err(EnvParseError::Duplicate { line: 2, .. })
        ));
    }
}
