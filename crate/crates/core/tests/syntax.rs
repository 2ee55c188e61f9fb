use proptest::prelude::*;
use warrant_core::{parse, print, Dim, Expr, Interval, Rational, Token};

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=9).prop_map(|(n, d)| Rational::new(n, d))
}

fn interval() -> impl Strategy<Value = Interval> {
    (rational(), rational()).prop_map(|(a, b)| {
        if a <= b {
            Interval::new(a, b).unwrap()
        } else {
            Interval::new(b, a).unwrap()
        }
    })
}

fn name() -> impl Strategy<Value = String> {
    prop_oneof![
        prop::string::string_regex("[a-zA-Z][a-zA-Z0-9_]{0,4}").unwrap(),
        Just("exact".to_string()),
        Just("meas".to_string()),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (rational(), name()).prop_map(|(q, d)| Expr::Exact(q, Dim::new(d))),
        (name(), interval(), name()).prop_map(|(t, i, d)| Expr::meas(&Token::new(t), i, &Dim::new(d))),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
            inner.prop_map(Expr::neg),
        ]
    })
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(e in expr()) {
        let text = print(&e);
        prop_assert_eq!(parse(&text).unwrap(), e.clone());
        prop_assert_eq!(print(&parse(&text).unwrap()), text);
    }

    #[test]
    fn rational_text_round_trips(q in rational()) {
        prop_assert_eq!(q.to_string().parse::<Rational>().unwrap(), q);
    }

    #[test]
    fn whitespace_and_comments_do_not_matter(e in expr()) {
        let noisy = format!("# leading comment\n  {}  # trailing\n", print(&e).replace(' ', "\n  "));
        prop_assert_eq!(parse(&noisy).unwrap(), e);
    }
}

#[test]
fn canonical_forms() {
    for (input, canonical) in [
        ("meas(t1,[2,5],d)-meas(t2,[2,5],d)", "meas(t1,[2,5],d) - meas(t2,[2,5],d)"),
        ("(exact(1,d)+exact(2,d))*exact(3,d)", "(exact(1,d) + exact(2,d)) * exact(3,d)"),
        ("exact(1,d)-(exact(2,d)-exact(3,d))", "exact(1,d) - (exact(2,d) - exact(3,d))"),
        ("(exact(1,d)-exact(2,d))-exact(3,d)", "exact(1,d) - exact(2,d) - exact(3,d)"),
        ("exact(4/2,d)", "exact(2,d)"),
        ("meas(t,[-1/2,3/6],V)", "meas(t,[-1/2,1/2],V)"),
        ("-(exact(1,d)+exact(1,d))", "-(exact(1,d) + exact(1,d))"),
    ] {
        assert_eq!(print(&parse(input).unwrap()), canonical);
    }
}

#[test]
fn rejects_malformed_input() {
    for bad in [
        "",
        "meas(t,[2,5])",
        "meas(t,[5,2],d)",
        "exact(1/0,d)",
        "exact(1,d) exact(2,d)",
        "meas(_t,[0,1],d)",
        "meas(t,[0,1],1d)",
        "exact(1.5,d)",
    ] {
        assert!(parse(bad).is_err(), "{bad:?} parsed");
    }
}
