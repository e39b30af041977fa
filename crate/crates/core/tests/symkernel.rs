use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use reciprocal_core::symkernel::{ex, eval_numeric, parse, sym, Expr, FnImpl, FnImpls, VarTable};
use reciprocal_core::Error;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn cancels_common_factor() {
    assert_eq!(ex("(u^2-v^2)/(u-v)"), ex("u+v"));
    assert_eq!(ex("0*h(S)"), Expr::zero());
    assert_eq!(ex("(rho*u + rho*v)/(u+v)"), ex("rho"));
}

#[test]
fn division_by_zero_is_reported() {
    let e = ex("u-u");
    assert_eq!(ex("u").div(&e), Err(Error::DivisionByZeroExpr));
    assert!(matches!(parse("u/(v-v)"), Err(Error::DivisionByZeroAt { .. })));
}

/// Expands a polynomial given as nested sums/products of (coeff, exponent vector) terms
/// without going through the kernel.
mod brute {
    use std::collections::BTreeMap;
    pub type P = BTreeMap<Vec<u32>, i64>;
    pub const VARS: [&str; 11] = [
        "p", "rho", "u", "v", "q12", "q13", "q22", "q23", "x1", "x2", "x3",
    ];
    pub fn var(name: &str) -> P {
        let mut e = vec![0; VARS.len()];
        e[VARS.iter().position(|v| *v == name).unwrap()] = 1;
        BTreeMap::from([(e, 1)])
    }
    pub fn c(k: i64) -> P {
        BTreeMap::from([(vec![0; VARS.len()], k)])
    }
    pub fn add(a: &P, b: &P) -> P {
        let mut r = a.clone();
        for (m, k) in b {
            *r.entry(m.clone()).or_insert(0) += k;
        }
        r.retain(|_, k| *k != 0);
        r
    }
    pub fn mul(a: &P, b: &P) -> P {
        let mut r = P::new();
        for (ma, ka) in a {
            for (mb, kb) in b {
                let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                *r.entry(m).or_insert(0) += ka * kb;
            }
        }
        r.retain(|_, k| *k != 0);
        r
    }
    pub fn to_string(p: &P) -> String {
        let mut parts = Vec::new();
        for (m, k) in p {
            let mut t = format!("({k})");
            for (i, e) in m.iter().enumerate() {
                if *e > 0 {
                    t.push_str(&format!("*{}^{}", VARS[i], e));
                }
            }
            parts.push(t);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

#[test]
fn delta_expanded_equals_factored() {
    let factored = ex("(p+q12+rho*v^2)*(p+q22+rho*u^2) - (rho*u*v+q13)*(rho*u*v+q23)");
    let expanded = ex(
        "p^2+(q12+q22)*p+p*rho*(u^2+v^2)+q12*q22-q13*q23+rho*(q12*u^2+q22*v^2)-(q13+q23)*rho*u*v",
    );
    assert!(factored.sub(&expanded).is_zero());

    use brute::*;
    let rho_u_v = mul(&mul(&var("rho"), &var("u")), &var("v"));
    let a = add(&add(&var("p"), &var("q12")), &mul(&var("rho"), &mul(&var("v"), &var("v"))));
    let b = add(&add(&var("p"), &var("q22")), &mul(&var("rho"), &mul(&var("u"), &var("u"))));
    let c1 = add(&rho_u_v, &var("q13"));
    let c2 = add(&rho_u_v, &var("q23"));
    let brute_delta = add(&mul(&a, &b), &mul(&c(-1), &mul(&c1, &c2)));
    assert_eq!(ex(&to_string(&brute_delta)), expanded);
}

#[test]
fn derivative_examples() {
    let t = VarTable::gas();
    assert_eq!(t.diff(&ex("rho*(u^2+v^2)"), "u").unwrap(), ex("2*rho*u"));
    assert_eq!(t.diff(&ex("h(S)*u"), "S").unwrap(), ex("h'(S)*u"));
    assert_eq!(ex("1/(p+b2)").diff(&sym("p")), ex("-1/(p+b2)^2"));
    assert_eq!(ex("F(h(S))").diff(&sym("S")), ex("F'(h(S))*h'(S)"));
    assert_eq!(ex("G(rho,S)").diff(&sym("S")), ex("G'{0,1}(rho,S)"));
    assert!(matches!(t.diff(&ex("u"), "w"), Err(Error::UnknownVariable(_))));
}

#[test]
fn substitution_examples() {
    let f2 = ex("rho*(u*u_x+v*u_y)+p_x");
    assert!(f2.subs(&[("p_x", ex("-rho*(u*u_x+v*u_y)"))]).is_zero());
    let back = ex("p+b2").subs(&[("p", ex("b1^2*b3/(b4-p)-b2"))]);
    assert_eq!(back, ex("b1^2*b3/(b4-p)"));
    // a binding may refer to its own variable
    let t = VarTable::gas();
    assert_eq!(t.substitute(&ex("u+v"), &[("u", ex("2*u"))]).unwrap(), ex("2*u+v"));
    let cyc = t.substitute(&ex("u"), &[("u", ex("v")), ("v", ex("u"))]);
    assert!(matches!(cyc, Err(Error::CyclicBinding(_))));
}

#[test]
fn cylindrical_velocity() {
    // sin/cos stay opaque, so check numerically
    let e = ex("u^2+v^2").subs(&[("u", ex("R*sin(t)")), ("v", ex("R*cos(t)"))]);
    let a = HashMap::from([("R".to_string(), 1.7), ("t".to_string(), 0.3)]);
    let val = eval_numeric(&e, &a, &FnImpls::new()).unwrap();
    assert!((val - 1.7 * 1.7).abs() < 1e-12);
}

#[test]
fn collect_examples() {
    let e = ex("a*u_x + b*v_y");
    let c = e.collect(&[sym("u_x"), sym("v_y")]).unwrap();
    assert_eq!(c.len(), 2);
    let total: Expr = c.iter().map(|(m, k)| Expr::monomial_expr(m).mul(k)).sum();
    assert_eq!(total, e);
    assert!(Expr::zero().collect(&[sym("u")]).unwrap().is_empty());
    assert!(matches!(
        ex("1/u_x").collect(&[sym("u_x")]),
        Err(Error::NotPolynomialInVars(_))
    ));
}

#[test]
fn numeric_examples() {
    let none = FnImpls::new();
    let a = HashMap::from([("u".to_string(), 1.0), ("p".to_string(), 2.0)]);
    assert_eq!(eval_numeric(&ex("u/p"), &a, &none).unwrap(), 0.5);
    let a = HashMap::from([("epsilon".to_string(), 0.0), ("q13".to_string(), 3.0)]);
    assert_eq!(eval_numeric(&ex("tan(epsilon*q13)"), &a, &none).unwrap(), 0.0);
    let delta = ex(
        "p^2+(q12+q22)*p+p*rho*(u^2+v^2)+q12*q22-q13*q23+rho*(q12*u^2+q22*v^2)-(q13+q23)*rho*u*v",
    );
    let mut a: HashMap<String, f64> = ["q12", "q13", "q22", "q23"]
        .iter()
        .map(|n| (n.to_string(), 0.0))
        .collect();
    a.extend([("p", 1.0), ("rho", 1.0), ("u", 1.0), ("v", 0.0)].map(|(k, v)| (k.to_string(), v)));
    assert_eq!(eval_numeric(&delta, &a, &none).unwrap(), 2.0);
    let a = HashMap::from([("u".to_string(), 1.0)]);
    assert!(matches!(eval_numeric(&ex("u/(u-1)"), &a, &none), Err(Error::NumericDomain(_))));
    assert!(matches!(eval_numeric(&ex("w"), &a, &none), Err(Error::UnboundSymbol(_))));
    let fns = FnImpls::new().with("h", FnImpl::expr(&["s"], ex("s^3")));
    let a = HashMap::from([("S".to_string(), 2.0)]);
    assert_eq!(eval_numeric(&ex("h'(S)"), &a, &fns).unwrap(), 12.0);
}

#[test]
fn display_round_trips() {
    for src in [
        "(u^2-v^2)/(p+b2)",
        "h'(S)*F(S) - 3/7*rho",
        "G'{1,0}(rho,S)/(rho^2*u)",
        "tan(epsilon*q13) + 1",
        "-u",
    ] {
        let e = ex(src);
        assert_eq!(parse(&e.to_string()).unwrap(), e, "{src}");
    }
}

#[test]
fn parse_errors_carry_position() {
    match parse("u +\n  * v") {
        Err(Error::Parse { line, col, .. }) => {
            assert_eq!(line, 2);
            assert_eq!(col, 3);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(parse("3/4").unwrap().as_rational(), Some(q(3, 4)));
    assert_eq!(parse("0.25").unwrap().as_rational(), Some(q(1, 4)));
}

const NAMES: [&str; 4] = ["u", "v", "p", "rho"];

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-3i64..4).prop_map(Expr::int),
        (0usize..4).prop_map(|i| Expr::var(NAMES[i])),
        Just(ex("h(p)")),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(&b)),
            inner.prop_map(|a| a.div(&ex("1+u^2")).unwrap()),
        ]
    })
}

fn point() -> impl Strategy<Value = BTreeMap<String, f64>> {
    proptest::collection::vec(1i64..40, 4).prop_map(|v| {
        NAMES
            .iter()
            .zip(v)
            .map(|(n, k)| (n.to_string(), k as f64 / 16.0))
            .collect()
    })
}

fn fns() -> FnImpls {
    FnImpls::new().with("h", FnImpl::expr(&["s"], ex("s^2+1")))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diff_is_linear(a in arb_expr(), b in arb_expr(), k in -5i64..5) {
        let u = sym("u");
        let lhs = a.mul(&Expr::int(k)).add(&b).diff(&u);
        let rhs = a.diff(&u).mul(&Expr::int(k)).add(&b.diff(&u));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_rule(a in arb_expr(), b in arb_expr()) {
        let p = sym("p");
        prop_assert_eq!(a.mul(&b).diff(&p), a.diff(&p).mul(&b).add(&a.mul(&b.diff(&p))));
    }

    #[test]
    fn substitute_then_evaluate(a in arb_expr(), pt in point()) {
        let e = a.subs(&[("u", ex("v+p")), ("rho", ex("2*rho"))]);
        let mut composed: HashMap<String, f64> = pt.clone().into_iter().collect();
        composed.insert("u".into(), pt["v"] + pt["p"]);
        composed.insert("rho".into(), 2.0 * pt["rho"]);
        let direct: HashMap<String, f64> = pt.into_iter().collect();
        let x = eval_numeric(&e, &direct, &fns());
        let y = eval_numeric(&a, &composed, &fns());
        if let (Ok(x), Ok(y)) = (x, y) {
            prop_assert!((x - y).abs() <= 1e-8 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn common_factors_cancel(a in arb_expr(), b in arb_expr(), c in arb_expr()) {
        prop_assume!(!b.is_zero() && !c.is_zero());
        let lhs = a.mul(&c).div(&b.mul(&c)).unwrap();
        prop_assert_eq!(lhs, a.div(&b).unwrap());
    }

    #[test]
    fn normalization_congruence(a in arb_expr(), b in arb_expr()) {
        let sum = a.add(&b);
        prop_assert_eq!(sum.normalize(), a.normalize().add(&b.normalize()));
        prop_assert_eq!(sum.normalize().normalize(), sum.normalize());
        prop_assert_eq!(parse(&sum.to_string()).unwrap(), sum);
    }
}

#[test]
fn large_common_factor_is_found() {
    let f = ex("(rho*u^2 + p*v - q12*rho + 3)^2*(u*v - p^3 + h(S))");
    let g = ex("rho^2*v - u*p + 7");
    let k = ex("p*u^3 - rho + v^2*S");
    assert_eq!(f.mul(&g).div(&f.mul(&k)).unwrap(), g.div(&k).unwrap());
    assert_eq!(ex("(u+v)^3*(rho-p)").div(&ex("(u+v)^2*(rho+p)")).unwrap(), ex("(u+v)*(rho-p)/(rho+p)"));
}

#[test]
fn high_precision_leaves() {
    use num_traits::ToPrimitive;
    use reciprocal_core::symkernel::eval_hp;
    let vars = BTreeMap::from([(sym("t"), q(3, 10))]);
    for (src, want) in [
        ("tan(t)", 0.3f64.tan()),
        ("exp(t)", 0.3f64.exp()),
        ("sin(t)*cos(t)", 0.3f64.sin() * 0.3f64.cos()),
        ("ln(t)", 0.3f64.ln()),
        ("sqrt(t)", 0.3f64.sqrt()),
        ("exp(7*t)", 2.1f64.exp()),
    ] {
        let v = eval_hp(&ex(src), &vars, 128).unwrap().to_f64().unwrap();
        assert!((v - want).abs() < 1e-14 * want.abs().max(1.0), "{src}: {v} vs {want}");
    }
    // sin^2 + cos^2 = 1 far below double precision
    let s = eval_hp(&ex("sin(t)^2+cos(t)^2-1"), &vars, 160).unwrap();
    assert!(num_traits::Signed::abs(&s) < q(1, 1_000_000_000) * q(1, 1_000_000_000) * q(1, 1_000_000_000));
}
