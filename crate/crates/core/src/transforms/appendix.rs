//! The first-order relations that the span conditions impose on a map's components,
//! checked against an explicit map and automorphism matrix.

use serde::Serialize;

use crate::liealg::automorphism::AutomorphismMatrix;
use crate::report::ser_expr;
use crate::symkernel::{ex, Expr};

use super::ReciprocalMap;

#[derive(Clone, Debug, Serialize)]
pub struct Relation {
    pub name: String,
    pub block: &'static str,
    #[serde(serialize_with = "ser_expr")]
    pub residual: Expr,
}

impl Relation {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AppendixReport {
    /// Derivative relations; the verdict is taken over these.
    pub relations: Vec<Relation>,
    /// Algebraic consequences stated for the case `a35 = 0`, reported for reference.
    pub algebraic: Vec<Relation>,
    /// Sign `mu` for which the density relation of the case `a35 = 0` holds, if any.
    pub mu: Option<i64>,
    pub pass: bool,
}

impl AppendixReport {
    pub fn failing(&self) -> Vec<&str> {
        self.relations.iter().filter(|r| !r.holds()).map(|r| r.name.as_str()).collect()
    }
}

struct Ctx {
    bind: Vec<(&'static str, Expr)>,
}

impl Ctx {
    fn eval(&self, template: &str, extra: &[(&str, Expr)]) -> Expr {
        let mut b: Vec<(&str, Expr)> = self.bind.iter().map(|(k, v)| (*k, v.clone())).collect();
        b.extend(extra.iter().cloned());
        ex(template).subs(&b)
    }
}

pub fn appendix_pde_residuals(t: &ReciprocalMap, a: &AutomorphismMatrix, a11: &Expr) -> AppendixReport {
    let e = |i: usize, j: usize| a.a[i][j].clone();
    let (a33, a34, a35) = (e(0, 0), e(0, 1), e(0, 2));
    let (a43, a44, a45) = (e(1, 0), e(1, 1), e(1, 2));
    let (a53, a54, a55) = (e(2, 0), e(2, 1), e(2, 2));
    let [r, uu, vv, pp, h] = t.fields.clone();
    let f = t.form.clone();
    let ctx = Ctx {
        bind: vec![
            ("R", r.clone()),
            ("U", uu.clone()),
            ("V", vv.clone()),
            ("P", pp.clone()),
            ("H", h.clone()),
            ("fxx", f[0][0].clone()),
            ("fyx", f[0][1].clone()),
            ("fxy", f[1][0].clone()),
            ("fyy", f[1][1].clone()),
            ("a33", a33.clone()),
            ("a34", a34),
            ("a35", a35.clone()),
            ("a43", a43),
            ("a44", a44),
            ("a45", a45),
            ("a53", a53),
            ("a54", a54.clone()),
            ("a55", a55),
            ("a11", a11.clone()),
        ],
    };
    // quadratic and linear combinations of the matrix entries in p
    let c = |k: u8| format!("(a{k}5*p^2-2*a{k}4*p+2*a{k}3)");
    let d = |k: u8| format!("(-a{k}5*p+a{k}4)");
    let (c3, c4, c5, d3, d4, d5) = (c(3), c(4), c(5), d(3), d(4), d(5));
    let q = "(2*rho^2*(u^2+v^2))";

    let mut relations = Vec::new();
    let mut push = |block: &'static str, name: String, lhs: Expr, rhs: Expr| {
        relations.push(Relation { name, block, residual: lhs.sub(&rhs) });
    };

    push("span", "R_rho".into(), r.diff_name("rho"), ctx.eval(&format!("R^2*(U^2+V^2)*{c3}/{q}"), &[]));
    push(
        "span",
        "R_u".into(),
        r.diff_name("u"),
        ctx.eval(&format!("(-Wv*v+R^2*(U^2+V^2)*{d3})/u"), &[("Wv", r.diff_name("v"))]),
    );
    push("span", "R_p".into(), r.diff_name("p"), ctx.eval("R^2*a35*(U^2+V^2)/2", &[]));
    for (name, w) in [("U", &uu), ("V", &vv)] {
        let wb = [("W", w.clone()), ("Wv", w.diff_name("v"))];
        push("span", format!("{name}_rho"), w.diff_name("rho"), ctx.eval(&format!("(P*W*{c3}+W*{c4})/{q}"), &wb));
        push("span", format!("{name}_u"), w.diff_name("u"), ctx.eval(&format!("(-Wv*v+P*W*{d3}+W*{d4})/u"), &wb));
        push("span", format!("{name}_p"), w.diff_name("p"), ctx.eval("(P*W*a35+W*a45)/2", &wb));
    }
    let pb = [("Wv", pp.diff_name("v"))];
    push("span", "P_rho".into(), pp.diff_name("rho"), ctx.eval(&format!("(P^2*{c3}+2*P*{c4}+2*{c5})/{q}"), &pb));
    push("span", "P_u".into(), pp.diff_name("u"), ctx.eval(&format!("(-Wv*v+P^2*{d3}+2*P*{d4}+2*{d5})/u"), &pb));
    push("span", "P_p".into(), pp.diff_name("p"), ctx.eval("(P^2*a35+2*P*a45+2*a55)/2", &pb));
    push("span", "H_rho".into(), h.diff_name("rho"), Expr::zero());
    push("span", "H_u".into(), h.diff_name("u"), ctx.eval("-Wv*v/u", &[("Wv", h.diff_name("v"))]));
    push("span", "H_p".into(), h.diff_name("p"), Expr::zero());

    // form coefficients: (name, entry, templates for rho, u, p)
    let forms: [(&str, &Expr, [String; 3]); 4] = [
        (
            "xfdx",
            &f[0][0],
            [
                format!("(-fxx*P*{c3}-fxx*R*V^2*{c3}+fxx*(-{c4}+2*rho*v^2)-2*fyx*rho*u*v+fxy*R*U*V*{c3})/{q}"),
                format!("(-Wv*v-fxx*P*{d3}-fxx*R*V^2*{d3}+fxx*(-{d4}+1)+fxy*R*U*V*{d3})/u"),
                "(-fxx*P*a35-fxx*R*V^2*a35-fxx*a45+fxy*R*U*V*a35)/2".into(),
            ],
        ),
        (
            "yfdx",
            &f[0][1],
            [
                format!("(-2*fxx*rho*u*v-fyx*P*{c3}-fyx*R*V^2*{c3}+fyx*(-{c4}+2*rho*u^2)+fyy*R*U*V*{c3})/{q}"),
                format!("(-Wv*v-fyx*P*{d3}-fyx*R*V^2*{d3}+fyx*(-{d4}+1)+fyy*R*U*V*{d3})/u"),
                "(-fyx*P*a35-fyx*R*V^2*a35-fyx*a45+fyy*R*U*V*a35)/2".into(),
            ],
        ),
        (
            "xfdy",
            &f[1][0],
            [
                format!("(fxx*R*U*V*{c3}-fxy*P*{c3}-fxy*R*U^2*{c3}+fxy*(-{c4}+2*rho*v^2)-2*fyy*rho*u*v)/{q}"),
                format!("(-Wv*v+fxx*R*U*V*{d3}-fxy*P*{d3}-fxy*R*U^2*{d3}+fxy*(-{d4}+1))/u"),
                "(fxx*R*U*V*a35-fxy*P*a35-fxy*R*U^2*a35-fxy*a45)/2".into(),
            ],
        ),
        (
            "yfdy",
            &f[1][1],
            [
                format!("(fyx*R*U*V*{c3}-2*fxy*rho*u*v-fyy*P*{c3}-fyy*R*U^2*{c3}+fyy*(-{c4}+2*rho*u^2))/{q}"),
                format!("(-Wv*v+fyx*R*U*V*{d3}-fyy*P*{d3}-fyy*R*U^2*{d3}+fyy*(-{d4}+1))/u"),
                "(fyx*R*U*V*a35-fyy*P*a35-fyy*R*U^2*a35-fyy*a45)/2".into(),
            ],
        ),
    ];
    for (name, w, [tr, tu, tp]) in &forms {
        let wb = [("Wv", w.diff_name("v"))];
        push("span", format!("{name}_rho"), w.diff_name("rho"), ctx.eval(tr, &wb));
        push("span", format!("{name}_u"), w.diff_name("u"), ctx.eval(tu, &wb));
        push("span", format!("{name}_p"), w.diff_name("p"), ctx.eval(tp, &wb));
    }

    // the center, with the entries fixed by a35 = 0: derivatives in v
    let case_zero = a35.is_zero();
    if case_zero {
        let qq = "(u^2+v^2)";
        push("center", "R_v".into(), r.diff_name("v"), Expr::zero());
        push("center", "U_v".into(), uu.diff_name("v"), ctx.eval(&format!("(U*v-V*a11*u)/{qq}"), &[]));
        push("center", "V_v".into(), vv.diff_name("v"), ctx.eval(&format!("(U*a11*u+V*v)/{qq}"), &[]));
        push(
            "center",
            "P_v".into(),
            pp.diff_name("v"),
            ctx.eval(&format!("(2*P*a33*v+2*v*(a54*a33-p))/(a33*{qq})"), &[]),
        );
        push("center", "H_v".into(), h.diff_name("v"), Expr::zero());
        push("center", "xfdx_v".into(), f[0][0].diff_name("v"), ctx.eval(&format!("-u*(fyx+fxy*a11)/{qq}"), &[]));
        push("center", "yfdx_v".into(), f[0][1].diff_name("v"), ctx.eval(&format!("u*(fxx-fyy*a11)/{qq}"), &[]));
        push("center", "xfdy_v".into(), f[1][0].diff_name("v"), ctx.eval(&format!("u*(fxx*a11-fyy)/{qq}"), &[]));
        push("center", "yfdy_v".into(), f[1][1].diff_name("v"), ctx.eval(&format!("u*(fyx*a11+fxy)/{qq}"), &[]));
    }

    let mut algebraic = Vec::new();
    let mut mu = None;
    if case_zero {
        let mut alg = |name: &str, e: Expr| {
            algebraic.push(Relation { name: name.into(), block: "algebraic", residual: e });
        };
        alg("a11^2 = 1", ctx.eval("a11^2-1", &[]));
        alg("yfdx = -a11 xfdy", ctx.eval("fyx+fxy*a11", &[]));
        alg("xfdx = a11 yfdy", ctx.eval("fxx-fyy*a11", &[]));
        let lin = [
            "fxy*a11*(p+rho*u^2-a33*(P+R*V^2+a54))+fyy*(a11*rho*u*v-R*U*V*a33)",
            "fxy*(a11*rho*u*v+R*U*V*a33)+fyy*a11*(p+rho*v^2-a33*(P+R*V^2+a54))",
            "-fxy*a11*(R*U*V*a33+a11*rho*u*v)+fyy*(p+rho*u^2-a33*(P+R*U^2+a54))",
            "-fxy*a11*(p+rho*v^2-a33*(P+R*U^2+a54))+fyy*(a11*rho*u*v-R*U*V*a33)",
        ];
        for (i, s) in lin.iter().enumerate() {
            alg(&format!("linear system {}", i + 1), ctx.eval(s, &[]));
        }
        alg(
            "pressure from linear system (as displayed)",
            ctx.eval("P-((2*p+rho*(u^2+v^2))/a33-R*(U^2+V^2+2*a54))/2", &[]),
        );
        alg(
            "pressure from linear system (shift outside)",
            ctx.eval("P-((2*p+rho*(u^2+v^2))/a33-R*(U^2+V^2)-2*a54)/2", &[]),
        );
        let density = |m: i64| ctx.eval(&format!("R-({m})*rho*(u^2+v^2)/(a33*(U^2+V^2))"), &[]);
        mu = [1, -1].into_iter().find(|m| density(*m).is_zero());
        let m = mu.unwrap_or(1);
        alg("density from linear system", density(m));
        let mb = [("mu", Expr::int(m))];
        alg(
            "reduced system 1",
            ctx.eval(
                "mu*(fxy*(V^2-U^2)+2*fyy*U*V*a11)*(u^2+v^2)+(-2*fyy*u*v+fxy*(v^2-u^2))*(V^2+U^2)",
                &mb,
            ),
        );
        alg(
            "reduced system 2",
            ctx.eval(
                "(-2*fxy*u*v+fyy*(u^2-v^2))*(U^2+V^2)+mu*(fyy*(V^2-U^2)-2*fxy*U*V*a11)*(u^2+v^2)",
                &mb,
            ),
        );
    }

    let pass = relations.iter().all(|r| r.holds());
    AppendixReport { relations, algebraic, mu, pass }
}
