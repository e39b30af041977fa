//! Named transformations: reciprocal maps, point maps and one-parameter families.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::liealg::generator::{form_inverse, form_map, form_mul, identity_form};
use crate::liealg::lrt::{x1, x2, x4, x5, y};
use crate::liealg::{FormMatrix, Generator};
use crate::symkernel::{ex, Builtin, Expr};

use super::lie::OneParamFamily;
use super::{PointMap, ReciprocalMap};

#[derive(Clone, Debug)]
pub enum CatalogEntry {
    Reciprocal(ReciprocalMap),
    Point(PointMap),
    Family(OneParamFamily),
}

impl CatalogEntry {
    pub fn kind(&self) -> &'static str {
        match self {
            CatalogEntry::Reciprocal(_) => "reciprocal",
            CatalogEntry::Point(_) => "point",
            CatalogEntry::Family(_) => "family",
        }
    }
}

/// Names accepted by [`catalog`], with their kind.
pub fn catalog_names() -> Vec<(&'static str, &'static str)> {
    vec![
        ("identity", "reciprocal"),
        ("bateman", "reciprocal"),
        ("remark", "reciprocal"),
        ("theorem", "reciprocal"),
        ("mu_plus", "reciprocal"),
        ("mu_minus", "reciprocal"),
        ("broken", "reciprocal"),
        ("rational_family", "family"),
        ("rotation_family", "family"),
        ("exp_family", "family"),
        ("linear_family", "family"),
        ("linear_family_printed", "family"),
        ("munk_prim", "point"),
        ("e1", "point"),
        ("e2", "point"),
        ("rotation", "point"),
        ("point_identity", "point"),
    ]
}

type Params = BTreeMap<String, Expr>;

fn get(params: &Params, name: &str, default: &str) -> Expr {
    params.get(name).cloned().unwrap_or_else(|| ex(default))
}

fn nonzero(e: &Expr, what: &str) -> Result<()> {
    if e.is_zero() {
        return Err(Error::ParamConstraintViolated(format!("{what} must be nonzero")));
    }
    Ok(())
}

fn sign(e: &Expr, what: &str) -> Result<()> {
    if e.is_constant() && e.mul(e) != Expr::one() {
        return Err(Error::ParamConstraintViolated(format!("{what}^2 must be 1")));
    }
    Ok(())
}

pub fn catalog(name: &str, params: &Params) -> Result<CatalogEntry> {
    let known: Vec<&str> = catalog_names().iter().map(|(n, _)| *n).collect();
    if !known.contains(&name) {
        return Err(Error::UnknownCatalogEntry(name.to_string()));
    }
    let g = |n: &str, d: &str| get(params, n, d);
    use CatalogEntry::*;
    Ok(match name {
        "identity" => Reciprocal(ReciprocalMap::identity()),
        "bateman" => Reciprocal(bateman(&g("b1", "b1"), &g("b2", "b2"), &g("b3", "b3"), &g("b4", "b4"), &g("F", "S"))?),
        "remark" => Reciprocal(remark(&g("b3", "b3"), &g("b4", "b4"), &g("F", "S"))?),
        "theorem" => Reciprocal(theorem(&TheoremParams {
            a34: g("a34", "a34"),
            a35: g("a35", "a35"),
            a45: g("a45", "a45"),
            alpha: g("alpha", "alpha"),
            beta: g("beta", "beta"),
            k: g("k", "k"),
            a11: g("a11", "1"),
            psi: g("psi", "psi(S)"),
            f: g("F", "S"),
        })?),
        "mu_plus" | "mu_minus" => {
            let mp = MuParams {
                a33: g("a33", "a33"),
                a54: g("a54", "a54"),
                alpha: g("alpha", "alpha"),
                beta: g("beta", "beta"),
                a11: g("a11", "1"),
                psi: g("psi", "psi(S)"),
                f: g("F", "S"),
            };
            Reciprocal(if name == "mu_plus" { mu_plus(&mp)? } else { mu_minus(&mp)? })
        }
        "broken" => Reciprocal(broken(&g("b1", "b1"), &g("b2", "b2"), &g("b3", "b3"), &g("b4", "b4"))?),
        "rational_family" => Family(rational_family()),
        "rotation_family" => Family(rotation_family(&g("q12", "q12"), &g("q13", "q13"))?),
        "exp_family" => Family(exp_family(&g("q12", "q12"), &g("k1", "k1"), &g("k2", "k2"))?),
        "linear_family" => Family(linear_family(&g("q12", "q12"), &g("k2", "k2"), false)),
        "linear_family_printed" => Family(linear_family(&g("q12", "q12"), &g("k2", "k2"), true)),
        "munk_prim" => Point(munk_prim(&g("psi", "psi(S)"))?),
        "e1" => Point(e1()),
        "e2" => Point(e2()),
        "rotation" => Point(rotation(&g("c", "3/5"), &g("s", "4/5"))?),
        "point_identity" => Point(PointMap::identity()),
        _ => unreachable!(),
    })
}

fn parse_form(rows: [[&str; 2]; 2], bind: &[(&str, Expr)]) -> FormMatrix {
    rows.map(|r| r.map(|s| ex(s).subs(bind)))
}

fn parse_fields(f: [&str; 5], bind: &[(&str, Expr)]) -> [Expr; 5] {
    f.map(|s| ex(s).subs(bind))
}

/// The four-parameter Bateman-type map with `S' = F`.
pub fn bateman(b1: &Expr, b2: &Expr, b3: &Expr, b4: &Expr, f: &Expr) -> Result<ReciprocalMap> {
    let mut m = bateman_fields(b1, b2, b3, b4, f)?;
    if *f == Expr::var("S") {
        // the family is closed under inversion
        let inv = bateman_fields(&b1.mul(b3).neg(), &b4.neg(), &b3.recip()?, &b2.neg(), f)?;
        m.inverse = Some(inv.fields);
    }
    Ok(m)
}

fn bateman_fields(b1: &Expr, b2: &Expr, b3: &Expr, b4: &Expr, f: &Expr) -> Result<ReciprocalMap> {
    nonzero(&b1.mul(b3), "b1*b3")?;
    let bind = [("b1", b1.clone()), ("b2", b2.clone()), ("b3", b3.clone()), ("b4", b4.clone())];
    let mut fields = parse_fields(
        [
            "b3*rho*(p+b2)/(p+b2+rho*(u^2+v^2))",
            "b1*u/(p+b2)",
            "b1*v/(p+b2)",
            "b4-b1^2*b3/(p+b2)",
            "S",
        ],
        &bind,
    );
    fields[4] = f.clone();
    let form = parse_form(
        [["(p+b2+rho*v^2)/b1", "-rho*u*v/b1"], ["-rho*u*v/b1", "(p+b2+rho*u^2)/b1"]],
        &bind,
    );
    Ok(ReciprocalMap::new("bateman", fields, form)
        .with_params(&[("b1", b1.clone()), ("b2", b2.clone()), ("b3", b3.clone()), ("b4", b4.clone())]))
}

/// The simplified map with `b1 = 1`, `b2 = 0`.
pub fn remark(b3: &Expr, b4: &Expr, f: &Expr) -> Result<ReciprocalMap> {
    nonzero(b3, "b3")?;
    let bind = [("b3", b3.clone()), ("b4", b4.clone())];
    let mut fields = parse_fields(["b3*rho*p/(p+rho*(u^2+v^2))", "u/p", "v/p", "b4-b3/p", "S"], &bind);
    fields[4] = f.clone();
    let form = parse_form([["p+rho*v^2", "-rho*u*v"], ["-rho*u*v", "p+rho*u^2"]], &bind);
    let mut m = ReciprocalMap::new("remark", fields, form).with_params(&bind);
    if *f == Expr::var("S") {
        m.inverse = Some(bateman_fields(&b3.neg(), &b4.neg(), &b3.recip()?, &Expr::zero(), f)?.fields);
    }
    Ok(m)
}

/// Bateman map with the last form coefficient multiplied by `p`.
pub fn broken(b1: &Expr, b2: &Expr, b3: &Expr, b4: &Expr) -> Result<ReciprocalMap> {
    let mut m = bateman(b1, b2, b3, b4, &Expr::var("S"))?;
    m.form[1][1] = m.form[1][1].mul(&Expr::var("p"));
    m.name = "broken".into();
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct TheoremParams {
    pub a34: Expr,
    pub a35: Expr,
    pub a45: Expr,
    pub alpha: Expr,
    pub beta: Expr,
    pub k: Expr,
    pub a11: Expr,
    pub psi: Expr,
    pub f: Expr,
}

impl TheoremParams {
    /// The values reproducing the Bateman map with parameters `b`.
    pub fn from_bateman(b: [&Expr; 4]) -> Result<TheoremParams> {
        let [b1, b2, b3, b4] = b;
        let den = b1.mul(b1).mul(b3);
        let two = Expr::int(2);
        Ok(TheoremParams {
            a34: two.mul(b2).div(&den)?.neg(),
            a35: two.div(&den)?,
            a45: two.mul(b4).div(&den)?.neg(),
            alpha: Expr::zero(),
            beta: two.div(&b1.mul(b3))?,
            k: b3.scale(&num_rational::BigRational::new((-1).into(), 2.into())),
            a11: Expr::one(),
            psi: den.scale(&num_rational::BigRational::new(1.into(), 2.into())),
            f: Expr::var("S"),
        })
    }
}

/// The general map of the case `a35 != 0`.
pub fn theorem(t: &TheoremParams) -> Result<ReciprocalMap> {
    nonzero(&t.a35, "a35")?;
    nonzero(&t.alpha.mul(&t.alpha).add(&t.beta.mul(&t.beta)), "alpha^2+beta^2")?;
    nonzero(&t.k, "k")?;
    nonzero(&t.psi, "psi")?;
    sign(&t.a11, "a11")?;
    let gg = t.a34.div(&t.a35)?;
    let bind = [
        ("a35", t.a35.clone()),
        ("a45", t.a45.clone()),
        ("alpha", t.alpha.clone()),
        ("beta", t.beta.clone()),
        ("k", t.k.clone()),
        ("a11", t.a11.clone()),
        ("psi", t.psi.clone()),
        ("g", gg),
    ];
    let mut fields = parse_fields(
        [
            "2*rho*(p-g)/(psi^2*a35*(alpha^2+beta^2)*(p+rho*(u^2+v^2)-g))",
            "psi*(alpha*v+beta*u)/(p-g)",
            "a11*psi*(-alpha*u+beta*v)/(p-g)",
            "-a45/a35-2/(a35*(p-g))",
            "S",
        ],
        &bind,
    );
    fields[4] = t.f.clone();
    let form = parse_form(
        [
            [
                "k*(alpha*rho*u*v-beta*(p+rho*v^2-g))",
                "k*(-alpha*(p+rho*u^2-g)+beta*rho*u*v)",
            ],
            [
                "k*a11*(alpha*(p+rho*v^2-g)+beta*rho*u*v)",
                "-k*a11*(alpha*rho*u*v+beta*(p+rho*u^2-g))",
            ],
        ],
        &bind,
    );
    Ok(ReciprocalMap::new("theorem", fields, form).with_params(&[
        ("a34", t.a34.clone()),
        ("a35", t.a35.clone()),
        ("a45", t.a45.clone()),
        ("alpha", t.alpha.clone()),
        ("beta", t.beta.clone()),
        ("k", t.k.clone()),
        ("a11", t.a11.clone()),
        ("psi", t.psi.clone()),
        ("F", t.f.clone()),
    ]))
}

#[derive(Clone, Debug)]
pub struct MuParams {
    pub a33: Expr,
    pub a54: Expr,
    pub alpha: Expr,
    pub beta: Expr,
    pub a11: Expr,
    pub psi: Expr,
    pub f: Expr,
}

impl MuParams {
    fn check(&self) -> Result<Vec<(&'static str, Expr)>> {
        nonzero(&self.a33, "a33")?;
        nonzero(&self.alpha.mul(&self.alpha).add(&self.beta.mul(&self.beta)), "alpha^2+beta^2")?;
        nonzero(&self.psi, "psi")?;
        sign(&self.a11, "a11")?;
        Ok(vec![
            ("a33", self.a33.clone()),
            ("a54", self.a54.clone()),
            ("alpha", self.alpha.clone()),
            ("beta", self.beta.clone()),
            ("a11", self.a11.clone()),
            ("psi", self.psi.clone()),
        ])
    }

    fn record(&self, m: ReciprocalMap, bind: &[(&str, Expr)]) -> ReciprocalMap {
        m.with_params(bind).with_params(&[("F", self.f.clone())])
    }
}

/// Branch `mu = 1` of the case `a35 = 0`; its form is constant.
pub fn mu_plus(mp: &MuParams) -> Result<ReciprocalMap> {
    let bind = mp.check()?;
    let mut fields = parse_fields(
        [
            "rho/(a33*psi^2*(alpha^2+beta^2))",
            "psi*(alpha*u+beta*v)",
            "a11*psi*(alpha*v-beta*u)",
            "p/a33-a54",
            "S",
        ],
        &bind,
    );
    fields[4] = mp.f.clone();
    let form = parse_form([["a11*alpha", "a11*beta"], ["-beta", "alpha"]], &bind);
    Ok(mp.record(ReciprocalMap::new("mu_plus", fields, form), &bind))
}

/// Branch `mu = -1` of the case `a35 = 0`, with `phi1 = alpha*psi`, `phi2 = beta*psi`.
pub fn mu_minus(mp: &MuParams) -> Result<ReciprocalMap> {
    let bind = mp.check()?;
    let mut fields = parse_fields(
        [
            "-1/(a33*rho*psi^2*(alpha^2+beta^2))",
            "rho*psi*(alpha*u+beta*v)",
            "a11*rho*psi*(alpha*v-beta*u)",
            "p/a33-a54+rho*(u^2+v^2)/a33",
            "S",
        ],
        &bind,
    );
    fields[4] = mp.f.clone();
    let form = parse_form([["a11*beta", "-a11*alpha"], ["alpha", "beta"]], &bind);
    Ok(mp.record(ReciprocalMap::new("mu_minus", fields, form), &bind))
}

/// The reflection `v' = -v`, `dy' = -dy` as a reciprocal map.
pub fn reflection_map() -> ReciprocalMap {
    let mut m = ReciprocalMap::identity();
    m.name = "e2".into();
    m.fields[2] = Expr::var("v").neg();
    m.form[1][1] = Expr::int(-1);
    m.inverse = Some(m.fields.clone());
    m
}

/// Rotation of the velocity and the differentials by the angle with cosine `c`, sine `s`.
pub fn rotation_map(c: &Expr, s: &Expr) -> Result<ReciprocalMap> {
    if c.is_constant() && s.is_constant() && c.mul(c).add(&s.mul(s)) != Expr::one() {
        return Err(Error::ParamConstraintViolated("c^2+s^2 must be 1".into()));
    }
    let (u, v) = (Expr::var("u"), Expr::var("v"));
    let mut m = ReciprocalMap::identity();
    m.name = "rotation".into();
    m.fields[1] = c.mul(&u).sub(&s.mul(&v));
    m.fields[2] = s.mul(&u).add(&c.mul(&v));
    m.form = [[c.clone(), s.neg()], [s.clone(), c.clone()]];
    let mut inv = m.fields.clone();
    inv[1] = c.mul(&u).add(&s.mul(&v));
    inv[2] = c.mul(&v).sub(&s.mul(&u));
    m.inverse = Some(inv);
    Ok(m.with_params(&[("c", c.clone()), ("s", s.clone())]))
}

/// `N` with `N [dx; dy]` the pair of invariant conservation forms.
fn invariant_forms(q12: &Expr, q13: &Expr, q23: &Expr) -> FormMatrix {
    let bind = [("q12", q12.clone()), ("q13", q13.clone()), ("q23", q23.clone())];
    parse_form(
        [
            ["p+q12+rho*v^2", "-(rho*u*v+q13)"],
            ["-(rho*u*v+q23)", "p+q12+rho*u^2"],
        ],
        &bind,
    )
}

/// Form `N(f')^-1 N(f)`, which keeps both conservation forms fixed.
fn preserving_form(fields: &[Expr; 5], n: &FormMatrix) -> FormMatrix {
    let probe = ReciprocalMap::new("", fields.clone(), identity_form());
    let n_new = form_map(n, |e| probe.apply_to(e));
    form_mul(&form_inverse(&n_new).expect("nondegenerate forms"), n)
}

/// Flow of `-Y`, rational in `eps`.
pub fn rational_family() -> OneParamFamily {
    let fields = parse_fields(
        [
            "rho*(1+eps*p)/(1+eps*(p+rho*(u^2+v^2)))",
            "u/(1+eps*p)",
            "v/(1+eps*p)",
            "p/(1+eps*p)",
            "S",
        ],
        &[],
    );
    let form = parse_form(
        [["1+eps*(p+rho*v^2)", "-eps*rho*u*v"], ["-eps*rho*u*v", "1+eps*(p+rho*u^2)"]],
        &[],
    );
    let mut map = ReciprocalMap::new("rational_family", fields, form);
    map.inverse = Some(map.fields.each_ref().map(|e| e.subs(&[("eps", ex("-eps"))])));
    OneParamFamily::new("rational_family", map, None, y().scale(&Expr::int(-1)))
}

/// Branch with `q13 != 0`: velocity rotates while pressure moves projectively,
/// `lambda = tan(eps*q13)`.
pub fn rotation_family(q12: &Expr, q13: &Expr) -> Result<OneParamFamily> {
    nonzero(q13, "q13")?;
    let bind = [("q12", q12.clone()), ("q13", q13.clone())];
    let fields = parse_fields(
        [
            "rho*(lambda*(p+q12)-q13)/(lambda*(p+q12+rho*(u^2+v^2))-q13)",
            "q13*(u-lambda*v)/(q13-lambda*(p+q12))",
            "q13*(v+lambda*u)/(q13-lambda*(p+q12))",
            "(q13*p+lambda*(p*q12+q12^2+q13^2))/(q13-lambda*(p+q12))",
            "S",
        ],
        &bind,
    );
    let form = preserving_form(&fields, &invariant_forms(q12, q13, &q13.neg()));
    let mut map = ReciprocalMap::new("rotation_family", fields, form).with_params(&bind);
    map.inverse = Some(map.fields.each_ref().map(|e| e.subs(&[("lambda", ex("-lambda"))])));
    let leaf = Expr::builtin(Builtin::Tan, ex("eps").mul(q13));
    let generator = y()
        .add(&x4().scale(&Expr::int(2).mul(q12)))
        .add(&x1().scale(q13))
        .add(&x5().scale(&q12.mul(q12).add(&q13.mul(q13))));
    Ok(OneParamFamily::new("rotation_family", map, Some(("lambda", leaf)), generator))
}

/// Branch with `q13 = 0`, `k1 != 0`: `lambda = exp(k1*eps)`.
pub fn exp_family(q12: &Expr, k1: &Expr, k2: &Expr) -> Result<OneParamFamily> {
    nonzero(k1, "k1")?;
    let bind = [("q12", q12.clone()), ("k1", k1.clone()), ("k2", k2.clone())];
    let den = "(k2*(lambda^2-1)*(p+q12)-2*k1)";
    let fields = parse_fields(
        [
            &format!("rho*{den}/(k2*(lambda^2-1)*(p+q12+rho*(u^2+v^2))-2*k1)"),
            &format!("-2*k1*u*lambda/{den}"),
            &format!("-2*k1*v*lambda/{den}"),
            &format!("(k2*q12*(p+q12)*(1-lambda^2)+2*k1*(q12*(1-lambda^2)-lambda^2*p))/{den}"),
            "S",
        ],
        &bind,
    );
    let form = preserving_form(&fields, &invariant_forms(q12, &Expr::zero(), &Expr::zero()));
    let mut map = ReciprocalMap::new("exp_family", fields, form).with_params(&bind);
    map.inverse = Some(map.fields.each_ref().map(|e| e.subs(&[("lambda", ex("1/lambda"))])));
    let leaf = Expr::builtin(Builtin::Exp, ex("eps").mul(k1));
    let two = Expr::int(2);
    let generator = y()
        .add(&x4().scale(&two.mul(q12)))
        .add(&x5().scale(&q12.mul(q12)))
        .scale(k2)
        .add(&x4().scale(&two).add(&x5().scale(&two.mul(q12))).sub(&x2()).scale(k1));
    Ok(OneParamFamily::new("exp_family", map, Some(("lambda", leaf)), generator))
}

/// Branch with `q13 = 0`, `k1 = 0`: `a = k2*eps`. With `printed` the pressure
/// carries the sign shown in the source display, which is not a flow of the generator.
pub fn linear_family(q12: &Expr, k2: &Expr, printed: bool) -> OneParamFamily {
    let bind = [("q12", q12.clone()), ("k2", k2.clone())];
    let pressure = if printed {
        "(p-a*q12*(p+q12))/(1-a*(p+q12))"
    } else {
        "(p+a*q12*(p+q12))/(1-a*(p+q12))"
    };
    let fields = parse_fields(
        [
            "rho*(1-a*(p+q12))/(1-a*(p+q12+rho*(u^2+v^2)))",
            "u/(1-a*(p+q12))",
            "v/(1-a*(p+q12))",
            pressure,
            "S",
        ],
        &bind,
    );
    let form = preserving_form(&fields, &invariant_forms(q12, &Expr::zero(), &Expr::zero()));
    let name = if printed { "linear_family_printed" } else { "linear_family" };
    let mut map = ReciprocalMap::new(name, fields, form).with_params(&bind);
    if !printed {
        map.inverse = Some(map.fields.each_ref().map(|e| e.subs(&[("a", ex("-a"))])));
    }
    let generator = y()
        .add(&x4().scale(&Expr::int(2).mul(q12)))
        .add(&x5().scale(&q12.mul(q12)))
        .scale(k2);
    OneParamFamily::new(name, map, Some(("a", ex("eps").mul(k2))), generator)
}

/// Projective change of density and velocity by `psi(S)`.
pub fn munk_prim(psi: &Expr) -> Result<PointMap> {
    nonzero(psi, "psi")?;
    let mut m = PointMap::identity();
    m.name = "munk_prim".into();
    m.fields[0] = Expr::var("rho").mul(&psi.pow(-2)?);
    m.fields[1] = Expr::var("u").mul(psi);
    m.fields[2] = Expr::var("v").mul(psi);
    Ok(m)
}

pub fn e1() -> PointMap {
    let mut m = PointMap::identity();
    m.name = "e1".into();
    m.coords[0] = ex("-x");
    m.fields[1] = ex("-u");
    m
}

pub fn e2() -> PointMap {
    let mut m = PointMap::identity();
    m.name = "e2".into();
    m.coords[1] = ex("-y");
    m.fields[2] = ex("-v");
    m
}

/// Rotation of the plane and the velocity, cosine `c`, sine `s`.
pub fn rotation(c: &Expr, s: &Expr) -> Result<PointMap> {
    let r = rotation_map(c, s)?;
    let mut m = PointMap::identity();
    m.name = "rotation".into();
    m.coords = [
        c.mul(&Expr::var("x")).sub(&s.mul(&Expr::var("y"))),
        s.mul(&Expr::var("x")).add(&c.mul(&Expr::var("y"))),
    ];
    m.fields = r.fields;
    Ok(m)
}

/// `{Y, X4, X5}`, the second derived algebra with the generator as printed.
pub fn printed_basis() -> Vec<(&'static str, Generator)> {
    vec![("X3", y()), ("X4", x4()), ("X5", x5())]
}
