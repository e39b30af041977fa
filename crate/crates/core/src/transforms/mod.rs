//! Explicit reciprocal and point transformations, and checks on them.

pub mod appendix;
pub mod catalog;
pub mod lie;
pub mod normal;
pub mod push;
pub mod verify;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::generator::{form_det, form_inverse, form_map, form_mul, identity_form};
use crate::liealg::FormMatrix;
use crate::symkernel::vars::{Role, FIELDS};
use crate::symkernel::{parse, Atom, Expr, Symbol, VarTable};

pub use appendix::{appendix_pde_residuals, AppendixReport, Relation};
pub use catalog::{catalog, catalog_names, CatalogEntry};
pub use lie::{composition_check, lie_equation_check, LieReport, OneParamFamily, SampleConfig};
pub use normal::{normal_form, NormalForm};
pub use push::{automorphism_matrix, decompose, image_of, pushforward, pushforward_raw};
pub use verify::{verify_point_symmetry, verify_reciprocal, MapReport, PointReport};

/// `rho' = R, u' = U, v' = V, p' = P, S' = H` with
/// `dx' = form[0][0] dx + form[0][1] dy`, `dy' = form[1][0] dx + form[1][1] dy`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReciprocalMap {
    pub name: String,
    pub fields: [Expr; 5],
    pub form: FormMatrix,
    pub params: BTreeMap<String, Expr>,
    /// Original fields in terms of the new ones, written with the unprimed names.
    pub inverse: Option<[Expr; 5]>,
}

fn field_vars() -> [Expr; 5] {
    FIELDS.map(Expr::var)
}

impl ReciprocalMap {
    pub fn new(name: &str, fields: [Expr; 5], form: FormMatrix) -> ReciprocalMap {
        ReciprocalMap {
            name: name.into(),
            fields,
            form,
            params: BTreeMap::new(),
            inverse: None,
        }
    }

    pub fn identity() -> ReciprocalMap {
        let mut m = ReciprocalMap::new("identity", field_vars(), identity_form());
        m.inverse = Some(field_vars());
        m
    }

    pub fn with_params(mut self, params: &[(&str, Expr)]) -> Self {
        for (k, v) in params {
            self.params.insert(k.to_string(), v.clone());
        }
        self
    }

    pub fn field(&self, name: &str) -> &Expr {
        let i = FIELDS.iter().position(|f| *f == name).expect("gas field name");
        &self.fields[i]
    }

    /// `f -> T_f` for the five fields.
    pub fn bindings(&self) -> BTreeMap<Symbol, Expr> {
        FIELDS
            .iter()
            .zip(&self.fields)
            .map(|(f, e)| (Symbol::new(f), e.clone()))
            .collect()
    }

    /// `e` evaluated at the new fields, as a function of the old ones.
    pub fn apply_to(&self, e: &Expr) -> Expr {
        e.subs_unchecked(&self.bindings())
    }

    pub fn det(&self) -> Expr {
        form_det(&self.form)
    }

    pub fn is_identity(&self) -> bool {
        self.fields == field_vars() && self.form == identity_form()
    }

    pub fn form_is_constant(&self) -> bool {
        self.form.iter().flatten().all(|e| {
            !e.atoms().iter().any(|a| {
                a.is_formal() || a.free_symbols().iter().any(|s| FIELDS.contains(&s.name()))
            })
        })
    }

    /// Applies `f` to every component, including the stored inverse.
    pub fn map_exprs(&self, f: impl Fn(&Expr) -> Expr) -> ReciprocalMap {
        ReciprocalMap {
            name: self.name.clone(),
            fields: self.fields.each_ref().map(&f),
            form: form_map(&self.form, &f),
            params: self.params.clone(),
            inverse: self.inverse.as_ref().map(|i| i.each_ref().map(&f)),
        }
    }

    /// Substitutes values for parameters; the parameter record is updated too.
    pub fn subs_params(&self, values: &[(&str, Expr)]) -> ReciprocalMap {
        let mut m = self.map_exprs(|e| e.subs(values));
        for (k, v) in values {
            if let Some(old) = m.params.get_mut(*k) {
                *old = v.clone();
            }
        }
        for v in m.params.values_mut() {
            *v = v.subs(values);
        }
        m
    }

    /// Rejects jets, coordinates or differentials in the components, a vanishing
    /// density and a degenerate form.
    pub fn validate(&self) -> Result<()> {
        let t = VarTable::gas();
        for e in self.fields.iter().chain(self.form.iter().flatten()) {
            for s in e.free_symbols() {
                if matches!(
                    t.role(s.name()),
                    Some(Role::Jet | Role::Differential | Role::Coordinate)
                ) {
                    return Err(Error::VariableMismatch(format!("{e} depends on {}", s.name())));
                }
            }
        }
        if self.fields[0].is_zero() {
            return Err(Error::InvalidParams("R vanishes identically".into()));
        }
        if self.det().is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(())
    }

    pub fn to_file(&self) -> MapFile {
        let s = |e: &Expr| e.to_string();
        MapFile {
            name: Some(self.name.clone()),
            fields: FieldStrings::from(&self.fields),
            form: [
                [s(&self.form[0][0]), s(&self.form[0][1])],
                [s(&self.form[1][0]), s(&self.form[1][1])],
            ],
            params: self.params.iter().map(|(k, v)| (k.clone(), s(v))).collect(),
            inverse: self.inverse.as_ref().map(FieldStrings::from),
        }
    }
}

/// On-disk layout of a map: expression strings for each component.
#[allow(non_snake_case)]
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldStrings {
    pub R: String,
    pub U: String,
    pub V: String,
    pub P: String,
    pub H: String,
}

impl From<&[Expr; 5]> for FieldStrings {
    fn from(f: &[Expr; 5]) -> Self {
        FieldStrings {
            R: f[0].to_string(),
            U: f[1].to_string(),
            V: f[2].to_string(),
            P: f[3].to_string(),
            H: f[4].to_string(),
        }
    }
}

impl FieldStrings {
    fn parse(&self) -> Result<[Expr; 5]> {
        Ok([
            parse(&self.R)?,
            parse(&self.U)?,
            parse(&self.V)?,
            parse(&self.P)?,
            parse(&self.H)?,
        ])
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MapFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(flatten)]
    pub fields: FieldStrings,
    pub form: [[String; 2]; 2],
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default)]
    pub inverse: Option<FieldStrings>,
}

impl MapFile {
    /// Parses the file; parameter values are substituted into the components.
    pub fn to_map(&self) -> Result<ReciprocalMap> {
        let form = [
            [parse(&self.form[0][0])?, parse(&self.form[0][1])?],
            [parse(&self.form[1][0])?, parse(&self.form[1][1])?],
        ];
        let mut m = ReciprocalMap::new(
            self.name.as_deref().unwrap_or("file"),
            self.fields.parse()?,
            form,
        );
        m.inverse = self.inverse.as_ref().map(|i| i.parse()).transpose()?;
        let mut values = Vec::new();
        for (k, v) in &self.params {
            values.push((k.as_str(), parse(v)?));
        }
        let m = m.subs_params(&values).with_params(&values);
        m.validate()?;
        Ok(m)
    }
}

/// `t1` after `t2`.
pub fn compose(t1: &ReciprocalMap, t2: &ReciprocalMap) -> ReciprocalMap {
    let fields = t1.fields.each_ref().map(|e| t2.apply_to(e));
    let outer = form_map(&t1.form, |e| t2.apply_to(e));
    let inverse = match (&t1.inverse, &t2.inverse) {
        (Some(i1), Some(i2)) => {
            let b: BTreeMap<Symbol, Expr> = FIELDS
                .iter()
                .zip(i1)
                .map(|(f, e)| (Symbol::new(f), e.clone()))
                .collect();
            Some(i2.each_ref().map(|e| e.subs_unchecked(&b)))
        }
        _ => None,
    };
    ReciprocalMap {
        name: format!("{}*{}", t1.name, t2.name),
        fields,
        form: form_mul(&outer, &t2.form),
        params: t1.params.iter().chain(&t2.params).map(|(k, v)| (k.clone(), v.clone())).collect(),
        inverse,
    }
}

/// The inverse map, using the stored inverse fields or solving for them.
pub fn invert(t: &ReciprocalMap) -> Result<ReciprocalMap> {
    let inv = match &t.inverse {
        Some(i) => i.clone(),
        None => solve_inverse(t)?,
    };
    let b: BTreeMap<Symbol, Expr> = FIELDS
        .iter()
        .zip(&inv)
        .map(|(f, e)| (Symbol::new(f), e.clone()))
        .collect();
    let form = form_inverse(&form_map(&t.form, |e| e.subs_unchecked(&b)))
        .map_err(|_| Error::NotInvertible("degenerate form".into()))?;
    Ok(ReciprocalMap {
        name: format!("{}^-1", t.name),
        fields: inv,
        form,
        params: t.params.clone(),
        inverse: Some(t.fields.clone()),
    })
}

fn depends_on_any(e: &Expr, names: &[&str]) -> bool {
    e.atoms().iter().any(|a: &Atom| a.free_symbols().iter().any(|s| names.contains(&s.name())))
}

/// `(a, b)` with `e = a*x + b` and `a, b` free of `x`, if `e` is affine in `x`.
fn affine(e: &Expr, x: &str) -> Option<(Expr, Expr)> {
    let a = e.diff_name(x);
    let b = e.sub(&a.mul(&Expr::var(x)));
    if depends_on_any(&a, &[x]) || depends_on_any(&b, &[x]) {
        return None;
    }
    Some((a, b))
}

/// `(a, b, c, d)` with `e = (a x + b)/(c x + d)`.
fn linear_fractional(e: &Expr, x: &str) -> Option<(Expr, Expr, Expr, Expr)> {
    let num = Expr::from_poly(e.num().clone());
    let den = Expr::from_poly(e.den().clone());
    let (a, b) = affine(&num, x)?;
    let (c, d) = affine(&den, x)?;
    Some((a, b, c, d))
}

/// Inverts maps with `H = S`, `P` linear-fractional in `p` alone, `U, V` linear in
/// `u, v` with coefficients free of `rho`, and `R` linear-fractional in `rho`.
pub fn solve_inverse(t: &ReciprocalMap) -> Result<[Expr; 5]> {
    let fail = |why: &str| Error::NotInvertible(format!("{}: {why}", t.name));
    let [r, uu, vv, pp, h] = &t.fields;
    if *h != Expr::var("S") {
        return Err(fail("entropy relabeling is not inverted"));
    }
    if depends_on_any(pp, &["rho", "u", "v", "S"]) || pp.atoms().iter().any(|a| a.is_formal()) {
        return Err(fail("P depends on more than p"));
    }
    let (a, b, c, d) = linear_fractional(pp, "p").ok_or_else(|| fail("P not linear-fractional"))?;
    let p = Expr::var("p");
    let p_inv = d.mul(&p).sub(&b).div(&a.sub(&c.mul(&p))).map_err(|_| fail("P is constant"))?;

    let lin = |e: &Expr| -> Option<(Expr, Expr)> {
        let cu = e.diff_name("u");
        let cv = e.diff_name("v");
        let rest = e.sub(&cu.mul(&Expr::var("u"))).sub(&cv.mul(&Expr::var("v")));
        let bad = |x: &Expr| depends_on_any(x, &["rho", "u", "v"]);
        if bad(&cu) || bad(&cv) || !rest.is_zero() {
            return None;
        }
        Some((cu, cv))
    };
    let (m00, m01) = lin(uu).ok_or_else(|| fail("U not linear in the velocity"))?;
    let (m10, m11) = lin(vv).ok_or_else(|| fail("V not linear in the velocity"))?;
    let at_p = |e: &Expr| e.subs(&[("p", p_inv.clone())]);
    let (m00, m01, m10, m11) = (at_p(&m00), at_p(&m01), at_p(&m10), at_p(&m11));
    let det = m00.mul(&m11).sub(&m01.mul(&m10));
    let idet = det.recip().map_err(|_| fail("velocity map is singular"))?;
    let (u, v) = (Expr::var("u"), Expr::var("v"));
    let u_inv = m11.mul(&u).sub(&m01.mul(&v)).mul(&idet);
    let v_inv = m00.mul(&v).sub(&m10.mul(&u)).mul(&idet);

    let (ra, rb, rc, rd) = linear_fractional(r, "rho").ok_or_else(|| fail("R not linear-fractional"))?;
    let back = |e: &Expr| e.subs(&[("u", u_inv.clone()), ("v", v_inv.clone()), ("p", p_inv.clone())]);
    let (ra, rb, rc, rd) = (back(&ra), back(&rb), back(&rc), back(&rd));
    let rho = Expr::var("rho");
    let rho_inv = rd
        .mul(&rho)
        .sub(&rb)
        .div(&ra.sub(&rc.mul(&rho)))
        .map_err(|_| fail("R does not depend on rho"))?;

    let inv = [rho_inv, u_inv, v_inv, p_inv, Expr::var("S")];
    let b: BTreeMap<Symbol, Expr> = FIELDS
        .iter()
        .zip(&inv)
        .map(|(f, e)| (Symbol::new(f), e.clone()))
        .collect();
    for (f, e) in FIELDS.iter().zip(&t.fields) {
        if e.subs_unchecked(&b) != Expr::var(f) {
            return Err(fail("inverse check failed"));
        }
    }
    Ok(inv)
}

/// A change of the coordinates and fields: `x' = coords[0]`, `y' = coords[1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMap {
    pub name: String,
    pub coords: [Expr; 2],
    pub fields: [Expr; 5],
}

impl PointMap {
    pub fn identity() -> PointMap {
        PointMap {
            name: "identity".into(),
            coords: [Expr::var("x"), Expr::var("y")],
            fields: field_vars(),
        }
    }

    fn bindings(&self) -> BTreeMap<Symbol, Expr> {
        let mut b: BTreeMap<Symbol, Expr> = FIELDS
            .iter()
            .zip(&self.fields)
            .map(|(f, e)| (Symbol::new(f), e.clone()))
            .collect();
        b.insert(Symbol::new("x"), self.coords[0].clone());
        b.insert(Symbol::new("y"), self.coords[1].clone());
        b
    }

    pub fn is_identity(&self) -> bool {
        *self == PointMap { name: self.name.clone(), ..PointMap::identity() }
    }
}

/// `a` after `b` for point maps.
pub fn compose_point(a: &PointMap, b: &PointMap) -> PointMap {
    let bb = b.bindings();
    PointMap {
        name: format!("{}*{}", a.name, b.name),
        coords: a.coords.each_ref().map(|e| e.subs_unchecked(&bb)),
        fields: a.fields.each_ref().map(|e| e.subs_unchecked(&bb)),
    }
}
