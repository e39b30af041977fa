//! Generators acting on the fields and on the differentials `dx, dy`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symkernel::vars::{Role, FIELDS};
use crate::symkernel::{parse, Expr, Symbol, VarTable};

pub type FormMatrix = [[Expr; 2]; 2];

pub fn zero_form() -> FormMatrix {
    [[Expr::zero(), Expr::zero()], [Expr::zero(), Expr::zero()]]
}

pub fn identity_form() -> FormMatrix {
    [[Expr::one(), Expr::zero()], [Expr::zero(), Expr::one()]]
}

pub fn form_mul(a: &FormMatrix, b: &FormMatrix) -> FormMatrix {
    let e = |i: usize, j: usize| a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn form_add(a: &FormMatrix, b: &FormMatrix) -> FormMatrix {
    let e = |i: usize, j: usize| a[i][j].add(&b[i][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn form_map(a: &FormMatrix, f: impl Fn(&Expr) -> Expr) -> FormMatrix {
    [[f(&a[0][0]), f(&a[0][1])], [f(&a[1][0]), f(&a[1][1])]]
}

pub fn form_det(a: &FormMatrix) -> Expr {
    a[0][0].mul(&a[1][1]).sub(&a[0][1].mul(&a[1][0]))
}

pub fn form_inverse(a: &FormMatrix) -> Result<FormMatrix> {
    let d = form_det(a);
    let inv = d.recip().map_err(|_| Error::SingularMatrix)?;
    Ok([
        [a[1][1].mul(&inv), a[0][1].neg().mul(&inv)],
        [a[1][0].neg().mul(&inv), a[0][0].mul(&inv)],
    ])
}

/// `sum_f zeta^f d/df + zeta^dx d/d(dx) + zeta^dy d/d(dy)` with
/// `zeta^dx = form[0][0] dx + form[0][1] dy` and `zeta^dy = form[1][0] dx + form[1][1] dy`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    /// Coefficients of `d/drho, d/du, d/dv, d/dp, d/dS`.
    pub fields: [Expr; 5],
    pub form: FormMatrix,
}

impl Generator {
    pub fn zero() -> Generator {
        Generator {
            fields: std::array::from_fn(|_| Expr::zero()),
            form: zero_form(),
        }
    }

    pub fn new(fields: [Expr; 5], form: FormMatrix) -> Generator {
        Generator { fields, form }
    }

    /// Parses the seven slots from expression strings.
    pub fn parse(fields: [&str; 5], form: [[&str; 2]; 2]) -> Result<Generator> {
        let mut f = Vec::with_capacity(5);
        for s in fields {
            f.push(parse(s)?);
        }
        let m = [
            [parse(form[0][0])?, parse(form[0][1])?],
            [parse(form[1][0])?, parse(form[1][1])?],
        ];
        Ok(Generator {
            fields: f.try_into().unwrap(),
            form: m,
        })
    }

    pub fn field(&self, name: &str) -> &Expr {
        let i = FIELDS.iter().position(|f| *f == name).expect("gas field name");
        &self.fields[i]
    }

    pub fn is_zero(&self) -> bool {
        self.slots().iter().all(|e| e.is_zero())
    }

    /// The nine slots in the order `rho, u, v, p, S, xx, yx, xy, yy`.
    pub fn slots(&self) -> [Expr; 9] {
        let f = &self.fields;
        let m = &self.form;
        [
            f[0].clone(),
            f[1].clone(),
            f[2].clone(),
            f[3].clone(),
            f[4].clone(),
            m[0][0].clone(),
            m[0][1].clone(),
            m[1][0].clone(),
            m[1][1].clone(),
        ]
    }

    pub fn from_slots(s: [Expr; 9]) -> Generator {
        let [a, b, c, d, e, m00, m01, m10, m11] = s;
        Generator {
            fields: [a, b, c, d, e],
            form: [[m00, m01], [m10, m11]],
        }
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Generator {
        Generator::from_slots(self.slots().map(|e| f(&e)))
    }

    /// Applies the field part to a scalar function of the fields.
    pub fn apply(&self, g: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (name, z) in FIELDS.iter().zip(&self.fields) {
            if z.is_zero() {
                continue;
            }
            let d = g.diff(&Symbol::new(name));
            if !d.is_zero() {
                out = out.add(&z.mul(&d));
            }
        }
        out
    }

    pub fn add(&self, o: &Generator) -> Generator {
        let a = self.slots();
        let b = o.slots();
        Generator::from_slots(std::array::from_fn(|i| a[i].add(&b[i])))
    }

    pub fn sub(&self, o: &Generator) -> Generator {
        self.add(&o.scale(&Expr::int(-1)))
    }

    pub fn scale(&self, k: &Expr) -> Generator {
        self.map(|e| e.mul(k))
    }

    pub fn subs(&self, pairs: &[(&str, Expr)]) -> Generator {
        self.map(|e| e.subs(pairs))
    }

    pub fn subs_map(&self, m: &BTreeMap<Symbol, Expr>) -> Generator {
        self.map(|e| e.subs_unchecked(m))
    }

    /// Rejects coefficients that mention jets or differentials.
    pub fn validate(&self) -> Result<()> {
        let t = VarTable::gas();
        for e in self.slots() {
            for s in e.free_symbols() {
                if matches!(t.role(s.name()), Some(Role::Jet | Role::Differential)) {
                    return Err(Error::VariableMismatch(format!(
                        "coefficient {e} depends on {}",
                        s.name()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_file(&self) -> GeneratorFile {
        let s = |e: &Expr| e.to_string();
        GeneratorFile {
            zeta_rho: s(&self.fields[0]),
            zeta_u: s(&self.fields[1]),
            zeta_v: s(&self.fields[2]),
            zeta_p: s(&self.fields[3]),
            zeta_S: s(&self.fields[4]),
            form: [
                [s(&self.form[0][0]), s(&self.form[0][1])],
                [s(&self.form[1][0]), s(&self.form[1][1])],
            ],
        }
    }
}

/// `[X, Y]` including the action on the differentials.
pub fn commutator(x: &Generator, y: &Generator) -> Result<Generator> {
    x.validate()?;
    y.validate()?;
    let fields = std::array::from_fn(|i| x.apply(&y.fields[i]).sub(&y.apply(&x.fields[i])));
    let xm = form_map(&y.form, |e| x.apply(e));
    let ym = form_map(&x.form, |e| y.apply(e));
    let a = form_mul(&y.form, &x.form);
    let b = form_mul(&x.form, &y.form);
    let form = std::array::from_fn(|i| {
        std::array::from_fn(|j| xm[i][j].sub(&ym[i][j]).add(&a[i][j]).sub(&b[i][j]))
    });
    Ok(Generator { fields, form })
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, z) in FIELDS.iter().zip(&self.fields) {
            if !z.is_zero() {
                parts.push(format!("({z})*d_{name}"));
            }
        }
        for (r, d) in ["dx", "dy"].iter().enumerate() {
            let (a, b) = (&self.form[r][0], &self.form[r][1]);
            if !a.is_zero() || !b.is_zero() {
                parts.push(format!("(({a})*dx + ({b})*dy)*d_{d}"));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// On-disk generator layout; `form` rows are `[xx, yx]` for `dx` and `[xy, yy]` for `dy`.
#[allow(non_snake_case)]
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GeneratorFile {
    pub zeta_rho: String,
    pub zeta_u: String,
    pub zeta_v: String,
    pub zeta_p: String,
    pub zeta_S: String,
    pub form: [[String; 2]; 2],
}

impl GeneratorFile {
    pub fn to_generator(&self) -> Result<Generator> {
        let g = Generator::parse(
            [
                &self.zeta_rho,
                &self.zeta_u,
                &self.zeta_v,
                &self.zeta_p,
                &self.zeta_S,
            ],
            [
                [&self.form[0][0], &self.form[0][1]],
                [&self.form[1][0], &self.form[1][1]],
            ],
        )?;
        g.validate()?;
        Ok(g)
    }
}

/// Generator of point equivalence transformations: acts on `x, y` and the fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceGenerator {
    pub xi: [Expr; 2],
    pub fields: [Expr; 5],
}

impl EquivalenceGenerator {
    pub fn parse(xi: [&str; 2], fields: [&str; 5]) -> Result<EquivalenceGenerator> {
        let mut f = Vec::new();
        for s in fields {
            f.push(parse(s)?);
        }
        Ok(EquivalenceGenerator {
            xi: [parse(xi[0])?, parse(xi[1])?],
            fields: f.try_into().unwrap(),
        })
    }
}
