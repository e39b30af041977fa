//! Linear span membership for generators with rational-function coefficients.

use std::collections::{BTreeMap, BTreeSet};

use crate::linalg;
use crate::symkernel::vars::{COORDS, FIELDS};
use crate::symkernel::{Atom, Expr, Monomial, Poly, Symbol};

use super::generator::Generator;

/// Atoms that depend on a coordinate or on one of the fields except `S`.
pub fn depends_on_state(a: &Atom) -> bool {
    a.free_symbols()
        .iter()
        .any(|s| COORDS.contains(&s.name()) || (FIELDS.contains(&s.name()) && s.name() != "S"))
}

/// Atoms that depend on a coordinate or any field, or are formal function applications.
pub fn non_parameter(a: &Atom) -> bool {
    a.is_formal()
        || a.free_symbols()
            .iter()
            .any(|s| COORDS.contains(&s.name()) || FIELDS.contains(&s.name()))
}

fn lcm(a: &Poly, b: &Poly) -> Poly {
    let g = a.gcd(b);
    a.mul(&b.div_exact(&g).expect("gcd divides"))
}

/// Rows of the linear system `sum_i c_i columns_i = target` obtained by clearing
/// denominators slot by slot and comparing coefficients of monomials in the atoms
/// selected by `is_var`.
pub fn coefficient_rows(
    target: &Generator,
    columns: &[Generator],
    is_var: &dyn Fn(&Atom) -> bool,
) -> (Vec<Vec<Expr>>, Vec<Expr>) {
    let t_slots = target.slots();
    let c_slots: Vec<[Expr; 9]> = columns.iter().map(|g| g.slots()).collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for k in 0..9 {
        let mut l = t_slots[k].den().clone();
        for c in &c_slots {
            l = lcm(&l, c[k].den());
        }
        let le = Expr::from_poly(l);
        let mut atoms: BTreeSet<Atom> = BTreeSet::new();
        let mut scaled = Vec::with_capacity(columns.len() + 1);
        for e in c_slots.iter().map(|c| &c[k]).chain(std::iter::once(&t_slots[k])) {
            let s = e.mul(&le);
            atoms.extend(s.atoms().into_iter().filter(|a| is_var(a)));
            scaled.push(s);
        }
        let mut table: BTreeMap<Monomial, Vec<Expr>> = BTreeMap::new();
        let n = columns.len();
        for (i, s) in scaled.iter().enumerate() {
            let coeffs = s.collect_atoms(&atoms).expect("denominators cleared");
            for (m, c) in coeffs {
                table.entry(m).or_insert_with(|| vec![Expr::zero(); n + 1])[i] = c;
            }
        }
        for (_, mut row) in table {
            rhs.push(row.pop().unwrap());
            rows.push(row);
        }
    }
    (rows, rhs)
}

/// Coefficients `c` with `sum c_i columns_i = target`, constant with respect to
/// the atoms selected by `is_var`; `None` if there is no such combination.
pub fn solve_in_span(
    target: &Generator,
    columns: &[Generator],
    is_var: &dyn Fn(&Atom) -> bool,
) -> Option<Vec<Expr>> {
    if columns.is_empty() {
        return if target.is_zero() { Some(Vec::new()) } else { None };
    }
    let (rows, rhs) = coefficient_rows(target, columns, is_var);
    if rows.is_empty() {
        return Some(vec![Expr::zero(); columns.len()]);
    }
    linalg::solve(&rows, &rhs)
}

/// Generator combination `sum c_i g_i`.
pub fn combine(coeffs: &[Expr], gens: &[Generator]) -> Generator {
    let mut out = Generator::zero();
    for (c, g) in coeffs.iter().zip(gens) {
        if !c.is_zero() {
            out = out.add(&g.scale(c));
        }
    }
    out
}

/// Whether an expression mentions `S` or any formal function.
pub fn involves_functions(e: &Expr) -> bool {
    let s = Symbol::new("S");
    e.atoms().iter().any(|a| a.is_formal() || a.depends_on(&s))
}
