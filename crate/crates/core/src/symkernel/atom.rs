//! Symbols and polynomial generators.
//!
//! An [`Atom`] is an opaque generator of the polynomial ring the kernel works
//! in: either a named variable or a function application. Function atoms
//! cover both formal (arbitrary) functions such as `h(S)` with their
//! derivative markers, and the transcendental leaves `tan`, `sin`, `cos`,
//! `exp`, `ln` and `sqrt` which only matter for numeric evaluation.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::expr::Expr;

/// Variable order used for canonical output. Names not listed here sort
/// after all listed names, lexicographically.
const DECLARED_ORDER: &[&str] = &[
    "x", "y", "rho", "u", "v", "p", "S", "rho_x", "rho_y", "u_x", "u_y", "v_x", "v_y", "p_x",
    "p_y", "S_x", "S_y", "dx", "dy", "epsilon", "lambda", "k", "k1", "k2", "q11", "q12", "q13",
    "q21", "q22", "q23", "b1", "b2", "b3", "b4", "a11", "a33", "a34", "a35", "a43", "a44", "a45",
    "a53", "a54", "a55", "alpha", "beta", "g", "mu",
];

fn declared_rank(name: &str) -> usize {
    DECLARED_ORDER
        .iter()
        .position(|n| *n == name)
        .unwrap_or(DECLARED_ORDER.len())
}

/// Interned-by-value variable name.
#[derive(Clone)]
pub struct Symbol {
    name: Arc<str>,
    rank: usize,
}

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol {
            name: Arc::from(name),
            rank: declared_rank(name),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}
impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state)
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank
            .cmp(&other.rank)
            .then_with(|| self.name.cmp(&other.name))
    }
}
impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Transcendental functions understood by the numeric evaluator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Builtin {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        Some(match name {
            "sin" => Builtin::Sin,
            "cos" => Builtin::Cos,
            "tan" => Builtin::Tan,
            "exp" => Builtin::Exp,
            "ln" | "log" => Builtin::Ln,
            "sqrt" => Builtin::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
            Builtin::Tan => "tan",
            Builtin::Exp => "exp",
            Builtin::Ln => "ln",
            Builtin::Sqrt => "sqrt",
        }
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Builtin::Sin => x.sin(),
            Builtin::Cos => x.cos(),
            Builtin::Tan => x.tan(),
            Builtin::Exp => x.exp(),
            Builtin::Ln => x.ln(),
            Builtin::Sqrt => x.sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FuncHead {
    Builtin(Builtin),
    /// Arbitrary function; `derivs[i]` is the derivative order in argument `i`.
    Formal { name: Symbol, derivs: Vec<u32> },
}

#[derive(Debug)]
pub enum AtomKind {
    Var(Symbol),
    Func {
        head: FuncHead,
        args: Vec<Expr>,
        free: BTreeSet<Symbol>,
    },
}

/// A polynomial generator. Cheap to clone.
#[derive(Clone)]
pub struct Atom(Arc<AtomKind>);

impl Atom {
    pub fn var(sym: Symbol) -> Atom {
        Atom(Arc::new(AtomKind::Var(sym)))
    }

    pub fn func(head: FuncHead, args: Vec<Expr>) -> Atom {
        let mut free = BTreeSet::new();
        for a in &args {
            free.extend(a.free_symbols());
        }
        Atom(Arc::new(AtomKind::Func { head, args, free }))
    }

    pub fn kind(&self) -> &AtomKind {
        &self.0
    }

    pub fn as_var(&self) -> Option<&Symbol> {
        match &*self.0 {
            AtomKind::Var(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_var(&self, sym: &Symbol) -> bool {
        matches!(&*self.0, AtomKind::Var(s) if s == sym)
    }

    /// Whether `sym` occurs in this atom (as the variable itself or inside arguments).
    pub fn depends_on(&self, sym: &Symbol) -> bool {
        match &*self.0 {
            AtomKind::Var(s) => s == sym,
            AtomKind::Func { free, .. } => free.contains(sym),
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        match &*self.0 {
            AtomKind::Var(s) => std::iter::once(s.clone()).collect(),
            AtomKind::Func { free, .. } => free.clone(),
        }
    }

    pub fn is_formal(&self) -> bool {
        matches!(
            &*self.0,
            AtomKind::Func {
                head: FuncHead::Formal { .. },
                ..
            }
        )
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Atom {}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        match (&*self.0, &*other.0) {
            (AtomKind::Var(a), AtomKind::Var(b)) => a.cmp(b),
            (AtomKind::Var(_), AtomKind::Func { .. }) => Ordering::Less,
            (AtomKind::Func { .. }, AtomKind::Var(_)) => Ordering::Greater,
            (
                AtomKind::Func {
                    head: ha, args: aa, ..
                },
                AtomKind::Func {
                    head: hb, args: ab, ..
                },
            ) => ha.cmp(hb).then_with(|| aa.cmp(ab)),
        }
    }
}
impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for Atom {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &*self.0 {
            AtomKind::Var(s) => {
                0u8.hash(state);
                s.hash(state);
            }
            AtomKind::Func { head, args, .. } => {
                1u8.hash(state);
                head.hash(state);
                args.hash(state);
            }
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            AtomKind::Var(s) => write!(f, "{s}"),
            AtomKind::Func { head, args, .. } => {
                match head {
                    FuncHead::Builtin(b) => f.write_str(b.name())?,
                    FuncHead::Formal { name, derivs } => {
                        f.write_str(name.name())?;
                        if derivs.len() == 1 {
                            for _ in 0..derivs[0] {
                                f.write_str("'")?;
                            }
                        } else if derivs.iter().any(|&d| d > 0) {
                            let parts: Vec<String> = derivs.iter().map(|d| d.to_string()).collect();
                            write!(f, "'{{{}}}", parts.join(","))?;
                        }
                    }
                }
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
