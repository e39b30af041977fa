//! Exact symbolic kernel: rational functions over ℚ in named variables and
//! formal function applications.

pub mod atom;
pub mod eval;
pub mod expr;
pub mod parse;
pub mod poly;
pub mod vars;

pub use atom::{Atom, AtomKind, Builtin, FuncHead, Symbol};
pub use eval::{eval_exact, eval_hp, eval_numeric, Compiled, FnImpl, FnImpls};
pub use expr::Expr;
pub use parse::{parse, parse_tree, Tree};
pub use poly::{Monomial, Poly};
pub use vars::{Role, VarTable};

/// Parses a constant or expression literal, panicking on malformed input.
/// Intended for built-in tables whose text is fixed at compile time.
pub fn ex(src: &str) -> Expr {
    match parse(src) {
        Ok(e) => e,
        Err(err) => panic!("built-in expression `{src}` failed to parse: {err}"),
    }
}

pub fn sym(name: &str) -> Symbol {
    Symbol::new(name)
}
