//! Infix expression parser.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | power
//! power   := primary ('^' ['-'] integer | '^' '(' ['-'] integer ')')?
//! primary := number | ident | ident marks '(' args ')' | '(' sum ')'
//! marks   := "'"* | "'{" integer (',' integer)* '}'
//! ```
//!
//! Numbers are integers or decimals (read exactly). Identifiers that name
//! a built-in (`sin`, `cos`, `tan`, `exp`, `ln`, `sqrt`) become built-in
//! applications; any other applied identifier is a formal function.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::atom::Builtin;
use super::expr::Expr;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(BigRational),
    Ident(String),
    Call {
        name: String,
        derivs: Option<Vec<u32>>,
        args: Vec<Tree>,
    },
    Neg(Box<Tree>),
    Add(Box<Tree>, Box<Tree>),
    Sub(Box<Tree>, Box<Tree>),
    Mul(Box<Tree>, Box<Tree>),
    Div(Box<Tree>, Box<Tree>),
    Pow(Box<Tree>, i64),
}

/// Parsed syntax tree with source positions.
#[derive(Clone, Debug, PartialEq)]
pub struct Tree {
    pub node: Node,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
    Marks(Vec<u32>),
    End,
}

struct Lexer {
    toks: Vec<(Tok, Span)>,
}

fn span_of(src: &str, byte: usize) -> Span {
    let before = &src[..byte];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map(|s| s.chars().count()).unwrap_or(0) + 1;
    Span { line, col }
}

fn perr(src: &str, byte: usize, msg: impl Into<String>) -> Error {
    let s = span_of(src, byte);
    Error::Parse {
        line: s.line,
        col: s.col,
        msg: msg.into(),
    }
}

impl Lexer {
    fn new(src: &str) -> Result<Lexer> {
        let b = src.as_bytes();
        let mut i = 0;
        let mut toks = Vec::new();
        while i < b.len() {
            let c = b[i] as char;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            if c.is_ascii_digit() || (c == '.' && i + 1 < b.len() && (b[i + 1] as char).is_ascii_digit()) {
                while i < b.len() && (b[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let int_part = &src[start..i];
                let mut value = if int_part.is_empty() {
                    BigRational::zero()
                } else {
                    BigRational::from_integer(int_part.parse::<BigInt>().unwrap())
                };
                if i < b.len() && b[i] == b'.' {
                    i += 1;
                    let fs = i;
                    while i < b.len() && (b[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                    let frac = &src[fs..i];
                    if !frac.is_empty() {
                        let n: BigInt = frac.parse().unwrap();
                        let d = num_traits::pow(BigInt::from(10), frac.len());
                        value += BigRational::new(n, d);
                    }
                }
                toks.push((Tok::Num(value), span_of(src, start)));
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), span_of(src, start)));
                continue;
            }
            if c == '\'' {
                if i + 1 < b.len() && b[i + 1] == b'{' {
                    i += 2;
                    let close = src[i..]
                        .find('}')
                        .ok_or_else(|| perr(src, start, "unterminated derivative marker"))?;
                    let body = &src[i..i + close];
                    let mut orders = Vec::new();
                    for part in body.split(',') {
                        let t = part.trim();
                        let n: u32 = t
                            .parse()
                            .map_err(|_| perr(src, i, format!("bad derivative order `{t}`")))?;
                        orders.push(n);
                    }
                    i += close + 1;
                    toks.push((Tok::Marks(orders), span_of(src, start)));
                } else {
                    let mut n = 0;
                    while i < b.len() && b[i] == b'\'' {
                        n += 1;
                        i += 1;
                    }
                    toks.push((Tok::Marks(vec![n]), span_of(src, start)));
                }
                continue;
            }
            if "+-*/^(),".contains(c) {
                toks.push((Tok::Op(c), span_of(src, start)));
                i += 1;
                continue;
            }
            return Err(perr(src, start, format!("unexpected character `{c}`")));
        }
        toks.push((Tok::End, span_of(src, b.len())));
        Ok(Lexer { toks })
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let s = self.span();
        let _ = self.src;
        Error::Parse {
            line: s.line,
            col: s.col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn sum(&mut self) -> Result<Tree> {
        let mut lhs = self.product()?;
        loop {
            let span = self.span();
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    let rhs = self.product()?;
                    lhs = Tree {
                        node: Node::Add(Box::new(lhs), Box::new(rhs)),
                        span,
                    };
                }
                Tok::Op('-') => {
                    self.bump();
                    let rhs = self.product()?;
                    lhs = Tree {
                        node: Node::Sub(Box::new(lhs), Box::new(rhs)),
                        span,
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Tree> {
        let mut lhs = self.unary()?;
        loop {
            let span = self.span();
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Tree {
                        node: Node::Mul(Box::new(lhs), Box::new(rhs)),
                        span,
                    };
                }
                Tok::Op('/') => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Tree {
                        node: Node::Div(Box::new(lhs), Box::new(rhs)),
                        span,
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Tree> {
        let span = self.span();
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                let inner = self.unary()?;
                Ok(Tree {
                    node: Node::Neg(Box::new(inner)),
                    span,
                })
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = *self.peek() == Tok::Op('(');
        if paren {
            self.bump();
        }
        let neg = *self.peek() == Tok::Op('-');
        if neg {
            self.bump();
        }
        let n = match self.bump() {
            (Tok::Num(n), _) if n.is_integer() => {
                let v: i64 = n
                    .to_integer()
                    .try_into()
                    .map_err(|_| self.err("exponent too large"))?;
                v
            }
            _ => return Err(self.err("exponent must be an integer")),
        };
        if paren {
            self.expect(')')?;
        }
        Ok(if neg { -n } else { n })
    }

    fn power(&mut self) -> Result<Tree> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            let span = self.span();
            self.bump();
            let e = self.exponent()?;
            return Ok(Tree {
                node: Node::Pow(Box::new(base), e),
                span,
            });
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Tree> {
        let span = self.span();
        match self.bump() {
            (Tok::Num(n), _) => Ok(Tree {
                node: Node::Num(n),
                span,
            }),
            (Tok::Op('('), _) => {
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(inner)
            }
            (Tok::Ident(name), _) => {
                let mut derivs = None;
                if let Tok::Marks(m) = self.peek().clone() {
                    self.bump();
                    derivs = Some(m);
                }
                if *self.peek() == Tok::Op('(') {
                    self.bump();
                    let mut args = vec![self.sum()?];
                    while *self.peek() == Tok::Op(',') {
                        self.bump();
                        args.push(self.sum()?);
                    }
                    self.expect(')')?;
                    Ok(Tree {
                        node: Node::Call { name, derivs, args },
                        span,
                    })
                } else if derivs.is_some() {
                    Err(self.err("derivative marker must be followed by an argument list"))
                } else {
                    Ok(Tree {
                        node: Node::Ident(name),
                        span,
                    })
                }
            }
            (Tok::End, _) => Err(Error::Parse {
                line: span.line,
                col: span.col,
                msg: "unexpected end of input".into(),
            }),
            (t, _) => Err(Error::Parse {
                line: span.line,
                col: span.col,
                msg: format!("unexpected token {t:?}"),
            }),
        }
    }
}

/// Parses source text into a syntax tree.
pub fn parse_tree(src: &str) -> Result<Tree> {
    let lx = Lexer::new(src)?;
    let mut p = Parser {
        src,
        toks: lx.toks,
        pos: 0,
    };
    let t = p.sum()?;
    if *p.peek() != Tok::End {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

impl Tree {
    /// Converts the tree into canonical form.
    pub fn normalize(&self) -> Result<Expr> {
        Ok(match &self.node {
            Node::Num(n) => Expr::rational(n.clone()),
            Node::Ident(name) => Expr::var(name),
            Node::Call { name, derivs, args } => {
                let args: Vec<Expr> = args.iter().map(|a| a.normalize()).collect::<Result<_>>()?;
                if let Some(b) = Builtin::from_name(name) {
                    if derivs.is_some() {
                        return Err(self.error(format!("`{name}` does not take derivative markers")));
                    }
                    if args.len() != 1 {
                        return Err(self.error(format!("`{name}` takes one argument")));
                    }
                    Expr::builtin(b, args.into_iter().next().unwrap())
                } else {
                    let d = match derivs {
                        None => vec![0; args.len()],
                        Some(m) if args.len() == 1 && m.len() == 1 => m.clone(),
                        Some(m) if m.len() == args.len() => m.clone(),
                        Some(_) => {
                            return Err(self.error(format!(
                                "derivative marker of `{name}` does not match its {} arguments",
                                args.len()
                            )))
                        }
                    };
                    Expr::formal(name, d, args)
                }
            }
            Node::Neg(a) => a.normalize()?.neg(),
            Node::Add(a, b) => a.normalize()?.add(&b.normalize()?),
            Node::Sub(a, b) => a.normalize()?.sub(&b.normalize()?),
            Node::Mul(a, b) => a.normalize()?.mul(&b.normalize()?),
            Node::Div(a, b) => {
                let d = b.normalize()?;
                if d.is_zero() {
                    return Err(Error::DivisionByZeroAt {
                        line: self.span.line,
                        col: self.span.col,
                    });
                }
                a.normalize()?.div(&d)?
            }
            Node::Pow(a, e) => {
                let base = a.normalize()?;
                if *e < 0 && base.is_zero() {
                    return Err(Error::DivisionByZeroAt {
                        line: self.span.line,
                        col: self.span.col,
                    });
                }
                if *e == 0 {
                    Expr::rational(BigRational::one())
                } else {
                    base.pow(*e)?
                }
            }
        })
    }

    fn error(&self, msg: String) -> Error {
        Error::Parse {
            line: self.span.line,
            col: self.span.col,
            msg,
        }
    }
}

/// Parses and normalizes an expression.
pub fn parse(src: &str) -> Result<Expr> {
    parse_tree(src)?.normalize()
}
