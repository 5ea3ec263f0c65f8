//! A tiny expression language for generating functions.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?
//! atom    := number | "pi" | var | func "(" expr ")" | "(" expr ")"
//! var     := "eta" | "u" | "psi"
//! func    := "cos" | "sin" | "exp" | "log"
//! ```
//!
//! `eta` and `u` both name the first quotient coordinate (`η` on polar
//! domains, `u` on the cylinder); `psi` is the angle difference.

use crate::error::{Error, Result};
use crate::kernels::GeneratingFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Cos,
    Sin,
    Exp,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    First,
    Psi,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, first: f64, psi: f64) -> f64 {
        use Expr::*;
        match self {
            Num(v) => *v,
            First => first,
            Psi => psi,
            Neg(a) => -a.eval(first, psi),
            Add(a, b) => a.eval(first, psi) + b.eval(first, psi),
            Sub(a, b) => a.eval(first, psi) - b.eval(first, psi),
            Mul(a, b) => a.eval(first, psi) * b.eval(first, psi),
            Div(a, b) => a.eval(first, psi) / b.eval(first, psi),
            Pow(a, b) => a.eval(first, psi).powf(b.eval(first, psi)),
            Call(f, a) => {
                let x = a.eval(first, psi);
                match f {
                    Func::Cos => x.cos(),
                    Func::Sin => x.sin(),
                    Func::Exp => x.exp(),
                    Func::Log => x.ln(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            // exponent suffix: 1e-3, 2.5E4
            if i < chars.len() && matches!(chars[i].1, 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j].1, '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].1.is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let end = chars.get(i).map_or(src.len(), |c| c.0);
            let text = &src[pos..end];
            let v: f64 = text.parse().map_err(|_| Error::Parse(format!("bad number `{text}` at {pos}")))?;
            out.push((chars[start].0, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                i += 1;
            }
            let end = chars.get(i).map_or(src.len(), |c| c.0);
            out.push((chars[start].0, Tok::Ident(src[pos..end].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected `{c}` at {pos}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.len, |t| t.0)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected `{op}` at {}", self.pos())))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            // right-associative, binds tighter than a leading minus on the left
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        let tok = self.toks.get(self.at).map(|t| t.1.clone());
        self.at += 1;
        match tok {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::Op('(')) => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                let func = match name.as_str() {
                    "eta" | "u" => return Ok(Expr::First),
                    "psi" => return Ok(Expr::Psi),
                    "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
                    "cos" => Func::Cos,
                    "sin" => Func::Sin,
                    "exp" => Func::Exp,
                    "log" => Func::Log,
                    _ => return Err(Error::Parse(format!("unknown name `{name}` at {pos}"))),
                };
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            _ => Err(Error::Parse(format!("expected a value at {pos}"))),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, len: src.len() };
    let e = p.expr()?;
    if p.at < p.toks.len() {
        return Err(Error::Parse(format!("trailing input at {}", p.pos())));
    }
    Ok(e)
}

/// A generating function from an expression; non-finite values surface as
/// errors at evaluation time.
pub fn generating_function(src: &str) -> Result<GeneratingFunction> {
    let e = parse(src)?;
    let name = src.to_string();
    Ok(GeneratingFunction::fallible(src, move |a, psi| {
        let v = e.eval(a, psi);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("`{name}` at ({a}, {psi})")))
        }
    }))
}
