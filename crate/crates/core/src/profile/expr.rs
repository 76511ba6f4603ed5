//! Expressions in one variable `y` with symbolic differentiation.
//!
//! Grammar: real literals, `y`, binary `+ - * / ^`, unary `-`, parentheses
//! and the functions `sin cos tan exp log sqrt abs asin`. `^` binds tighter
//! than unary minus and is right-associative, so `-y^2^3 = -(y^(2^3))`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Asin,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "asin" => Func::Asin,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Asin => "asin",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tan => v.tan(),
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Sqrt => v.sqrt(),
            Func::Abs => v.abs(),
            Func::Asin => v.asin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

use Expr::*;

fn num(v: f64) -> Expr {
    Num(v)
}

// Smart constructors with light algebraic simplification.
fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Num(x), Num(y)) => Num(x + y),
        (Num(z), e) | (e, Num(z)) if z == 0.0 => e,
        (a, Neg(b)) => sub(a, *b),
        (a, b) => Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Num(x), Num(y)) => Num(x - y),
        (e, Num(z)) if z == 0.0 => e,
        (Num(z), e) if z == 0.0 => neg(e),
        (a, Neg(b)) => add(a, *b),
        (a, b) => Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Num(x), Num(y)) => Num(x * y),
        (Num(z), _) | (_, Num(z)) if z == 0.0 => Num(0.0),
        (Num(o), e) | (e, Num(o)) if o == 1.0 => e,
        (Num(m), e) | (e, Num(m)) if m == -1.0 => neg(e),
        (Neg(a), Neg(b)) => mul(*a, *b),
        (Neg(a), b) | (b, Neg(a)) => neg(mul(*a, b)),
        (e, Num(c)) => Mul(Box::new(Num(c)), Box::new(e)),
        (a, b) => Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Num(x), Num(y)) if y != 0.0 => Num(x / y),
        (Num(z), _) if z == 0.0 => Num(0.0),
        (e, Num(o)) if o == 1.0 => e,
        (Neg(a), b) => neg(div(*a, b)),
        (a, b) => Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Num(x), Num(y)) => Num(x.powf(y)),
        (_, Num(z)) if z == 0.0 => Num(1.0),
        (e, Num(o)) if o == 1.0 => e,
        (a, b) => Pow(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Num(x) => Num(-x),
        Neg(e) => *e,
        e => Neg(Box::new(e)),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    match a {
        Num(v) => Num(f.apply(v)),
        a => Call(f, Box::new(a)),
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0, len: src.len() };
        let e = p.expression()?;
        match p.peek() {
            None => Ok(e),
            Some((at, t)) => Err(Error::Parse { position: at, message: format!("unexpected {t}") }),
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            Num(v) => *v,
            Var => y,
            Neg(a) => -a.eval(y),
            Add(a, b) => a.eval(y) + b.eval(y),
            Sub(a, b) => a.eval(y) - b.eval(y),
            Mul(a, b) => a.eval(y) * b.eval(y),
            Div(a, b) => a.eval(y) / b.eval(y),
            Pow(a, b) => {
                let base = a.eval(y);
                match **b {
                    Num(e) if e.fract() == 0.0 && e.abs() < 1024.0 => base.powi(e as i32),
                    _ => base.powf(b.eval(y)),
                }
            }
            Call(f, a) => f.apply(a.eval(y)),
        }
    }

    pub fn depends_on_y(&self) -> bool {
        match self {
            Num(_) => false,
            Var => true,
            Neg(a) | Call(_, a) => a.depends_on_y(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => a.depends_on_y() || b.depends_on_y(),
        }
    }

    /// Symbolic derivative with respect to `y`.
    pub fn derivative(&self) -> Expr {
        match self {
            Num(_) => num(0.0),
            Var => num(1.0),
            Neg(a) => neg(a.derivative()),
            Add(a, b) => add(a.derivative(), b.derivative()),
            Sub(a, b) => sub(a.derivative(), b.derivative()),
            Mul(a, b) => add(
                mul(a.derivative(), (**b).clone()),
                mul((**a).clone(), b.derivative()),
            ),
            Div(a, b) => div(
                sub(mul(a.derivative(), (**b).clone()), mul((**a).clone(), b.derivative())),
                pow((**b).clone(), num(2.0)),
            ),
            Pow(a, b) if !b.depends_on_y() => {
                // c·a^(c-1)·a'
                let c = (**b).clone();
                let reduced = sub(c.clone(), num(1.0));
                mul(mul(c, pow((**a).clone(), reduced)), a.derivative())
            }
            Pow(a, b) => {
                // a^b·(b'·log a + b·a'/a)
                let log_a = call(Func::Log, (**a).clone());
                let inner = add(
                    mul(b.derivative(), log_a),
                    div(mul((**b).clone(), a.derivative()), (**a).clone()),
                );
                mul(self.clone(), inner)
            }
            Call(f, a) => {
                let u = (**a).clone();
                let du = a.derivative();
                let outer = match f {
                    Func::Sin => call(Func::Cos, u),
                    Func::Cos => neg(call(Func::Sin, u)),
                    Func::Tan => div(num(1.0), pow(call(Func::Cos, u), num(2.0))),
                    Func::Exp => call(Func::Exp, u),
                    Func::Log => div(num(1.0), u),
                    Func::Sqrt => div(num(0.5), call(Func::Sqrt, u)),
                    Func::Abs => div(u.clone(), call(Func::Abs, u)),
                    Func::Asin => div(num(1.0), call(Func::Sqrt, sub(num(1.0), pow(u, num(2.0))))),
                };
                mul(outer, du)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num(v) if *v < 0.0 => write!(f, "({v})"),
            Num(v) => write!(f, "{v}"),
            Var => write!(f, "y"),
            Neg(a) => write!(f, "(-{a})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Pow(a, b) => write!(f, "({a} ^ {b})"),
            Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    Open,
    Close,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(v) => write!(f, "number {v}"),
            Token::Ident(s) => write!(f, "identifier '{s}'"),
            Token::Op(c) => write!(f, "operator '{c}'"),
            Token::Open => write!(f, "'('"),
            Token::Close => write!(f, "')'"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text
                .parse()
                .map_err(|_| Error::Parse { position: start, message: format!("malformed number '{text}'") })?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Token::Ident(src[start..i].to_string())));
        } else if "+-*/^".contains(c) {
            out.push((i, Token::Op(c)));
            i += 1;
        } else if c == '(' {
            out.push((i, Token::Open));
            i += 1;
        } else if c == ')' {
            out.push((i, Token::Close));
            i += 1;
        } else {
            return Err(Error::Parse { position: i, message: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, &Token)> {
        self.tokens.get(self.pos).map(|(p, t)| (*p, t))
    }

    fn next(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eof_error(&self, what: &str) -> Error {
        Error::Parse { position: self.len, message: format!("unexpected end of input, expected {what}") }
    }

    // expression := term (('+' | '-') term)*
    fn expression(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some((_, Token::Op(c @ ('+' | '-')))) = self.peek() {
            let c = *c;
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == '+' { Add(Box::new(lhs), Box::new(rhs)) } else { Sub(Box::new(lhs), Box::new(rhs)) };
        }
        Ok(lhs)
    }

    // term := unary (('*' | '/') unary)*
    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some((_, Token::Op(c @ ('*' | '/')))) = self.peek() {
            let c = *c;
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if c == '*' { Mul(Box::new(lhs), Box::new(rhs)) } else { Div(Box::new(lhs), Box::new(rhs)) };
        }
        Ok(lhs)
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Expr> {
        if let Some((_, Token::Op('-'))) = self.peek() {
            self.pos += 1;
            return Ok(Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    // power := atom ('^' unary)?
    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some((_, Token::Op('^'))) = self.peek() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some((_, Token::Num(v))) => Ok(Num(v)),
            Some((at, Token::Ident(name))) => {
                if name == "y" {
                    return Ok(Var);
                }
                let func = Func::from_name(&name)
                    .ok_or_else(|| Error::Parse { position: at, message: format!("unknown identifier '{name}'") })?;
                match self.next() {
                    Some((_, Token::Open)) => {}
                    Some((p, t)) => {
                        return Err(Error::Parse { position: p, message: format!("expected '(' after {name}, found {t}") })
                    }
                    None => return Err(self.eof_error("'('")),
                }
                let arg = self.expression()?;
                self.expect_close()?;
                Ok(Call(func, Box::new(arg)))
            }
            Some((_, Token::Open)) => {
                let e = self.expression()?;
                self.expect_close()?;
                Ok(e)
            }
            Some((at, t)) => Err(Error::Parse { position: at, message: format!("unexpected {t}") }),
            None => Err(self.eof_error("an operand")),
        }
    }

    fn expect_close(&mut self) -> Result<()> {
        match self.next() {
            Some((_, Token::Close)) => Ok(()),
            Some((p, t)) => Err(Error::Parse { position: p, message: format!("expected ')', found {t}") }),
            None => Err(self.eof_error("')'")),
        }
    }
}
