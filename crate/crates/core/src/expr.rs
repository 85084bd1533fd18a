//! Closed-form expressions in the parameters `s` and `t`.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' number)?
//! atom   := number | 's' | 't' | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! There is no implicit multiplication, and exponents are numeric literals.
//! Derivatives are symbolic with constant folding; evaluation is generic over
//! [`Scalar`] so the same tree evaluates on plain floats and on Taylor jets.

use std::fmt;

use thiserror::Error;

use crate::jet::{Jet, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown function '{name}' at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("unknown variable '{name}' at byte {offset} (only s and t are allowed)")]
    UnknownVariable { name: String, offset: usize },
    #[error("domain error in {subexpr}: {reason}")]
    Domain { subexpr: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    S,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Right operand is always a [`Expr::Constant`].
    Pow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Constant(f64),
    Variable(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        len: text.len(),
    };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(tok) => Err(ExprError::Syntax {
            offset: tok.offset,
            expected: "operator or end of input".into(),
            found: tok.kind.describe(),
        }),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum TokKind {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Num(v) => format!("number {v}"),
            TokKind::Ident(s) => format!("'{s}'"),
            TokKind::Plus => "'+'".into(),
            TokKind::Minus => "'-'".into(),
            TokKind::Star => "'*'".into(),
            TokKind::Slash => "'/'".into(),
            TokKind::Caret => "'^'".into(),
            TokKind::LParen => "'('".into(),
            TokKind::RParen => "')'".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokKind,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => Some(TokKind::Plus),
            b'-' => Some(TokKind::Minus),
            b'*' => Some(TokKind::Star),
            b'/' => Some(TokKind::Slash),
            b'^' => Some(TokKind::Caret),
            b'(' => Some(TokKind::LParen),
            b')' => Some(TokKind::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(Token { kind, offset: start });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
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
            let lit = &text[start..i];
            let v: f64 = lit.parse().map_err(|_| ExprError::Syntax {
                offset: start,
                expected: "decimal number".into(),
                found: format!("'{lit}'"),
            })?;
            out.push(Token {
                kind: TokKind::Num(v),
                offset: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                kind: TokKind::Ident(text[start..i].to_string()),
                offset: start,
            });
            continue;
        }
        let ch = text[start..].chars().next().unwrap_or('?');
        return Err(ExprError::Syntax {
            offset: start,
            expected: "token".into(),
            found: format!("'{ch}'"),
        });
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn error_here(&self, expected: &str) -> ExprError {
        match self.peek() {
            Some(tok) => ExprError::Syntax {
                offset: tok.offset,
                expected: expected.into(),
                found: tok.kind.describe(),
            },
            None => ExprError::Syntax {
                offset: self.len,
                expected: expected.into(),
                found: "end of input".into(),
            },
        }
    }

    fn expect(&mut self, kind: TokKind, what: &str) -> Result<(), ExprError> {
        match self.peek() {
            Some(tok) if tok.kind == kind => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().map(|t| &t.kind) {
                Some(TokKind::Plus) => BinaryOp::Add,
                Some(TokKind::Minus) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().map(|t| &t.kind) {
                Some(TokKind::Star) => BinaryOp::Mul,
                Some(TokKind::Slash) => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if matches!(self.peek().map(|t| &t.kind), Some(TokKind::Minus)) {
            self.pos += 1;
            let inner = self.factor()?;
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if matches!(self.peek().map(|t| &t.kind), Some(TokKind::Caret)) {
            self.pos += 1;
            match self.peek().map(|t| t.kind.clone()) {
                Some(TokKind::Num(v)) => {
                    self.pos += 1;
                    return Ok(Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(Expr::Constant(v))));
                }
                _ => return Err(self.error_here("numeric exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        const WHAT: &str = "number, variable, function call or '('";
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(self.error_here(WHAT)),
        };
        match tok.kind {
            TokKind::Num(v) => {
                self.pos += 1;
                Ok(Expr::Constant(v))
            }
            TokKind::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(TokKind::RParen, "')'")?;
                Ok(e)
            }
            TokKind::Ident(name) => {
                self.next();
                let is_call = matches!(self.peek().map(|t| &t.kind), Some(TokKind::LParen));
                if is_call {
                    let func = Func::from_name(&name).ok_or(ExprError::UnknownFunction {
                        name: name.clone(),
                        offset: tok.offset,
                    })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(TokKind::RParen, "')'")?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                match name.as_str() {
                    "s" => Ok(Expr::Variable(Var::S)),
                    "t" => Ok(Expr::Variable(Var::T)),
                    _ => Err(ExprError::UnknownVariable {
                        name,
                        offset: tok.offset,
                    }),
                }
            }
            _ => Err(self.error_here(WHAT)),
        }
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized form that re-parses to an equivalent tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Constant(v) if *v < 0.0 => write!(f, "(-{:?})", -v),
            Expr::Constant(v) => write!(f, "{v:?}"),
            Expr::Variable(Var::S) => f.write_str("s"),
            Expr::Variable(Var::T) => f.write_str("t"),
            Expr::Unary(UnaryOp::Neg, e) => write!(f, "(-{e})"),
            Expr::Binary(op, l, r) => {
                let sym = match op {
                    BinaryOp::Add => "+",
                    BinaryOp::Sub => "-",
                    BinaryOp::Mul => "*",
                    BinaryOp::Div => "/",
                    BinaryOp::Pow => "^",
                };
                write!(f, "({l}{sym}{r})")
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

fn domain(e: &Expr, reason: impl Into<String>) -> ExprError {
    let mut text = e.to_string();
    if text.len() > 120 {
        text.truncate(117);
        text.push_str("...");
    }
    ExprError::Domain {
        subexpr: text,
        reason: reason.into(),
    }
}

impl Expr {
    pub fn eval(&self, s: f64, t: f64) -> Result<f64, ExprError> {
        self.eval_generic(s, t)
    }

    /// Taylor expansion in `s` about `s0` at fixed `t`.
    pub fn eval_s_jet(&self, s0: f64, t: f64) -> Result<Jet, ExprError> {
        self.eval_generic(Jet::variable(s0), Jet::constant(t))
    }

    pub fn eval_generic<T: Scalar>(&self, s: T, t: T) -> Result<T, ExprError> {
        let v = match self {
            Expr::Constant(c) => T::constant(*c),
            Expr::Variable(Var::S) => s,
            Expr::Variable(Var::T) => t,
            Expr::Unary(UnaryOp::Neg, e) => -e.eval_generic(s, t)?,
            Expr::Binary(op, l, r) => {
                let a = l.eval_generic(s, t)?;
                match op {
                    BinaryOp::Add => a + r.eval_generic(s, t)?,
                    BinaryOp::Sub => a - r.eval_generic(s, t)?,
                    BinaryOp::Mul => a * r.eval_generic(s, t)?,
                    BinaryOp::Div => {
                        let b = r.eval_generic(s, t)?;
                        if b.value() == 0.0 {
                            return Err(domain(self, "division by zero"));
                        }
                        a / b
                    }
                    BinaryOp::Pow => {
                        let p = match **r {
                            Expr::Constant(p) => p,
                            _ => r.eval_generic(s, t)?.value(),
                        };
                        let base = a.value();
                        if base < 0.0 && p.fract() != 0.0 {
                            return Err(domain(self, "negative base with fractional exponent"));
                        }
                        if base == 0.0 && p < 0.0 {
                            return Err(domain(self, "zero base with negative exponent"));
                        }
                        a.powf(p)
                    }
                }
            }
            Expr::Call(func, arg) => {
                let a = arg.eval_generic(s, t)?;
                match func {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Sinh => a.sinh(),
                    Func::Cosh => a.cosh(),
                    Func::Tanh => a.tanh(),
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a.value() <= 0.0 {
                            return Err(domain(self, format!("log of non-positive value {}", a.value())));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a.value() < 0.0 {
                            return Err(domain(self, format!("sqrt of negative value {}", a.value())));
                        }
                        a.sqrt()
                    }
                }
            }
        };
        if !v.all_finite() {
            return Err(domain(self, "non-finite result"));
        }
        Ok(v)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Constant(c) if *c == 0.0)
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Constant(c) => Some(*c),
            _ => None,
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Constant(_) | Expr::Variable(_) => 1,
            Expr::Unary(_, e) | Expr::Call(_, e) => 1 + e.size(),
            Expr::Binary(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match self {
            Expr::Constant(_) => false,
            Expr::Variable(v) => *v == var,
            Expr::Unary(_, e) | Expr::Call(_, e) => e.depends_on(var),
            Expr::Binary(_, l, r) => l.depends_on(var) || r.depends_on(var),
        }
    }

    /// Exact symbolic derivative with constant folding.
    pub fn differentiate(&self, var: Var) -> Expr {
        if !self.depends_on(var) {
            return Expr::Constant(0.0);
        }
        match self {
            Expr::Constant(_) => Expr::Constant(0.0),
            Expr::Variable(v) => Expr::Constant(if *v == var { 1.0 } else { 0.0 }),
            Expr::Unary(UnaryOp::Neg, e) => neg(e.differentiate(var)),
            Expr::Binary(op, l, r) => {
                let dl = l.differentiate(var);
                match op {
                    BinaryOp::Add => add(dl, r.differentiate(var)),
                    BinaryOp::Sub => sub(dl, r.differentiate(var)),
                    BinaryOp::Mul => {
                        let dr = r.differentiate(var);
                        add(mul(dl, (**r).clone()), mul((**l).clone(), dr))
                    }
                    BinaryOp::Div => {
                        let dr = r.differentiate(var);
                        let first = div(dl, (**r).clone());
                        if dr.is_zero() {
                            first
                        } else {
                            sub(first, div(mul((**l).clone(), dr), pow((**r).clone(), 2.0)))
                        }
                    }
                    BinaryOp::Pow => {
                        let p = r.as_const().expect("exponent is constant");
                        let outer = if p - 1.0 >= 0.0 {
                            mul(Expr::Constant(p), pow((**l).clone(), p - 1.0))
                        } else {
                            div(Expr::Constant(p), pow((**l).clone(), 1.0 - p))
                        };
                        mul(outer, dl)
                    }
                }
            }
            Expr::Call(func, arg) => {
                let da = arg.differentiate(var);
                let u = (**arg).clone();
                match func {
                    Func::Sin => mul(call(Func::Cos, u), da),
                    Func::Cos => neg(mul(call(Func::Sin, u), da)),
                    Func::Tan => div(da, pow(call(Func::Cos, u), 2.0)),
                    Func::Sinh => mul(call(Func::Cosh, u), da),
                    Func::Cosh => mul(call(Func::Sinh, u), da),
                    Func::Tanh => div(da, pow(call(Func::Cosh, u), 2.0)),
                    Func::Exp => mul(self.clone(), da),
                    Func::Log => div(da, u),
                    Func::Sqrt => div(da, mul(Expr::Constant(2.0), self.clone())),
                }
            }
        }
    }

    /// `n`-fold derivative.
    pub fn differentiate_n(&self, var: Var, n: usize) -> Expr {
        (0..n).fold(self.clone(), |e, _| e.differentiate(var))
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Constant(c) => Expr::Constant(-c),
        Expr::Unary(UnaryOp::Neg, inner) => *inner,
        other => Expr::Unary(UnaryOp::Neg, Box::new(other)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Constant(x + y),
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        _ => match b {
            Expr::Unary(UnaryOp::Neg, inner) => Expr::Binary(BinaryOp::Sub, Box::new(a), inner),
            b => Expr::Binary(BinaryOp::Add, Box::new(a), Box::new(b)),
        },
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Constant(x - y),
        (Some(0.0), _) => neg(b),
        (_, Some(0.0)) => a,
        _ => match b {
            Expr::Unary(UnaryOp::Neg, inner) => Expr::Binary(BinaryOp::Add, Box::new(a), inner),
            b => Expr::Binary(BinaryOp::Sub, Box::new(a), Box::new(b)),
        },
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Constant(x * y),
        (Some(0.0), _) | (_, Some(0.0)) => Expr::Constant(0.0),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        (Some(-1.0), _) => neg(b),
        (_, Some(-1.0)) => neg(a),
        _ => match (a, b) {
            // Pull negations outward so that add/sub can absorb them.
            (Expr::Unary(UnaryOp::Neg, x), y) => neg(mul(*x, y)),
            (x, Expr::Unary(UnaryOp::Neg, y)) => neg(mul(x, *y)),
            // Constant to the left, and merge nested constant factors.
            (x, Expr::Constant(c)) => mul(Expr::Constant(c), x),
            (Expr::Constant(c), Expr::Binary(BinaryOp::Mul, l, r)) if l.as_const().is_some() => {
                mul(Expr::Constant(c * l.as_const().unwrap_or(1.0)), *r)
            }
            (x, y) => Expr::Binary(BinaryOp::Mul, Box::new(x), Box::new(y)),
        },
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) if y != 0.0 => Expr::Constant(x / y),
        (Some(0.0), _) => Expr::Constant(0.0),
        (_, Some(1.0)) => a,
        _ => match (a, b) {
            (Expr::Unary(UnaryOp::Neg, x), y) => neg(div(*x, y)),
            (x, y) => Expr::Binary(BinaryOp::Div, Box::new(x), Box::new(y)),
        },
    }
}

fn pow(a: Expr, p: f64) -> Expr {
    if p == 0.0 {
        return Expr::Constant(1.0);
    }
    if p == 1.0 {
        return a;
    }
    if let Some(c) = a.as_const() {
        let v = c.powf(p);
        if v.is_finite() {
            return Expr::Constant(v);
        }
    }
    Expr::Binary(BinaryOp::Pow, Box::new(a), Box::new(Expr::Constant(p)))
}

fn call(func: Func, a: Expr) -> Expr {
    if let Some(c) = a.as_const() {
        if let Ok(v) = Expr::Call(func, Box::new(Expr::Constant(c))).eval(0.0, 0.0) {
            return Expr::Constant(v);
        }
    }
    Expr::Call(func, Box::new(a))
}

/// Four component expressions `(x_-1, x_0, x_1, x_2)` of an embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprVector4(pub [Expr; 4]);

impl ExprVector4 {
    pub fn parse(texts: [&str; 4]) -> Result<Self, (usize, ExprError)> {
        let mut out: Vec<Expr> = Vec::with_capacity(4);
        for (i, t) in texts.iter().enumerate() {
            out.push(parse(t).map_err(|e| (i, e))?);
        }
        let arr: [Expr; 4] = out.try_into().expect("four components");
        Ok(ExprVector4(arr))
    }

    pub fn differentiate(&self, var: Var) -> ExprVector4 {
        ExprVector4(std::array::from_fn(|i| self.0[i].differentiate(var)))
    }

    pub fn eval(&self, s: f64, t: f64) -> Result<[f64; 4], ExprError> {
        let mut out = [0.0; 4];
        for (o, e) in out.iter_mut().zip(&self.0) {
            *o = e.eval(s, t)?;
        }
        Ok(out)
    }

    pub fn eval_s_jet(&self, s0: f64, t: f64) -> Result<[Jet; 4], ExprError> {
        let mut out = [Jet::default(); 4];
        for (o, e) in out.iter_mut().zip(&self.0) {
            *o = e.eval_s_jet(s0, t)?;
        }
        Ok(out)
    }
}
