//! The textual expression language.
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = "-" unary | power ;
//! power    = primary [ "^" unary ] ;
//! primary  = integer
//!          | "(" expr ")"
//!          | ident "(" [ expr { "," expr } ] ")"      (* function call *)
//!          | word
//!          | ident ;                                  (* t, T, Dtau, vac, generator *)
//! word     = mode { mode } [ "vac" ] ;                (* two or more modes need "vac" *)
//! mode     = ident "[" expr "]" ;
//! ident    = letter { letter | digit | "_" } | "τ" ;
//! ```
//!
//! Functions: `ff(n)`, `shift(k, e)`, `d(e)`, `tr(f)`, `mode(f, n)`, `hol(e)`,
//! `sing(e)`, `alpha(h)`, `alpha_inv(f)`, `antipode(h)`, `counit(h)`,
//! `pair(h, f)`, `act(h, e)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::affine::LieElement;
use crate::conformal::{ConformalAlgebra, ConformalElement};
use crate::error::{Error, Result};
use crate::hopf::HopfElement;
use crate::ktau::KElement;
use crate::scalar::{as_i64, fmt_q, Q};
use crate::vacuum::{State, VacuumModule};

pub const FUNCTIONS: &[&str] = &[
    "ff",
    "shift",
    "d",
    "tr",
    "mode",
    "hol",
    "sing",
    "alpha",
    "alpha_inv",
    "antipode",
    "counit",
    "pair",
    "act",
];

/// Names that cannot be used for generators.
pub fn is_reserved(s: &str) -> bool {
    matches!(s, "t" | "τ" | "T" | "Dtau" | "vac") || FUNCTIONS.contains(&s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("`{n}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                column += 1;
            }
            Tok::Int(s.parse().expect("digits"))
        } else if c.is_ascii_alphabetic() || c == 'τ' {
            let mut s = String::new();
            if c == 'τ' {
                chars.next();
                column += 1;
                s.push('t');
            } else {
                while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                    s.push(d);
                    chars.next();
                    column += 1;
                }
            }
            Tok::Ident(s)
        } else if "+-*/^()[],".contains(c) {
            chars.next();
            column += 1;
            Tok::Sym(c)
        } else {
            return Err(Error::Syntax {
                line: l0,
                column: c0,
                expected: "expression".into(),
                found: format!("`{c}`"),
            });
        };
        out.push(Token {
            tok,
            line: l0,
            column: c0,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

/// Parsed expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
    /// `B[p]` alone.
    Mode(String, Box<Expr>),
    /// `B[p] C[q] vac`.
    Word(Vec<(String, Expr)>),
}

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 5;

impl Expr {
    fn level(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => SUM,
            Expr::Bin(..) => PRODUCT,
            Expr::Neg(_) => UNARY,
            Expr::Pow(..) => 4,
            _ => ATOM,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            f.write_str("(")?;
            self.write(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Var(s) => f.write_str(s),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write(f, UNARY)
            }
            Expr::Bin(op, a, b) => {
                let (l, r) = if matches!(op, BinOp::Add | BinOp::Sub) {
                    (SUM, PRODUCT)
                } else {
                    (PRODUCT, UNARY)
                };
                a.write(f, l)?;
                f.write_str(op.symbol())?;
                b.write(f, r)
            }
            Expr::Pow(a, b) => {
                a.write(f, ATOM)?;
                f.write_str("^")?;
                b.write(f, UNARY)
            }
            Expr::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    a.write(f, 0)?;
                }
                f.write_str(")")
            }
            Expr::Mode(g, e) => {
                write!(f, "{g}[")?;
                e.write(f, 0)?;
                f.write_str("]")
            }
            Expr::Word(modes) => {
                for (g, e) in modes {
                    write!(f, "{g}[")?;
                    e.write(f, 0)?;
                    f.write_str("]")?;
                }
                f.write_str("vac")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> Error {
        let t = &self.tokens[self.pos];
        Error::Syntax {
            line: t.line,
            column: t.column,
            expected: expected.join(", "),
            found: t.tok.describe(),
        }
    }

    fn expect(&mut self, c: char, also: &[&str]) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            let mine = format!("`{c}`");
            let mut all = vec![mine.as_str()];
            all.extend_from_slice(also);
            Err(self.error(&all))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.primary()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')', &["operator"])?;
                Ok(e)
            }
            Tok::Ident(name) => match self.peek2() {
                Tok::Sym('(') => {
                    self.bump();
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::Sym(')') {
                        args.push(self.expr()?);
                        while *self.peek() == Tok::Sym(',') {
                            self.bump();
                            args.push(self.expr()?);
                        }
                    }
                    self.expect(')', &["`,`", "operator"])?;
                    Ok(Expr::Call(name, args))
                }
                Tok::Sym('[') => self.word(),
                _ => {
                    self.bump();
                    Ok(Expr::Var(name))
                }
            },
            _ => Err(self.error(&["expression"])),
        }
    }

    fn word(&mut self) -> Result<Expr> {
        let mut modes = Vec::new();
        loop {
            match (self.peek().clone(), self.peek2()) {
                (Tok::Ident(v), _) if v == "vac" => {
                    self.bump();
                    return Ok(Expr::Word(modes));
                }
                (Tok::Ident(g), Tok::Sym('[')) => {
                    self.bump();
                    self.bump();
                    let e = self.expr()?;
                    self.expect(']', &["operator"])?;
                    modes.push((g, e));
                }
                _ if modes.len() == 1 => {
                    let (g, e) = modes.pop().expect("one mode");
                    return Ok(Expr::Mode(g, Box::new(e)));
                }
                _ => return Err(self.error(&["generator mode", "`vac`"])),
            }
        }
    }
}

/// Parses one expression spanning the whole input.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}

/// Result of evaluating an expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(Q),
    Func(KElement),
    Hopf(HopfElement),
    Element(ConformalElement),
    Lie(LieElement),
    State(State),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "scalar",
            Value::Func(_) => "function",
            Value::Hopf(_) => "Hopf element",
            Value::Element(_) => "conformal element",
            Value::Lie(_) => "Lie element",
            Value::State(_) => "state",
        }
    }

    /// Canonical text; parsing it back gives an equal value.
    pub fn render(&self, unicode: bool) -> String {
        match self {
            Value::Scalar(x) => fmt_q(x),
            Value::Func(f) => f.render(unicode),
            Value::Hopf(h) => h.render(),
            Value::Element(e) => e.render(),
            Value::Lie(x) => x.render(unicode),
            Value::State(s) => s.render(unicode),
        }
    }

    fn zero_scalar(&self) -> bool {
        matches!(self, Value::Scalar(x) if x.is_zero())
    }

    fn mismatch(&self, want: &str) -> Error {
        Error::Type(format!(
            "expected a {want}, got a {} `{}`",
            self.kind(),
            self.render(false)
        ))
    }

    pub fn into_scalar(self) -> Result<Q> {
        match self {
            Value::Scalar(x) => Ok(x),
            Value::Func(ref f) => f.as_constant().ok_or_else(|| self.mismatch("scalar")),
            v => Err(v.mismatch("scalar")),
        }
    }

    pub fn into_integer(self) -> Result<i64> {
        let x = self.into_scalar()?;
        as_i64(&x).ok_or_else(|| Error::Type(format!("expected an integer, got {}", fmt_q(&x))))
    }

    pub fn into_func(self) -> Result<KElement> {
        match self {
            Value::Scalar(x) => Ok(KElement::constant(x)),
            Value::Func(f) => Ok(f),
            v => Err(v.mismatch("function")),
        }
    }

    pub fn into_hopf(self) -> Result<HopfElement> {
        match self {
            Value::Scalar(x) => Ok(HopfElement::scalar(x)),
            Value::Hopf(h) => Ok(h),
            v => Err(v.mismatch("Hopf element")),
        }
    }

    pub fn into_element(self) -> Result<ConformalElement> {
        match self {
            Value::Element(e) => Ok(e),
            v if v.zero_scalar() => Ok(ConformalElement::zero()),
            v => Err(v.mismatch("conformal element")),
        }
    }

    pub fn into_lie(self) -> Result<LieElement> {
        match self {
            Value::Lie(x) => Ok(x),
            v if v.zero_scalar() => Ok(LieElement::zero()),
            v => Err(v.mismatch("Lie element")),
        }
    }

    pub fn into_state(self) -> Result<State> {
        match self {
            Value::State(s) => Ok(s),
            v if v.zero_scalar() => Ok(State::zero()),
            v => Err(v.mismatch("state")),
        }
    }

    fn scale(self, c: &Q) -> Value {
        match self {
            Value::Scalar(x) => Value::Scalar(x * c),
            Value::Func(f) => Value::Func(f.scale(c)),
            Value::Hopf(h) => Value::Hopf(h.scale(c)),
            Value::Element(e) => Value::Element(e.scale(c)),
            Value::Lie(x) => Value::Lie(x.scale(c)),
            Value::State(s) => Value::State(s.scale(c)),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

/// Evaluation context: the algebra whose generators may appear, if any.
#[derive(Clone, Debug, Default)]
pub struct Env {
    module: Option<VacuumModule>,
}

impl Env {
    /// No generators; only scalars, functions and Hopf elements.
    pub fn bare() -> Self {
        Self::default()
    }

    pub fn new(module: VacuumModule) -> Self {
        Self { module: Some(module) }
    }

    pub fn toda() -> Self {
        Self::new(VacuumModule::toda())
    }

    pub fn algebra(&self) -> Option<&ConformalAlgebra> {
        self.module.as_ref().map(VacuumModule::algebra)
    }

    pub fn module(&self) -> Result<&VacuumModule> {
        self.module
            .as_ref()
            .ok_or_else(|| Error::Usage("no algebra loaded".into()))
    }

    fn generator(&self, g: &str) -> Result<()> {
        match self.algebra() {
            Some(a) if a.has_generator(g) => Ok(()),
            _ => Err(Error::Type(format!("unknown identifier `{g}`"))),
        }
    }

    pub fn eval(&self, e: &Expr) -> Result<Value> {
        match e {
            Expr::Int(n) => Ok(Value::Scalar(Q::from_integer(n.clone()))),
            Expr::Var(v) => match v.as_str() {
                "t" => Ok(Value::Func(KElement::tau())),
                "T" => Ok(Value::Hopf(HopfElement::t_pow(1))),
                "Dtau" => Ok(Value::Hopf(HopfElement::dtau())),
                "vac" => Ok(Value::State(State::vacuum())),
                g => {
                    self.generator(g)?;
                    Ok(Value::Element(ConformalElement::generator(g)))
                }
            },
            Expr::Neg(a) => Ok(self.eval(a)?.scale(&-Q::one())),
            Expr::Bin(op, a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                match op {
                    BinOp::Add => add(a, b),
                    BinOp::Sub => add(a, b.scale(&-Q::one())),
                    BinOp::Mul => self.mul(a, b),
                    BinOp::Div => div(a, b),
                }
            }
            Expr::Pow(a, b) => pow(self.eval(a)?, self.eval(b)?.into_integer()?),
            Expr::Call(name, args) => self.call(name, args),
            Expr::Mode(g, p) => Ok(Value::Lie(self.mode(g, p)?)),
            Expr::Word(modes) => {
                let m = self.module()?;
                let elems = modes.iter().map(|(g, p)| self.mode(g, p)).collect::<Result<Vec<_>>>()?;
                let mut s = State::vacuum();
                for x in elems.iter().rev() {
                    s = m.act(x, &s)?;
                }
                Ok(Value::State(s))
            }
        }
    }

    fn mode(&self, g: &str, p: &Expr) -> Result<LieElement> {
        self.generator(g)?;
        Ok(LieElement::basic(g, self.eval(p)?.into_func()?))
    }

    fn mul(&self, a: Value, b: Value) -> Result<Value> {
        use Value::*;
        Ok(match (a, b) {
            (Scalar(x), v) | (v, Scalar(x)) => v.scale(&x),
            (Func(f), Func(g)) => Func(&f * &g),
            (Hopf(h), Hopf(k)) => Hopf(&h * &k),
            (Hopf(h), v) => self.act(&h, v)?,
            (a, b) => return Err(Error::Type(format!("cannot multiply a {} by a {}", a.kind(), b.kind()))),
        })
    }

    /// Left action of `H_T` on everything that carries one.
    fn act(&self, h: &HopfElement, v: Value) -> Result<Value> {
        Ok(match v {
            Value::Scalar(x) => Value::Func(h.act(&KElement::constant(x))),
            Value::Func(f) => Value::Func(h.act(&f)),
            Value::Hopf(k) => Value::Hopf(h * &k),
            Value::Element(e) => Value::Element(e.apply(h)),
            Value::Lie(x) => Value::Lie(x.apply_hopf(h)),
            Value::State(s) => Value::State(self.module()?.module_action(h, &s)?),
        })
    }

    fn call(&self, name: &str, args: &[Expr]) -> Result<Value> {
        let arity = match name {
            "shift" | "mode" | "pair" | "act" => 2,
            _ if FUNCTIONS.contains(&name) => 1,
            _ => return Err(Error::Type(format!("unknown function `{name}`"))),
        };
        if args.len() != arity {
            return Err(Error::Type(format!(
                "`{name}` takes {arity} argument{}, got {}",
                if arity == 1 { "" } else { "s" },
                args.len()
            )));
        }
        let vals = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>>>()?;
        let mut it = vals.into_iter();
        let mut next = || it.next().expect("arity checked");
        Ok(match name {
            "ff" => Value::Func(KElement::falling_factorial(next().into_integer()?)),
            "shift" => {
                let k = next().into_integer()?;
                self.act(&HopfElement::t_pow(k), next())?
            }
            "d" => self.act(&HopfElement::dtau(), next())?,
            "tr" => Value::Scalar(next().into_func()?.trace()),
            "mode" => {
                let f = next().into_func()?;
                Value::Scalar(f.mode(next().into_integer()?))
            }
            "hol" | "sing" => {
                let hol = name == "hol";
                match next() {
                    Value::Lie(x) => {
                        let (h, s) = x.hol_sing_split();
                        Value::Lie(if hol { h } else { s })
                    }
                    v => {
                        let f = v.into_func()?;
                        Value::Func(if hol { f.hol() } else { f.sing() })
                    }
                }
            }
            "alpha" => Value::Func(next().into_hopf()?.alpha()),
            "alpha_inv" => Value::Hopf(HopfElement::alpha_inv(&next().into_func()?)?),
            "antipode" => Value::Hopf(next().into_hopf()?.antipode()),
            "counit" => Value::Scalar(next().into_hopf()?.counit()),
            "pair" => {
                let h = next().into_hopf()?;
                Value::Scalar(h.pair(&next().into_func()?)?)
            }
            "act" => {
                let h = next().into_hopf()?;
                self.act(&h, next())?
            }
            _ => unreachable!("checked above"),
        })
    }
}

fn add(a: Value, b: Value) -> Result<Value> {
    use Value::*;
    if a.zero_scalar() {
        return Ok(b);
    }
    if b.zero_scalar() {
        return Ok(a);
    }
    Ok(match (a, b) {
        (Scalar(x), Scalar(y)) => Scalar(x + y),
        (a @ (Scalar(_) | Func(_)), b @ (Scalar(_) | Func(_))) => Func(&a.into_func()? + &b.into_func()?),
        (a @ (Scalar(_) | Hopf(_)), b @ (Scalar(_) | Hopf(_))) => Hopf(&a.into_hopf()? + &b.into_hopf()?),
        (Element(x), Element(y)) => Element(&x + &y),
        (Lie(x), Lie(y)) => Lie(x.add(&y)),
        (State(x), State(y)) => State(x.add(&y)),
        (a, b) => return Err(Error::Type(format!("cannot add a {} and a {}", a.kind(), b.kind()))),
    })
}

fn div(a: Value, b: Value) -> Result<Value> {
    match b {
        Value::Scalar(c) if c.is_zero() => Err(Error::NotInvertible("division by zero".into())),
        Value::Scalar(c) => Ok(a.scale(&c.recip())),
        Value::Func(g) => Ok(Value::Func(&a.into_func()? * &g.try_inverse()?)),
        Value::Hopf(h) => Ok(Value::Hopf(&a.into_hopf()? * &hopf_inverse(&h)?)),
        b => Err(Error::Type(format!("cannot divide by a {}", b.kind()))),
    }
}

/// Inverse of a nonzero multiple of `T^k`.
fn hopf_inverse(h: &HopfElement) -> Result<HopfElement> {
    let mut terms = h.terms().iter();
    match (terms.next(), terms.next()) {
        (Some((&(k, 0), c)), None) => Ok(HopfElement::term(c.recip(), -k, 0)),
        _ => Err(Error::NotInvertible(format!("{h} is not a unit of the group algebra"))),
    }
}

fn pow(a: Value, e: i64) -> Result<Value> {
    Ok(match a {
        Value::Scalar(x) => {
            if x.is_zero() && e < 0 {
                return Err(Error::NotInvertible("division by zero".into()));
            }
            let base = if e < 0 { x.recip() } else { x };
            Value::Scalar((0..e.unsigned_abs()).fold(Q::one(), |acc, _| acc * &base))
        }
        Value::Func(f) => Value::Func(f.pow(e)?),
        Value::Hopf(h) => {
            let base = if e < 0 { hopf_inverse(&h)? } else { h };
            Value::Hopf(base.pow(e.unsigned_abs() as u32))
        }
        v => return Err(Error::Type(format!("cannot raise a {} to a power", v.kind()))),
    })
}

/// Parses and evaluates.
pub fn evaluate(text: &str, env: &Env) -> Result<Value> {
    env.eval(&parse(text)?)
}

/// Parses a Hopf element such as `2*T^-1*Dtau - 1/3`.
pub fn parse_hopf(text: &str) -> Result<HopfElement> {
    evaluate(text, &Env::bare())?.into_hopf()
}

/// Parses a function of `t`.
pub fn parse_func(text: &str) -> Result<KElement> {
    evaluate(text, &Env::bare())?.into_func()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn eval(s: &str) -> String {
        evaluate(s, &Env::toda()).unwrap().render(false)
    }

    #[test]
    fn required_examples() {
        assert_eq!(eval("tr((t+2)/(t*(t-1)))"), "1");
        assert_eq!(eval("ff(-2)"), "1/(t-1) - 1/t");
        match parse("tr(") {
            Err(Error::Syntax {
                line, column, expected, ..
            }) => {
                assert_eq!((line, column), (1, 4));
                assert_eq!(expected, "expression");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            evaluate("1/(t - 1/2)", &Env::bare()),
            Err(Error::NotInvertible(_))
        ));
        assert_eq!(eval("1/ff(0)"), "1");
    }

    #[test]
    fn precedence() {
        assert_eq!(eval("-t^2"), "-t^2");
        assert_eq!(eval("(-t)^2"), "t^2");
        assert_eq!(eval("2^-1"), "1/2");
        assert_eq!(eval("1 - 2 - 3"), "-4");
        assert_eq!(eval("12/2/3"), "2");
        assert_eq!(eval("2*T^-1*Dtau - 1/3"), "-1/3 + 2*T^-1*Dtau");
        assert_eq!(parse("-t^2").unwrap().to_string(), "-t^2");
        assert_eq!(parse("a - (b - c)").unwrap().to_string(), "a - (b - c)");
        assert_eq!(parse("(a*b)^c").unwrap().to_string(), "(a*b)^c");
    }

    #[test]
    fn functions() {
        assert_eq!(eval("shift(1, t^2)"), "t^2 + 2*t + 1");
        assert_eq!(eval("d(1/t)"), "-1/t^2");
        assert_eq!(eval("mode(1/t, -1)"), "1");
        assert_eq!(eval("mode(t, 1)"), "1");
        assert_eq!(eval("hol(t + 1/t)"), "t");
        assert_eq!(eval("sing(t + 1/t)"), "1/t");
        assert_eq!(eval("alpha(T)"), "1/(t-1)");
        assert_eq!(eval("alpha_inv(1/(t-2)^2)"), "T^2*Dtau");
        assert_eq!(eval("antipode(T*Dtau)"), "-T^-1*Dtau");
        assert_eq!(eval("counit(3*T - Dtau)"), "3");
        assert_eq!(eval("pair(T^2, t^2)"), "4");
        assert_eq!(eval("act(T, t)"), "t + 1");
        assert_eq!(eval("T/T^2"), "T^-1");
        assert!(evaluate("tr(1, 2)", &Env::bare()).is_err());
        assert!(evaluate("nosuch(1)", &Env::bare()).is_err());
    }

    #[test]
    fn generators_and_states() {
        assert_eq!(eval("B - T*C"), "B - T*C");
        assert_eq!(eval("(T - 1)*C"), "(T - 1)*C");
        assert_eq!(eval("B[t] + C[1/t]"), "B[t] + C[1/t]");
        assert_eq!(eval("hol(B[t + 1/t])"), "B[t]");
        assert_eq!(eval("B[t]C[1/t]vac"), "-C[1/t]vac");
        assert_eq!(
            eval("B[1/t]C[1/t]vac - C[1/t]B[1/t]vac"),
            eval("C[(1/(t-1) - 1/t)/t]vac")
        );
        assert_eq!(eval("T*C[1/t]vac"), "C[1/(t-1)]vac");
        assert!(matches!(evaluate("X[t]vac", &Env::toda()), Err(Error::Type(_))));
        assert!(matches!(evaluate("B", &Env::bare()), Err(Error::Type(_))));
        assert!(matches!(parse("B[t]C[t]"), Err(Error::Syntax { .. })));
        assert!(matches!(evaluate("B + t", &Env::toda()), Err(Error::Type(_))));
    }

    #[test]
    fn diagnostics() {
        let err = |s: &str| match parse(s) {
            Err(Error::Syntax {
                line,
                column,
                expected,
                found,
            }) => (line, column, expected, found),
            other => panic!("{other:?}"),
        };
        assert_eq!(err("(t + 1"), (1, 7, "`)`, operator".into(), "end of input".into()));
        assert_eq!(err("t +\n  * 2"), (2, 3, "expression".into(), "`*`".into()));
        assert_eq!(err("t t"), (1, 3, "operator, end of input".into(), "`t`".into()));
        assert_eq!(err("t $").1, 3);
    }

    #[test]
    fn round_trip() {
        let env = Env::toda();
        for s in [
            "t^3/(t-2)^2 - 1/2/t",
            "ff(5) + ff(-3)",
            "2*T^-1*Dtau - 1/3 + T^4*Dtau^2",
            "3*B - (T^2 - T)*C",
            "B[t^2 - 1/(t+1)] + C[2]",
            "2*B[1/t]C[1/(t-1)^2]vac - 1/3*vac",
            "-7/3",
        ] {
            let once = evaluate(s, &env).unwrap();
            let text = once.render(false);
            let twice = evaluate(&text, &env).unwrap();
            assert_eq!(twice.render(false), text);
            let unicode = once.render(true);
            assert_eq!(evaluate(&unicode, &env).unwrap().render(false), text);
            let ast = parse(s).unwrap();
            assert_eq!(parse(&ast.to_string()).unwrap(), ast);
        }
        assert_eq!(parse_hopf("T^-2*Dtau").unwrap(), HopfElement::term(q(1), -2, 1));
    }

    #[test]
    fn algebra_json() {
        let text = ConformalAlgebra::toda().to_json().to_string();
        let alg = ConformalAlgebra::from_json(&text).unwrap();
        assert_eq!(alg.to_json(), ConformalAlgebra::toda().to_json());
        let bad = r#"{"generators":["B"],"products":{"B|B":{"0":{"B":"T^"}}}}"#;
        assert!(matches!(ConformalAlgebra::from_json(bad), Err(Error::Algebra(_))));
    }
}
