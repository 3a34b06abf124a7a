//! A small arithmetic expression language shared by the CLI and the case
//! catalog.
//!
//! Grammar (usual precedence, `^` binds tightest and is right associative):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := integer | ident | 'exp' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers are `x, y, z` and the parameters `a ... k`. Decimal literals
//! are rejected.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::poly::PARAM_NAMES;
use crate::algebra::{Poly, Rational, Ring};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message} at column {column}")]
pub struct ExprError {
    pub message: String,
    pub column: usize,
}

fn err<T>(message: impl Into<String>, column: usize) -> Result<T, ExprError> {
    Err(ExprError { message: message.into(), column })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Ident(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && (chars[i] == '.' || chars[i] == 'e' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                return err("decimal literals are not allowed; write p/q", i + 1);
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().unwrap()), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), col));
            i += 1;
        } else if c == '.' {
            return err("decimal literals are not allowed; write p/q", col);
        } else {
            return err(format!("unexpected character {c:?}"), col);
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len + 1, |(_, c)| *c)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
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

    fn term(&mut self) -> Result<Expr, ExprError> {
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

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat('^') {
            Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let col = self.column();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "exp" {
                    if !self.eat('(') {
                        return err("expected '(' after exp", self.column());
                    }
                    let inner = self.expr()?;
                    if !self.eat(')') {
                        return err("expected ')'", self.column());
                    }
                    Ok(Expr::Exp(Box::new(inner)))
                } else {
                    Ok(Expr::Ident(name))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return err("expected ')'", self.column());
                }
                Ok(inner)
            }
            Some(Tok::Op(c)) => err(format!("unexpected {c:?}"), col),
            None => err("unexpected end of input", col),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, len: src.chars().count() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return err("trailing input", p.column());
    }
    Ok(e)
}

/// Values bound to parameter names during evaluation.
pub type Env = HashMap<String, Rational>;

pub fn env_from_point(point: &[Rational; 9]) -> Env {
    PARAM_NAMES.iter().zip(point).map(|(n, v)| (n.to_string(), v.clone())).collect()
}

/// Evaluates an expression that must reduce to a rational constant.
pub fn eval_const(e: &Expr, env: &Env) -> Result<Rational, ExprError> {
    let p = eval_poly(e, Ring::Xyz, env)?;
    if !p.is_constant() {
        return err(format!("expected a constant, got {p}"), 0);
    }
    Ok(p.constant_term())
}

fn integer_exponent(r: &Rational) -> Option<u32> {
    if r.is_integer() && *r >= Rational::zero() {
        r.to_integer().to_u32()
    } else {
        None
    }
}

/// Evaluates to a polynomial in `ring`. Identifiers that name ring variables
/// become variables, others are looked up in `env`. Division is only by
/// nonzero constants; exponents must be non-negative integers.
pub fn eval_poly(e: &Expr, ring: Ring, env: &Env) -> Result<Poly, ExprError> {
    Ok(match e {
        Expr::Int(n) => Poly::constant(ring, Rational::from_integer(n.clone())),
        Expr::Ident(name) => {
            if let Some(i) = ring.var_index(name) {
                Poly::var(ring, i)
            } else if let Some(v) = env.get(name) {
                Poly::constant(ring, v.clone())
            } else {
                return err(format!("unbound identifier {name:?}"), 0);
            }
        }
        Expr::Neg(a) => -eval_poly(a, ring, env)?,
        Expr::Add(a, b) => eval_poly(a, ring, env)? + eval_poly(b, ring, env)?,
        Expr::Sub(a, b) => eval_poly(a, ring, env)? - eval_poly(b, ring, env)?,
        Expr::Mul(a, b) => eval_poly(a, ring, env)? * eval_poly(b, ring, env)?,
        Expr::Div(a, b) => {
            let d = eval_poly(b, ring, env)?;
            if !d.is_constant() || d.is_zero() {
                return err(format!("division by non-constant or zero {d}"), 0);
            }
            eval_poly(a, ring, env)?.scale(&d.constant_term().recip())
        }
        Expr::Pow(a, b) => {
            let ex = eval_const(b, env)?;
            let Some(n) = integer_exponent(&ex) else {
                return err(format!("polynomial exponent must be a non-negative integer, got {ex}"), 0);
            };
            eval_poly(a, ring, env)?.pow(n)
        }
        Expr::Exp(_) => return err("exp() is not a polynomial", 0),
    })
}

/// A quotient of polynomials, not reduced.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn from_poly(p: Poly) -> RatFunc {
        let den = Poly::one(p.ring());
        RatFunc { num: p, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc { num: &self.num + &o.num, den: self.den.clone() };
        }
        RatFunc { num: &(&self.num * &o.den) + &(&o.num * &self.den), den: &self.den * &o.den }
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc { num: &self.num * &o.num, den: &self.den * &o.den }
    }

    pub fn inv(&self) -> Option<RatFunc> {
        if self.num.is_zero() {
            None
        } else {
            Some(RatFunc { num: self.den.clone(), den: self.num.clone() })
        }
    }
}

/// Evaluates to a rational function in `ring`; division by any nonzero
/// polynomial is allowed.
pub fn eval_ratfunc(e: &Expr, ring: Ring, env: &Env) -> Result<RatFunc, ExprError> {
    Ok(match e {
        Expr::Int(_) | Expr::Ident(_) => RatFunc::from_poly(eval_poly(e, ring, env)?),
        Expr::Neg(a) => eval_ratfunc(a, ring, env)?.neg(),
        Expr::Add(a, b) => eval_ratfunc(a, ring, env)?.add(&eval_ratfunc(b, ring, env)?),
        Expr::Sub(a, b) => eval_ratfunc(a, ring, env)?.add(&eval_ratfunc(b, ring, env)?.neg()),
        Expr::Mul(a, b) => eval_ratfunc(a, ring, env)?.mul(&eval_ratfunc(b, ring, env)?),
        Expr::Div(a, b) => {
            let Some(d) = eval_ratfunc(b, ring, env)?.inv() else {
                return err("division by zero", 0);
            };
            eval_ratfunc(a, ring, env)?.mul(&d)
        }
        Expr::Pow(a, b) => {
            let ex = eval_const(b, env)?;
            if !ex.is_integer() {
                return err(format!("rational-function exponent must be an integer, got {ex}"), 0);
            }
            let n = ex.to_integer();
            let base = eval_ratfunc(a, ring, env)?;
            let base = if n < BigInt::zero() {
                match base.inv() {
                    Some(b) => b,
                    None => return err("zero to a negative power", 0),
                }
            } else {
                base
            };
            let n = n.magnitude().to_u32().unwrap_or(u32::MAX);
            let mut acc = RatFunc::from_poly(Poly::one(ring));
            for _ in 0..n {
                acc = acc.mul(&base);
            }
            acc
        }
        Expr::Exp(_) => return err("exp() is not a rational function", 0),
    })
}

impl Expr {
    /// Renames identifiers, e.g. to apply a variable permutation.
    pub fn rename(&self, f: &impl Fn(&str) -> String) -> Expr {
        let r = |e: &Expr| Box::new(e.rename(f));
        match self {
            Expr::Int(n) => Expr::Int(n.clone()),
            Expr::Ident(s) => Expr::Ident(f(s)),
            Expr::Neg(a) => Expr::Neg(r(a)),
            Expr::Add(a, b) => Expr::Add(r(a), r(b)),
            Expr::Sub(a, b) => Expr::Sub(r(a), r(b)),
            Expr::Mul(a, b) => Expr::Mul(r(a), r(b)),
            Expr::Div(a, b) => Expr::Div(r(a), r(b)),
            Expr::Pow(a, b) => Expr::Pow(r(a), r(b)),
            Expr::Exp(a) => Expr::Exp(r(a)),
        }
    }

    /// Identifiers occurring in the expression.
    pub fn idents(&self, out: &mut Vec<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Ident(s) => {
                if !out.contains(s) {
                    out.push(s.clone())
                }
            }
            Expr::Neg(a) | Expr::Exp(a) => a.idents(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.idents(out);
                b.idents(out)
            }
        }
    }
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Int(_) | Expr::Ident(_) | Expr::Exp(_) => 5,
        }
    }
}

fn at_least(e: &Expr, p: u8) -> String {
    if e.precedence() >= p {
        e.to_string()
    } else {
        format!("({e})")
    }
}

// Minimal parentheses for the parser's grammar, where unary minus binds
// tighter than products and looser than powers.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Ident(s) => write!(f, "{s}"),
            Expr::Neg(a) => write!(f, "-{}", at_least(a, 3)),
            Expr::Add(a, b) => write!(f, "{} + {}", at_least(a, 1), at_least(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", at_least(a, 1), at_least(b, 2)),
            Expr::Mul(a, b) => write!(f, "{}*{}", at_least(a, 2), at_least(b, 3)),
            Expr::Div(a, b) => write!(f, "{}/{}", at_least(a, 2), at_least(b, 3)),
            Expr::Pow(a, b) => write!(f, "{}^{}", at_least(a, 5), at_least(b, 5)),
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

/// Evaluates to a rational function with some identifiers bound to rational
/// functions; the rest must name variables of `ring`.
pub fn eval_ratfunc_bound(e: &Expr, ring: Ring, bound: &HashMap<String, RatFunc>) -> Result<RatFunc, ExprError> {
    let rec = |a: &Expr| eval_ratfunc_bound(a, ring, bound);
    Ok(match e {
        Expr::Int(n) => RatFunc::from_poly(Poly::constant(ring, Rational::from_integer(n.clone()))),
        Expr::Ident(name) => match (bound.get(name), ring.var_index(name)) {
            (Some(v), _) => v.clone(),
            (None, Some(i)) => RatFunc::from_poly(Poly::var(ring, i)),
            (None, None) => return err(format!("unbound identifier {name:?}"), 0),
        },
        Expr::Neg(a) => rec(a)?.neg(),
        Expr::Add(a, b) => rec(a)?.add(&rec(b)?),
        Expr::Sub(a, b) => rec(a)?.add(&rec(b)?.neg()),
        Expr::Mul(a, b) => rec(a)?.mul(&rec(b)?),
        Expr::Div(a, b) => match rec(b)?.inv() {
            Some(d) => rec(a)?.mul(&d),
            None => return err("division by zero", 0),
        },
        Expr::Pow(a, b) => {
            let ex = rec(b)?;
            let n = match (ex.num.is_constant(), ex.den.is_constant()) {
                (true, true) => ex.num.constant_term() / ex.den.constant_term(),
                _ => return err("exponent must be constant", 0),
            };
            if !n.is_integer() {
                return err(format!("rational-function exponent must be an integer, got {n}"), 0);
            }
            let base = rec(a)?;
            let base = if n < Rational::zero() {
                base.inv().ok_or_else(|| ExprError { message: "zero to a negative power".into(), column: 0 })?
            } else {
                base
            };
            let mut acc = RatFunc::from_poly(Poly::one(ring));
            for _ in 0..n.to_integer().magnitude().to_u32().unwrap_or(u32::MAX) {
                acc = acc.mul(&base);
            }
            acc
        }
        Expr::Exp(_) => return err("exp() is not a rational function", 0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn precedence() {
        let env = Env::new();
        let p = eval_poly(&parse("-x^2 + 2*x*y - 3/2").unwrap(), Ring::Xyz, &env).unwrap();
        assert_eq!(p.to_string(), "2*x*y - x^2 - 3/2");
    }

    #[test]
    fn parameters_resolve_from_env() {
        let mut env = Env::new();
        env.insert("b".into(), rat(1, 2));
        env.insert("e".into(), rat(-3, 1));
        let c = eval_const(&parse("-1-b/e").unwrap(), &env).unwrap();
        assert_eq!(c, rat(-5, 6));
    }

    #[test]
    fn decimals_rejected() {
        let e = parse("0.5*x").unwrap_err();
        assert_eq!(e.column, 2);
        assert!(parse("x + 1e3").is_err());
    }

    #[test]
    fn rational_function_division() {
        let r = eval_ratfunc(&parse("x/(1+y)").unwrap(), Ring::Xyz, &Env::new()).unwrap();
        assert_eq!(r.num.to_string(), "x");
        assert_eq!(r.den.to_string(), "y + 1");
    }

    #[test]
    fn display_reparses() {
        for src in ["x/(y*z)", "(x*y)^2", "x^(-1-b/e)", "exp(d*x-b*y)^(1/2)", "-x*(1+y)^2/(2-z)", "a-(b-c)", "a-(b+c)", "-(a*b)", "--x^2", "a*(b*c)", "(x^2)^3", "x^-y"] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{src} -> {e}");
        }
    }

    #[test]
    fn display_is_minimal() {
        assert_eq!(parse("((a*c) - (2*a*k)) + (g*k)").unwrap().to_string(), "a*c - 2*a*k + g*k");
        assert_eq!(parse("a - (b - c)").unwrap().to_string(), "a - (b - c)");
    }

    #[test]
    fn errors_carry_columns() {
        assert_eq!(parse("x + * y").unwrap_err().column, 5);
        assert_eq!(parse("(x + y").unwrap_err().column, 7);
    }
}
