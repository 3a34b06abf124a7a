//! Darboux functions `x^ρ1 y^ρ2 z^ρ3 · Π F_i^{λ_i} · exp(f/g)^{λ0}` and
//! their logarithmic derivatives along the vector field.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::linalg;
use crate::algebra::rational::format_rational;
use crate::algebra::{AlgebraError, Monomial, Poly, Rational, Ring};
use crate::expr::{self, Env, Expr};
use crate::series::{RatSeries, SeriesError, TruncatedSeries};
use crate::system::{LVSystem, LvError};

/// `exp(num/den)^exponent`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpFactor {
    pub num: Poly,
    pub den: Poly,
    pub exponent: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DarbouxFunction {
    /// Powers of the coordinate planes `x, y, z`.
    pub monomial: [Rational; 3],
    /// Polynomial factors with exponents, each normalized and distinct.
    pub factors: Vec<(Poly, Rational)>,
    pub exp_part: Option<ExpFactor>,
}

/// What `verify_relation` checks the logarithmic derivative against.
#[derive(Clone, Debug, PartialEq)]
pub enum RelationKind {
    FirstIntegral,
    InverseJacobiMultiplier,
    Eigenfunction(Rational),
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationKind::FirstIntegral => write!(f, "fi"),
            RelationKind::InverseJacobiMultiplier => write!(f, "ijm"),
            RelationKind::Eigenfunction(k) => write!(f, "eig:{}", format_rational(k)),
        }
    }
}

impl std::str::FromStr for RelationKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fi" => Ok(RelationKind::FirstIntegral),
            "ijm" => Ok(RelationKind::InverseJacobiMultiplier),
            _ => match s.strip_prefix("eig:") {
                Some(k) => crate::algebra::parse_rational(k)
                    .map(RelationKind::Eigenfunction)
                    .map_err(|e| e.to_string()),
                None => Err(format!("unknown relation kind {s:?} (fi, ijm, eig:K)")),
            },
        }
    }
}

/// Scales a factor so it is 1 at the origin, or primitive if it vanishes there.
fn normalize_factor(p: &Poly) -> Poly {
    let c = p.constant_term();
    if c.is_zero() {
        p.primitive()
    } else {
        p.scale(&c.recip())
    }
}

impl DarbouxFunction {
    pub fn one() -> DarbouxFunction {
        DarbouxFunction {
            monomial: std::array::from_fn(|_| Rational::zero()),
            factors: Vec::new(),
            exp_part: None,
        }
    }

    pub fn monomial(exps: [Rational; 3]) -> DarbouxFunction {
        DarbouxFunction { monomial: exps, ..DarbouxFunction::one() }
    }

    pub fn factor(p: Poly, exponent: Rational) -> DarbouxFunction {
        let mut d = DarbouxFunction::one();
        d.push_factor(p, exponent);
        d
    }

    pub fn exponential(num: Poly, den: Poly, exponent: Rational) -> DarbouxFunction {
        DarbouxFunction { exp_part: Some(ExpFactor { num, den, exponent }), ..DarbouxFunction::one() }
    }

    /// Adds `p^exponent`, folding monomials into the prefactor, dropping
    /// constants and merging repeated factors.
    pub fn push_factor(&mut self, p: Poly, exponent: Rational) {
        assert_eq!(p.ring(), Ring::Xyz, "Darboux factors live in (x, y, z)");
        assert!(!p.is_zero(), "zero factor");
        if exponent.is_zero() || p.is_constant() {
            return;
        }
        if p.num_terms() == 1 {
            let (m, _) = p.terms().next().unwrap();
            for i in 0..3 {
                self.monomial[i] += &exponent * Rational::from_integer(m.exponent(i).into());
            }
            return;
        }
        let f = normalize_factor(&p);
        if let Some(slot) = self.factors.iter_mut().find(|(g, _)| *g == f) {
            slot.1 += exponent;
        } else {
            self.factors.push((f, exponent));
        }
        self.factors.retain(|(_, e)| !e.is_zero());
    }

    fn push_exp(&mut self, e: ExpFactor) {
        if e.exponent.is_zero() || e.num.is_zero() {
            return;
        }
        self.exp_part = Some(match self.exp_part.take() {
            None => e,
            Some(old) => {
                let num = &old.num.scale(&old.exponent) * &e.den;
                let num = &num + &(&e.num.scale(&e.exponent) * &old.den);
                ExpFactor { num, den: &old.den * &e.den, exponent: Rational::one() }
            }
        });
    }

    pub fn mul(&self, other: &DarbouxFunction) -> DarbouxFunction {
        let mut d = self.clone();
        for i in 0..3 {
            d.monomial[i] += &other.monomial[i];
        }
        for (f, e) in &other.factors {
            d.push_factor(f.clone(), e.clone());
        }
        if let Some(e) = &other.exp_part {
            d.push_exp(e.clone());
        }
        d
    }

    pub fn pow(&self, r: &Rational) -> DarbouxFunction {
        let mut d = DarbouxFunction::monomial(std::array::from_fn(|i| &self.monomial[i] * r));
        for (f, e) in &self.factors {
            d.push_factor(f.clone(), e * r);
        }
        if let Some(e) = &self.exp_part {
            d.push_exp(ExpFactor { exponent: &e.exponent * r, ..e.clone() });
        }
        d
    }

    /// Parses an expression such as `x*y*(1+a*x-e*y)^(-1-b/e)*exp(d*x)`.
    /// Parameters in exponents and coefficients are resolved from `env`;
    /// an unbound parameter is an error.
    pub fn parse(src: &str, env: &Env) -> Result<DarbouxFunction, LvError> {
        let e = expr::parse(src)?;
        let mut d = DarbouxFunction::one();
        d.absorb(&e, &Rational::one(), env)?;
        Ok(d)
    }

    fn absorb(&mut self, e: &Expr, power: &Rational, env: &Env) -> Result<(), LvError> {
        match e {
            Expr::Mul(a, b) => {
                self.absorb(a, power, env)?;
                self.absorb(b, power, env)
            }
            Expr::Div(a, b) => {
                self.absorb(a, power, env)?;
                self.absorb(b, &-power, env)
            }
            Expr::Neg(a) => self.absorb(a, power, env),
            Expr::Pow(base, ex) => {
                let r = expr::eval_const(ex, env).map_err(|mut err| {
                    err.message = format!("exponent {ex} must be a rational constant after specialization: {}", err.message);
                    err
                })?;
                self.absorb(base, &(power * r), env)
            }
            Expr::Exp(arg) => {
                let rf = expr::eval_ratfunc(arg, Ring::Xyz, env)?;
                self.push_exp(ExpFactor { num: rf.num, den: rf.den, exponent: power.clone() });
                Ok(())
            }
            _ => {
                let p = expr::eval_poly(e, Ring::Xyz, env)?;
                if p.is_zero() {
                    return Err(LvError::ZeroPolynomial);
                }
                self.push_factor(p, power.clone());
                Ok(())
            }
        }
    }

    /// `p` with `X(D) = p·D`: the prefactor contributes `ρ·(Λ_x, Λ_y, Λ_z)`,
    /// each factor its cofactor, and the exponential part `λ0·X(f/g)`.
    pub fn log_derivative(&self, sys: &LVSystem) -> Result<Poly, LvError> {
        let mut p = Poly::zero(Ring::Xyz);
        for i in 0..3 {
            if !self.monomial[i].is_zero() {
                p = &p + &sys.coordinate_cofactor(i).scale(&self.monomial[i]);
            }
        }
        for (index, (f, e)) in self.factors.iter().enumerate() {
            match sys.cofactor_of(f) {
                Ok(c) => p = &p + &c.poly().scale(e),
                Err(LvError::NotInvariant { factor, remainder, .. }) => {
                    return Err(LvError::NotInvariant { index, factor, remainder })
                }
                Err(err) => return Err(err),
            }
        }
        if let Some(ex) = &self.exp_part {
            let xf = sys.apply_vector_field(&ex.num)?;
            let xg = sys.apply_vector_field(&ex.den)?;
            let top = &(&xf * &ex.den) - &(&ex.num * &xg);
            let q = top.exact_div(&(&ex.den * &ex.den)).map_err(|e| match e {
                AlgebraError::NotDivisible { .. } => LvError::ExpPartNotPolynomial,
                other => other.into(),
            })?;
            p = &p + &q.scale(&ex.exponent);
        }
        Ok(p)
    }

    /// The analytic part `1 + O(x, y, z)` of the function: every factor and
    /// the exponential are expanded at the origin, constants dropped.
    pub fn unit_series(&self, order: u32) -> Result<RatSeries, SeriesError> {
        let mut u = TruncatedSeries::one(order, &Rational::zero());
        for (f, e) in &self.factors {
            let c = f.constant_term();
            if c.is_zero() {
                return Err(SeriesError::PreconditionViolated(format!("factor ({f}) vanishes at the origin")));
            }
            let s = TruncatedSeries::from_poly(&f.scale(&c.recip()), order).pow_rational(e)?;
            u = u.try_mul(&s)?;
        }
        if let Some(ex) = &self.exp_part {
            let g0 = ex.den.constant_term();
            if g0.is_zero() {
                return Err(SeriesError::PreconditionViolated(format!("exponent denominator ({}) vanishes at the origin", ex.den)));
            }
            let ginv = TruncatedSeries::from_poly(&ex.den.scale(&g0.recip()), order).inverse()?;
            let mut q = TruncatedSeries::from_poly(&ex.num.scale(&g0.recip()), order).try_mul(&ginv)?.scale(&ex.exponent);
            q.set(crate::series::ExponentVector::ZERO, Rational::zero());
            u = u.try_mul(&q.exp()?)?;
        }
        Ok(u)
    }

    pub fn verify_relation(&self, sys: &LVSystem, kind: &RelationKind) -> Result<bool, LvError> {
        let p = self.log_derivative(sys)?;
        Ok(match kind {
            RelationKind::FirstIntegral => p.is_zero(),
            RelationKind::InverseJacobiMultiplier => p == sys.divergence(),
            RelationKind::Eigenfunction(k) => p == Poly::constant(Ring::Xyz, k.clone()),
        })
    }
}

fn fmt_exp(r: &Rational) -> String {
    if r.is_integer() && !r.is_negative() {
        format_rational(r)
    } else {
        format!("({})", format_rational(r))
    }
}

impl fmt::Display for DarbouxFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, name) in ["x", "y", "z"].iter().enumerate() {
            let r = &self.monomial[i];
            if r.is_zero() {
                continue;
            }
            parts.push(if r.is_one() { name.to_string() } else { format!("{name}^{}", fmt_exp(r)) });
        }
        for (p, e) in &self.factors {
            parts.push(if e.is_one() { format!("({p})") } else { format!("({p})^{}", fmt_exp(e)) });
        }
        if let Some(ex) = &self.exp_part {
            let arg = if ex.den == Poly::one(Ring::Xyz) {
                format!("{}", ex.num)
            } else {
                format!("({})/({})", ex.num, ex.den)
            };
            parts.push(if ex.exponent.is_one() {
                format!("exp({arg})")
            } else {
                format!("exp({arg})^{}", fmt_exp(&ex.exponent))
            });
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Right-hand side of a Darboux combination problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombinationTarget {
    Zero,
    Divergence,
}

/// Finds exponents `λ_i` with `Σ λ_i C_i = 0` (a basis of all solutions) or
/// `= div X` (one solution), where `C_i` is the log-derivative of atom `i`.
pub fn find_darboux_combination(
    sys: &LVSystem,
    atoms: &[DarbouxFunction],
    target: CombinationTarget,
) -> Result<Option<Vec<Vec<Rational>>>, LvError> {
    let mut cofactors = Vec::with_capacity(atoms.len());
    for (index, a) in atoms.iter().enumerate() {
        match a.log_derivative(sys) {
            Ok(c) => cofactors.push(c),
            Err(LvError::NotInvariant { factor, remainder, .. }) => {
                return Err(LvError::NotInvariant { index, factor, remainder })
            }
            Err(e) => return Err(e),
        }
    }
    let rhs = match target {
        CombinationTarget::Zero => Poly::zero(Ring::Xyz),
        CombinationTarget::Divergence => sys.divergence(),
    };
    let mut monos: Vec<Monomial> = cofactors.iter().chain(std::iter::once(&rhs)).flat_map(|c| c.terms().map(|(m, _)| *m)).collect();
    monos.sort();
    monos.dedup();
    let matrix: Vec<Vec<Rational>> = monos.iter().map(|m| cofactors.iter().map(|c| c.coeff(m)).collect()).collect();
    match target {
        CombinationTarget::Zero => {
            let basis = if matrix.is_empty() {
                (0..atoms.len())
                    .map(|i| (0..atoms.len()).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
                    .collect()
            } else {
                linalg::nullspace(&matrix, atoms.len())
            };
            Ok(if basis.is_empty() { None } else { Some(basis) })
        }
        CombinationTarget::Divergence => {
            let b: Vec<Rational> = monos.iter().map(|m| rhs.coeff(m)).collect();
            Ok(linalg::solve(&matrix, &b).map(|v| vec![v]))
        }
    }
}
