//! Truncated power series in `x, y, z` with coefficients in a pluggable ring,
//! and the coefficient recursions built on them.

mod recursion;
mod theorem1;

pub use recursion::{
    eigen_series, linearize_field, linearize_system, node_linearize_2d, resonant_series_integral, solve_homological,
    DiagonalField, LinearizationResult, ResonantIntegralResult,
};
pub use theorem1::{theorem1_construct, theorem1_construct_with_prefactor, Theorem1Result};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::rational::format_rational;
use crate::algebra::{Monomial, Poly, Rational, Ring};
use crate::system::LvError;

#[derive(Debug, thiserror::Error)]
pub enum SeriesError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("Theorem-1 hypothesis fails at I = {0}: cross product vanishes and A_I != 0")]
    HypothesisFailed(ExponentVector),
    #[error("unsolvable coefficient equation at I = {0}")]
    ResonantObstruction(ExponentVector),
    #[error("series must have constant term 1")]
    NotUnit,
    #[error("series must have zero constant term")]
    NonzeroConstant,
    #[error("truncation orders differ ({0} vs {1})")]
    OrderMismatch(u32, u32),
    #[error(transparent)]
    Lv(#[from] LvError),
}

/// Coefficient ring for series: rationals, or polynomials in the parameters.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn constant_like(&self, r: &Rational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, r: &Rational) -> Self;
    /// The value as a rational if the coefficient is constant.
    fn as_constant(&self) -> Option<Rational>;
}

impl Coeff for Rational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn constant_like(&self, r: &Rational) -> Self {
        r.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
    fn as_constant(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl Coeff for Poly {
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Poly::zero(self.ring())
    }
    fn constant_like(&self, r: &Rational) -> Self {
        Poly::constant(self.ring(), r.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        Poly::scale(self, &-Rational::one())
    }
    fn scale(&self, r: &Rational) -> Self {
        Poly::scale(self, r)
    }
    fn as_constant(&self) -> Option<Rational> {
        self.is_constant().then(|| self.constant_term())
    }
}

/// Multi-index `I = (i, j, k)` for `x^i y^j z^k`. Ordered by total degree,
/// then graded reverse lexicographically with `x < y < z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExponentVector(pub [u32; 3]);

impl ExponentVector {
    pub const ZERO: ExponentVector = ExponentVector([0, 0, 0]);

    pub fn new(i: u32, j: u32, k: u32) -> ExponentVector {
        ExponentVector([i, j, k])
    }

    pub fn unit(m: usize) -> ExponentVector {
        let mut e = [0; 3];
        e[m] = 1;
        ExponentVector(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, o: &ExponentVector) -> ExponentVector {
        ExponentVector(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }

    pub fn checked_sub(&self, o: &ExponentVector) -> Option<ExponentVector> {
        let mut e = [0; 3];
        for i in 0..3 {
            e[i] = self.0[i].checked_sub(o.0[i])?;
        }
        Some(ExponentVector(e))
    }

    pub fn dot(&self, w: &[Rational; 3]) -> Rational {
        (0..3).map(|i| &w[i] * Rational::from_integer(self.0[i].into())).sum()
    }

    pub fn as_rationals(&self) -> [Rational; 3] {
        std::array::from_fn(|i| Rational::from_integer(self.0[i].into()))
    }

    pub fn monomial(&self) -> Monomial {
        Monomial::from_exponents(&self.0)
    }

    /// All indices of total degree `d`, in ascending order.
    pub fn of_degree(d: u32) -> Vec<ExponentVector> {
        let mut out = Vec::new();
        for i in 0..=d {
            for j in 0..=d - i {
                out.push(ExponentVector([i, j, d - i - j]));
            }
        }
        out.sort();
        out
    }

    /// All indices with `|I| <= n`, ascending.
    pub fn up_to(n: u32) -> Vec<ExponentVector> {
        (0..=n).flat_map(ExponentVector::of_degree).collect()
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| o.0[0].cmp(&self.0[0]))
            .then_with(|| o.0[1].cmp(&self.0[1]))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Formats a rational triple as `(a,b,c)`.
pub fn format_triple(t: &[Rational; 3]) -> String {
    format!("({},{},{})", format_rational(&t[0]), format_rational(&t[1]), format_rational(&t[2]))
}

/// `Σ c_I X^I` with every stored term of degree at most `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<C: Coeff> {
    order: u32,
    coeffs: BTreeMap<ExponentVector, C>,
    zero: C,
}

pub type RatSeries = TruncatedSeries<Rational>;

impl<C: Coeff> TruncatedSeries<C> {
    /// The zero series; `proto` fixes the coefficient ring.
    pub fn zero(order: u32, proto: &C) -> Self {
        TruncatedSeries { order, coeffs: BTreeMap::new(), zero: proto.zero_like() }
    }

    pub fn constant(order: u32, c: C) -> Self {
        let mut s = TruncatedSeries::zero(order, &c);
        s.set(ExponentVector::ZERO, c);
        s
    }

    pub fn one(order: u32, proto: &C) -> Self {
        TruncatedSeries::constant(order, proto.constant_like(&Rational::one()))
    }

    pub fn monomial(order: u32, i: ExponentVector, c: C) -> Self {
        let mut s = TruncatedSeries::zero(order, &c);
        s.set(i, c);
        s
    }

    pub fn from_terms(order: u32, proto: &C, terms: impl IntoIterator<Item = (ExponentVector, C)>) -> Self {
        let mut s = TruncatedSeries::zero(order, proto);
        for (i, c) in terms {
            s.add_term(i, &c);
        }
        s
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn zero_coeff(&self) -> &C {
        &self.zero
    }

    pub fn coeff(&self, i: &ExponentVector) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn get(&self, i: &ExponentVector) -> Option<&C> {
        self.coeffs.get(i)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &C)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&ExponentVector::ZERO)
    }

    /// Sets a coefficient; terms above the order are dropped.
    pub fn set(&mut self, i: ExponentVector, c: C) {
        if i.degree() > self.order {
            return;
        }
        if c.is_zero() {
            self.coeffs.remove(&i);
        } else {
            self.coeffs.insert(i, c);
        }
    }

    pub fn add_term(&mut self, i: ExponentVector, c: &C) {
        if i.degree() > self.order || c.is_zero() {
            return;
        }
        let v = match self.coeffs.get(&i) {
            Some(old) => old.add(c),
            None => c.clone(),
        };
        self.set(i, v);
    }

    /// Same coefficients, cut at a lower order (or relabelled at a higher one).
    pub fn truncate(&self, order: u32) -> Self {
        let mut s = TruncatedSeries::zero(order, &self.zero);
        for (i, c) in &self.coeffs {
            s.set(*i, c.clone());
        }
        if order > self.order {
            s.order = self.order;
        }
        s
    }

    fn check_order(&self, o: &Self) -> Result<(), SeriesError> {
        if self.order == o.order {
            Ok(())
        } else {
            Err(SeriesError::OrderMismatch(self.order, o.order))
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check_order(o)?;
        let mut s = self.clone();
        for (i, c) in &o.coeffs {
            s.add_term(*i, c);
        }
        Ok(s)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, SeriesError> {
        self.try_add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map(|c| c.scale(r))
    }

    pub fn mul_coeff(&self, k: &C) -> Self {
        self.map(|c| c.mul(k))
    }

    fn map(&self, f: impl Fn(&C) -> C) -> Self {
        let mut s = TruncatedSeries::zero(self.order, &self.zero);
        for (i, c) in &self.coeffs {
            s.set(*i, f(c));
        }
        s
    }

    /// Product truncated at the common order.
    pub fn try_mul(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check_order(o)?;
        let mut s = TruncatedSeries::zero(self.order, &self.zero);
        for (i, a) in &self.coeffs {
            let room = self.order - i.degree();
            for (j, b) in &o.coeffs {
                if j.degree() > room {
                    break;
                }
                s.add_term(i.add(j), &a.mul(b));
            }
        }
        Ok(s)
    }

    /// Multiplies by `X^J`, dropping what falls above the order.
    pub fn shift(&self, j: &ExponentVector) -> Self {
        let mut s = TruncatedSeries::zero(self.order, &self.zero);
        for (i, c) in &self.coeffs {
            s.set(i.add(j), c.clone());
        }
        s
    }

    /// `∂/∂x_m`. The result keeps the order label; its degree-`order` part is
    /// necessarily incomplete, which callers account for.
    pub fn derivative(&self, m: usize) -> Self {
        let mut s = TruncatedSeries::zero(self.order, &self.zero);
        for (i, c) in &self.coeffs {
            if i.0[m] > 0 {
                let mut e = i.0;
                e[m] -= 1;
                s.set(ExponentVector(e), c.scale(&Rational::from_integer(i.0[m].into())));
            }
        }
        s
    }

    /// `x_m ∂/∂x_m`, which preserves degrees and so stays exact at the order.
    pub fn euler(&self, m: usize) -> Self {
        let mut s = TruncatedSeries::zero(self.order, &self.zero);
        for (i, c) in &self.coeffs {
            if i.0[m] > 0 {
                s.set(*i, c.scale(&Rational::from_integer(i.0[m].into())));
            }
        }
        s
    }

    fn split_unit(&self) -> Result<Self, SeriesError> {
        match self.constant_term().as_constant() {
            Some(c) if c.is_one() => {
                let mut w = self.clone();
                w.set(ExponentVector::ZERO, self.zero.clone());
                Ok(w)
            }
            _ => Err(SeriesError::NotUnit),
        }
    }

    /// `Σ_k a_k w^k` for `w` with zero constant term.
    fn compose(&self, w: &Self, coeffs: impl Fn(u32) -> Rational) -> Self {
        let mut total = TruncatedSeries::zero(self.order, &self.zero);
        let mut power = TruncatedSeries::one(self.order, &self.zero);
        for k in 0..=self.order {
            let a = coeffs(k);
            if !Zero::is_zero(&a) {
                total = total.try_add(&power.scale(&a)).expect("same order");
            }
            power = power.try_mul(w).expect("same order");
            if power.is_zero() {
                break;
            }
        }
        total
    }

    /// `(1 + w)^r` by the binomial series.
    pub fn pow_rational(&self, r: &Rational) -> Result<Self, SeriesError> {
        let w = self.split_unit()?;
        Ok(self.compose(&w, |k| binomial(r, k)))
    }

    /// `(1 + w)^{-1}`.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        self.pow_rational(&-Rational::one())
    }

    /// `exp(w)` for `w` with zero constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.constant_term().is_zero() {
            return Err(SeriesError::NonzeroConstant);
        }
        let mut fact = Rational::one();
        let table: Vec<Rational> = (0..=self.order)
            .map(|k| {
                if k > 0 {
                    fact *= Rational::from_integer(k.into());
                }
                fact.recip()
            })
            .collect();
        Ok(self.compose(self, |k| table[k as usize].clone()))
    }

    /// `log(1 + w)`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        let w = self.split_unit()?;
        Ok(self.compose(&w, |k| {
            if k == 0 {
                Rational::zero()
            } else {
                let s = if k % 2 == 1 { Rational::one() } else { -Rational::one() };
                s / Rational::from_integer(k.into())
            }
        }))
    }

    /// Indices of nonzero terms with degree at most `n`.
    pub fn support_up_to(&self, n: u32) -> Vec<ExponentVector> {
        self.coeffs.keys().copied().filter(|i| i.degree() <= n).collect()
    }
}

impl TruncatedSeries<Rational> {
    /// Expansion of a polynomial in `x, y, z`.
    pub fn from_poly(p: &Poly, order: u32) -> RatSeries {
        assert_eq!(p.ring(), Ring::Xyz, "series are in x, y, z");
        let mut s = TruncatedSeries::zero(order, &Rational::zero());
        for (m, c) in p.terms() {
            s.add_term(ExponentVector([m.exponent(0), m.exponent(1), m.exponent(2)]), c);
        }
        s
    }

    /// The terms of degree at most `n` as a polynomial.
    pub fn to_poly(&self, n: u32) -> Poly {
        Poly::from_terms(
            Ring::Xyz,
            self.coeffs.iter().filter(|(i, _)| i.degree() <= n).map(|(i, c)| (i.monomial(), c.clone())),
        )
    }

    pub fn eval_rational(&self, point: &[Rational; 3]) -> Rational {
        self.to_poly(self.order).eval(point)
    }
}

/// `binom(r, k) = r (r-1) ... (r-k+1) / k!`.
pub fn binomial(r: &Rational, k: u32) -> Rational {
    let mut b = Rational::one();
    for j in 0..k {
        let j = Rational::from_integer(j.into());
        b = b * (r - &j) / (j + Rational::one());
    }
    b
}

impl<C: Coeff> fmt::Display for TruncatedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0 + O({})", self.order + 1);
        }
        let mut first = true;
        for (i, c) in &self.coeffs {
            let mono = ["x", "y", "z"]
                .iter()
                .zip(i.0)
                .filter(|(_, e)| *e > 0)
                .map(|(v, e)| if e == 1 { v.to_string() } else { format!("{v}^{e}") })
                .collect::<Vec<_>>()
                .join("*");
            let cs = c.to_string();
            let neg_rational = c.as_constant().is_some_and(|r| r.is_negative());
            let body = match (mono.is_empty(), c.as_constant()) {
                (true, _) => cs.trim_start_matches('-').to_string(),
                (false, Some(r)) if r.abs().is_one() => mono,
                (false, Some(_)) => format!("{}*{mono}", cs.trim_start_matches('-')),
                (false, None) => format!("({cs})*{mono}"),
            };
            let sign = if neg_rational { "-" } else { "+" };
            if first {
                write!(f, "{}{body}", if neg_rational { "-" } else { "" })?;
            } else {
                write!(f, " {sign} {body}")?;
            }
            first = false;
        }
        write!(f, " + O({})", self.order + 1)
    }
}
