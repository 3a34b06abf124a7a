//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::monomial::{Monomial, MonomialOrder, MAX_VARS};
use super::rational::{format_rational, Rational};
use super::AlgebraError;

pub const XYZ_NAMES: [&str; 3] = ["x", "y", "z"];
pub const PARAM_NAMES: [&str; 9] = ["a", "b", "c", "d", "e", "f", "g", "h", "k"];

/// Ring descriptor: the ordered variable list of a polynomial ring over Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ring {
    /// Phase-space variables `x, y, z`.
    Xyz,
    /// System parameters `a, b, c, d, e, f, g, h, k`.
    Params,
    /// `n` anonymous variables `v0, v1, ...` (n <= 9).
    Generic(u8),
}

impl Ring {
    pub fn nvars(&self) -> usize {
        match self {
            Ring::Xyz => 3,
            Ring::Params => 9,
            Ring::Generic(n) => *n as usize,
        }
    }

    pub fn var_name(&self, i: usize) -> String {
        match self {
            Ring::Xyz => XYZ_NAMES[i].to_string(),
            Ring::Params => PARAM_NAMES[i].to_string(),
            Ring::Generic(_) => format!("v{i}"),
        }
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        match self {
            Ring::Xyz => XYZ_NAMES.iter().position(|n| *n == name),
            Ring::Params => PARAM_NAMES.iter().position(|n| *n == name),
            Ring::Generic(n) => name
                .strip_prefix('v')
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|i| i < &(*n as usize)),
        }
    }

    pub fn default_order(&self) -> MonomialOrder {
        MonomialOrder::grevlex(self.nvars())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    ring: Ring,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(ring: Ring) -> Poly {
        Poly { ring, terms: BTreeMap::new() }
    }

    pub fn one(ring: Ring) -> Poly {
        Poly::constant(ring, Rational::one())
    }

    pub fn constant(ring: Ring, c: Rational) -> Poly {
        Poly::term(ring, Monomial::ONE, c)
    }

    pub fn term(ring: Ring, m: Monomial, c: Rational) -> Poly {
        let mut p = Poly::zero(ring);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn var(ring: Ring, i: usize) -> Poly {
        assert!(i < ring.nvars() && i < MAX_VARS);
        Poly::term(ring, Monomial::var(i), Rational::one())
    }

    pub fn from_terms(ring: Ring, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Poly {
        let mut p = Poly::zero(ring);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::ONE)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_ring(&self, other: &Poly) -> Result<(), AlgebraError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(AlgebraError::RingMismatch(self.ring, other.ring))
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.check_ring(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(*m, c.clone());
        }
        Ok(r)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.check_ring(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(*m, -c.clone());
        }
        Ok(r)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.check_ring(other)?;
        let mut r = Poly::zero(self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(r)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.ring);
        }
        Poly {
            ring: self.ring,
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.ring);
        }
        Poly {
            ring: self.ring,
            terms: self.terms.iter().map(|(t, v)| (t.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one(self.ring);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut r = Poly::zero(self.ring);
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if let Some(q) = m.div_var(var) {
                r.add_term(q, c * Rational::from_integer(BigInt::from(e)));
            }
        }
        r
    }

    /// Leading monomial and coefficient under `order`.
    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(Monomial, Rational)> {
        self.terms
            .iter()
            .max_by_key(|(m, _)| order.key(m))
            .map(|(m, c)| (*m, c.clone()))
    }

    /// Exact quotient `self / divisor`, or `NotDivisible` carrying the
    /// partial remainder as a witness.
    pub fn exact_div(&self, divisor: &Poly) -> Result<Poly, AlgebraError> {
        self.check_ring(divisor)?;
        if divisor.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let order = self.ring.default_order();
        let (lm, lc) = divisor.leading_term(&order).expect("nonzero divisor");
        let mut rem: BTreeMap<u128, (Monomial, Rational)> = self
            .terms
            .iter()
            .map(|(m, c)| (order.key(m), (*m, c.clone())))
            .collect();
        let mut quotient = Poly::zero(self.ring);
        while let Some((_, (m, c))) = rem.iter().next_back().map(|(k, v)| (*k, v.clone())) {
            let Some(q) = lm.quotient_of(&m) else {
                let witness = Poly::from_terms(self.ring, rem.into_values());
                return Err(AlgebraError::NotDivisible { remainder: witness });
            };
            let qc = &c / &lc;
            for (dm, dc) in &divisor.terms {
                let t = dm.mul(&q);
                let key = order.key(&t);
                let delta = dc * &qc;
                let entry = rem.entry(key).or_insert_with(|| (t, Rational::zero()));
                entry.1 -= delta;
                if entry.1.is_zero() {
                    rem.remove(&key);
                }
            }
            quotient.add_term(q, qc);
        }
        Ok(quotient)
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let n = self.ring.nvars();
        assert!(point.len() >= n, "point has too few coordinates");
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, v) in point.iter().enumerate().take(n) {
                let e = m.exponent(i);
                if e > 0 {
                    t *= num_traits::pow(v.clone(), e as usize);
                }
            }
            total += t;
        }
        total
    }

    /// Substitutes `images[i]` for variable `i`; images live in `target`.
    pub fn substitute(&self, images: &[Poly], target: Ring) -> Poly {
        let n = self.ring.nvars();
        assert!(images.len() >= n);
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(target), p.clone()]).collect();
        let mut r = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for i in 0..n {
                let e = m.exponent(i) as usize;
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e];
            }
            r = &r + &t;
        }
        r
    }

    /// Renames variables within the same ring: variable `i` becomes `perm[i]`.
    pub fn permute_vars(&self, perm: &[usize]) -> Poly {
        Poly::from_terms(self.ring, self.terms.iter().map(|(m, c)| (m.permuted(perm), c.clone())))
    }

    /// Reinterprets the polynomial in another ring with at least as many
    /// variables, keeping variable indices.
    pub fn lift(&self, target: Ring) -> Result<Poly, AlgebraError> {
        let used = (0..MAX_VARS).filter(|&i| self.terms.keys().any(|m| m.exponent(i) > 0)).max();
        if used.is_some_and(|u| u >= target.nvars()) {
            return Err(AlgebraError::RingMismatch(self.ring, target));
        }
        Ok(Poly { ring: target, terms: self.terms.clone() })
    }

    /// Content-free normal form: integer coefficients with gcd 1 and a
    /// positive leading coefficient under the default order.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let lcm = super::rational::denominator_lcm(self.terms.values());
        let ints: Vec<BigInt> = self
            .terms
            .values()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let (_, lc) = self.leading_term(&self.ring.default_order()).unwrap();
        let sign = if lc.is_negative() { -BigInt::one() } else { BigInt::one() };
        let factor = Rational::new(lcm * sign, g);
        self.scale(&factor)
    }

    /// Monic normalization under `order`.
    pub fn monic(&self, order: &MonomialOrder) -> Poly {
        match self.leading_term(order) {
            Some((_, lc)) => self.scale(&lc.recip()),
            None => self.clone(),
        }
    }

    /// Terms listed from the largest to the smallest under the default order.
    pub fn sorted_terms(&self) -> Vec<(Monomial, Rational)> {
        let order = self.ring.default_order();
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        v.sort_by_key(|(m, _)| std::cmp::Reverse(order.key(m)));
        v
    }
}

fn format_monomial(ring: Ring, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for i in 0..ring.nvars() {
        match m.exponent(i) {
            0 => {}
            1 => parts.push(ring.var_name(i)),
            e => parts.push(format!("{}^{}", ring.var_name(i), e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.sorted_terms().iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if m.is_one() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", format_monomial(self.ring, m))?;
            } else {
                write!(f, "{}*{}", format_rational(&abs), format_monomial(self.ring, m))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{:?}]({})", self.ring, self)
    }
}

// Operator impls panic on ring mismatch; use the `try_*` methods when the
// operands are not known to share a ring.
impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("ring mismatch")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).expect("ring mismatch")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("ring mismatch")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn x() -> Poly {
        Poly::var(Ring::Xyz, 0)
    }
    fn y() -> Poly {
        Poly::var(Ring::Xyz, 1)
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&x() + &y()) * &(&x() - &y());
        assert_eq!(p, &x().pow(2) - &y().pow(2));
        assert_eq!(p.to_string(), "-y^2 + x^2");
    }

    #[test]
    fn one_is_identity() {
        let p = &(&x() * &y()) + &Poly::constant(Ring::Xyz, int(3));
        assert_eq!(&Poly::one(Ring::Xyz) * &p, p);
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = Poly::var(Ring::Params, 0);
        assert!(matches!(x().try_mul(&a), Err(AlgebraError::RingMismatch(..))));
        let lifted = x().lift(Ring::Params).unwrap();
        assert!(lifted.try_mul(&a).is_ok());
    }

    #[test]
    fn exact_division() {
        let p = &x().pow(2) - &y().pow(2);
        assert_eq!(p.exact_div(&(&x() - &y())).unwrap(), &x() + &y());
        assert!(matches!(x().exact_div(&y()), Err(AlgebraError::NotDivisible { .. })));
        assert!(matches!(x().exact_div(&Poly::zero(Ring::Xyz)), Err(AlgebraError::DivisionByZero)));
    }

    #[test]
    fn primitive_clears_content() {
        let p = &x().scale(&crate::algebra::rational::rat(2, 3)) - &y().scale(&crate::algebra::rational::rat(4, 3));
        assert_eq!(p.primitive().to_string(), "2*y - x");
    }
}
