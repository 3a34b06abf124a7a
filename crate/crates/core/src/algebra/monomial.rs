//! Packed exponent vectors and monomial orders.

use std::cmp::Ordering;
use std::fmt;

/// Maximum number of ring variables.
pub const MAX_VARS: usize = 9;
const FIELD_BITS: u32 = 8;
const FIELD_MASK: u128 = 0xff;
const DEGREE_SHIFT: u32 = FIELD_BITS * MAX_VARS as u32;

/// An exponent vector packed into a `u128`: eight bits per variable plus the
/// total degree in the high bits. Adding two packed values multiplies the
/// monomials; the degree field bounds every exponent, so a product is valid
/// as long as its degree stays below 256.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(u128);

fn shift(var: usize) -> u32 {
    FIELD_BITS * (MAX_VARS - 1 - var) as u32
}

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_exponents(exps: &[u32]) -> Monomial {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut packed = 0u128;
        let mut deg = 0u32;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e <= FIELD_MASK as u32, "exponent {e} out of range");
            packed |= (e as u128) << shift(i);
            deg += e;
        }
        assert!(deg <= 0xffff, "degree out of range");
        Monomial(packed | ((deg as u128) << DEGREE_SHIFT))
    }

    pub fn var(i: usize) -> Monomial {
        let mut e = [0u32; MAX_VARS];
        e[i] = 1;
        Monomial::from_exponents(&e)
    }

    #[inline]
    pub fn exponent(&self, var: usize) -> u32 {
        ((self.0 >> shift(var)) & FIELD_MASK) as u32
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        (self.0 >> DEGREE_SHIFT) as u32
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    pub fn is_one(&self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let deg = self.degree() + other.degree();
        assert!(deg <= FIELD_MASK as u32, "monomial degree {deg} exceeds packing range");
        Monomial(self.0 + other.0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        if self.degree() > other.degree() {
            return false;
        }
        (0..MAX_VARS).all(|i| self.exponent(i) <= other.exponent(i))
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if self.divides(other) {
            Some(Monomial(other.0 - self.0))
        } else {
            None
        }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let e: Vec<u32> = (0..MAX_VARS)
            .map(|i| self.exponent(i).max(other.exponent(i)))
            .collect();
        Monomial::from_exponents(&e)
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        (0..MAX_VARS).all(|i| self.exponent(i) == 0 || other.exponent(i) == 0)
    }

    /// Lowers the exponent of `var` by one; `None` if it is already zero.
    pub fn div_var(&self, var: usize) -> Option<Monomial> {
        if self.exponent(var) == 0 {
            None
        } else {
            Some(Monomial(self.0 - Monomial::var(var).0))
        }
    }

    /// Renames variables: exponent of `var` moves to `perm[var]`.
    pub fn permuted(&self, perm: &[usize]) -> Monomial {
        let mut e = [0u32; MAX_VARS];
        for (i, &p) in perm.iter().enumerate() {
            e[p] = self.exponent(i);
        }
        Monomial::from_exponents(&e)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exponents(MAX_VARS))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Lex,
    DegLex,
    DegRevLex,
}

/// A monomial order together with a variable ranking, listed from the
/// largest variable to the smallest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    priority: Vec<usize>,
}

impl MonomialOrder {
    /// Variables ranked by descending index, so `a < b < ... < k` and
    /// `x < y < z`.
    pub fn new(kind: OrderKind, nvars: usize) -> MonomialOrder {
        MonomialOrder { kind, priority: (0..nvars).rev().collect() }
    }

    pub fn grevlex(nvars: usize) -> MonomialOrder {
        MonomialOrder::new(OrderKind::DegRevLex, nvars)
    }

    /// `priority` lists variable indices from largest to smallest.
    pub fn with_priority(kind: OrderKind, priority: Vec<usize>) -> MonomialOrder {
        let mut seen = priority.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), priority.len(), "priority must be a permutation");
        MonomialOrder { kind, priority }
    }

    pub fn nvars(&self) -> usize {
        self.priority.len()
    }

    /// An integer key whose natural order is this monomial order.
    pub fn key(&self, m: &Monomial) -> u128 {
        let mut key: u128 = 0;
        match self.kind {
            OrderKind::Lex | OrderKind::DegLex => {
                for &v in &self.priority {
                    key = (key << FIELD_BITS) | m.exponent(v) as u128;
                }
            }
            OrderKind::DegRevLex => {
                for &v in self.priority.iter().rev() {
                    key = (key << FIELD_BITS) | (FIELD_MASK - m.exponent(v) as u128);
                }
            }
        }
        if self.kind != OrderKind::Lex {
            key |= (m.degree() as u128) << DEGREE_SHIFT;
        }
        key
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_round_trips() {
        let m = Monomial::from_exponents(&[1, 0, 3, 0, 0, 0, 0, 0, 2]);
        assert_eq!(m.exponents(9), vec![1, 0, 3, 0, 0, 0, 0, 0, 2]);
        assert_eq!(m.degree(), 6);
        let p = m.mul(&Monomial::var(1));
        assert_eq!(p.exponent(1), 1);
        assert_eq!(p.degree(), 7);
        assert_eq!(Monomial::var(1).quotient_of(&p), Some(m));
    }

    #[test]
    fn grevlex_ties_break_on_smallest_variable() {
        // x < y < z: among degree-2 monomials grevlex puts z^2 on top and x^2 last.
        let o = MonomialOrder::grevlex(3);
        let x2 = Monomial::from_exponents(&[2, 0, 0]);
        let xz = Monomial::from_exponents(&[1, 0, 1]);
        let y2 = Monomial::from_exponents(&[0, 2, 0]);
        let z2 = Monomial::from_exponents(&[0, 0, 2]);
        assert_eq!(o.cmp(&z2, &y2), Ordering::Greater);
        assert_eq!(o.cmp(&y2, &xz), Ordering::Greater);
        assert_eq!(o.cmp(&xz, &x2), Ordering::Greater);
    }

    #[test]
    fn lex_with_custom_priority() {
        let o = MonomialOrder::with_priority(OrderKind::Lex, vec![0, 1]);
        let x = Monomial::from_exponents(&[1, 0]);
        let y2 = Monomial::from_exponents(&[0, 2]);
        assert_eq!(o.cmp(&x, &y2), Ordering::Greater);
    }
}
