//! Buchberger's algorithm and normal-form reduction.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::monomial::{Monomial, MonomialOrder};
use super::poly::{Poly, Ring};
use super::rational::Rational;
use super::AlgebraError;

/// A reduced Gröbner basis: monic generators, pairwise top-irreducible,
/// sorted by ascending leading monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis {
    ring: Ring,
    order: MonomialOrder,
    generators: Vec<Poly>,
}

impl GroebnerBasis {
    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_unit(&self) -> bool {
        self.generators.len() == 1 && self.generators[0].is_constant() && !self.generators[0].is_zero()
    }

    pub fn contains(&self, p: &Poly) -> Result<bool, AlgebraError> {
        Ok(normal_form(p, self)?.is_zero())
    }
}

/// Working polynomial keyed by the order key, so the leading term is the
/// last entry.
struct Sorted<'o> {
    order: &'o MonomialOrder,
    terms: BTreeMap<u128, (Monomial, Rational)>,
}

impl<'o> Sorted<'o> {
    fn new(p: &Poly, order: &'o MonomialOrder) -> Self {
        let terms = p.terms().map(|(m, c)| (order.key(m), (*m, c.clone()))).collect();
        Sorted { order, terms }
    }

    fn leading(&self) -> Option<(Monomial, Rational)> {
        self.terms.values().next_back().cloned()
    }

    fn pop_leading(&mut self) -> Option<(Monomial, Rational)> {
        self.terms.pop_last().map(|(_, v)| v)
    }

    /// self -= c * m * g
    fn sub_multiple(&mut self, g: &Poly, m: &Monomial, c: &Rational) {
        for (gm, gc) in g.terms() {
            let t = gm.mul(m);
            let key = self.order.key(&t);
            let delta = gc * c;
            let entry = self.terms.entry(key).or_insert_with(|| (t, Rational::zero()));
            entry.1 -= delta;
            if entry.1.is_zero() {
                self.terms.remove(&key);
            }
        }
    }
}

fn reduce_fully(p: &Poly, basis: &[(Monomial, Rational, Poly)], order: &MonomialOrder) -> Poly {
    let mut work = Sorted::new(p, order);
    let mut rem = Poly::zero(p.ring());
    while let Some((m, c)) = work.leading() {
        let divisor = basis.iter().find(|(lm, _, _)| lm.divides(&m));
        match divisor {
            Some((lm, lc, g)) => {
                let q = lm.quotient_of(&m).unwrap();
                work.sub_multiple(g, &q, &(&c / lc));
            }
            None => {
                work.pop_leading();
                rem.add_term(m, c);
            }
        }
    }
    rem
}

fn with_leading(polys: &[Poly], order: &MonomialOrder) -> Vec<(Monomial, Rational, Poly)> {
    polys
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| {
            let (m, c) = p.leading_term(order).unwrap();
            (m, c, p.clone())
        })
        .collect()
}

/// The unique remainder of `p` modulo the Gröbner basis.
pub fn normal_form(p: &Poly, gb: &GroebnerBasis) -> Result<Poly, AlgebraError> {
    if p.ring() != gb.ring {
        return Err(AlgebraError::RingMismatch(p.ring(), gb.ring));
    }
    Ok(reduce_fully(p, &with_leading(&gb.generators, &gb.order), &gb.order))
}

fn s_polynomial(f: &(Monomial, Rational, Poly), g: &(Monomial, Rational, Poly)) -> Poly {
    let l = f.0.lcm(&g.0);
    let mf = f.0.quotient_of(&l).unwrap();
    let mg = g.0.quotient_of(&l).unwrap();
    &f.2.mul_monomial(&mf, &f.1.recip()) - &g.2.mul_monomial(&mg, &g.1.recip())
}

/// Buchberger's algorithm with the product and chain criteria, followed by
/// interreduction to the reduced basis.
pub fn buchberger(gens: &[Poly], order: &MonomialOrder) -> Result<GroebnerBasis, AlgebraError> {
    let ring = match gens.first() {
        Some(p) => p.ring(),
        None => return Err(AlgebraError::EmptyIdeal),
    };
    if let Some(bad) = gens.iter().find(|p| p.ring() != ring) {
        return Err(AlgebraError::RingMismatch(ring, bad.ring()));
    }
    if order.nvars() != ring.nvars() {
        return Err(AlgebraError::OrderMismatch);
    }

    let mut basis: Vec<(Monomial, Rational, Poly)> = Vec::new();
    for g in gens {
        let r = reduce_fully(g, &basis, order);
        if !r.is_zero() {
            basis.extend(with_leading(&[r.monic(order)], order));
        }
    }

    // Pairs are keyed by (order key of lcm, i, j) so the normal selection
    // strategy is a simple pop_first.
    let mut pending: BTreeSet<(u128, usize, usize)> = BTreeSet::new();
    let pair_key = |b: &[(Monomial, Rational, Poly)], i: usize, j: usize| order.key(&b[i].0.lcm(&b[j].0));
    for j in 0..basis.len() {
        for i in 0..j {
            pending.insert((pair_key(&basis, i, j), i, j));
        }
    }
    let in_pending = |pending: &BTreeSet<(u128, usize, usize)>, b: &[(Monomial, Rational, Poly)], i: usize, j: usize| {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        pending.contains(&(pair_key(b, i, j), i, j))
    };

    while let Some((_, i, j)) = pending.pop_first() {
        let (li, lj) = (basis[i].0, basis[j].0);
        if li.is_coprime(&lj) {
            continue;
        }
        let l = li.lcm(&lj);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].0.divides(&l)
                && !in_pending(&pending, &basis, i, k)
                && !in_pending(&pending, &basis, j, k)
        });
        if chain {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j]);
        let r = reduce_fully(&s, &basis, order);
        if r.is_zero() {
            continue;
        }
        let r = r.monic(order);
        if r.is_constant() {
            return Ok(GroebnerBasis { ring, order: order.clone(), generators: vec![Poly::one(ring)] });
        }
        let n = basis.len();
        basis.extend(with_leading(&[r], order));
        for k in 0..n {
            pending.insert((pair_key(&basis, k, n), k, n));
        }
    }

    Ok(GroebnerBasis { ring, order: order.clone(), generators: interreduce(basis, order) })
}

fn interreduce(basis: Vec<(Monomial, Rational, Poly)>, order: &MonomialOrder) -> Vec<Poly> {
    if basis.iter().any(|(m, _, _)| m.is_one()) {
        return vec![Poly::one(basis[0].2.ring())];
    }
    // Minimal basis: drop generators whose leading monomial is divisible by
    // another one (ties broken by position).
    let mut minimal: Vec<(Monomial, Rational, Poly)> = Vec::new();
    for (idx, g) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(o, h)| {
            o != idx && h.0.divides(&g.0) && (h.0 != g.0 || o < idx)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for idx in 0..minimal.len() {
        let others: Vec<_> = minimal
            .iter()
            .enumerate()
            .filter(|(o, _)| *o != idx)
            .map(|(_, g)| g.clone())
            .collect();
        let r = reduce_fully(&minimal[idx].2, &others, order);
        out.push(r.monic(order));
    }
    out.sort_by_key(|p| order.key(&p.leading_term(order).unwrap().0));
    debug_assert!(out.iter().all(|p| p.leading_term(order).map(|(_, c)| c.is_one()).unwrap_or(false)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::monomial::OrderKind;

    fn params(i: usize) -> Poly {
        Poly::var(Ring::Params, i)
    }

    #[test]
    fn monomial_generators_are_a_basis() {
        let gens = vec![params(1), params(3), params(5), params(7)];
        let gb = buchberger(&gens, &Ring::Params.default_order()).unwrap();
        let mut got: Vec<String> = gb.generators().iter().map(|p| p.to_string()).collect();
        got.sort();
        assert_eq!(got, vec!["b", "d", "f", "h"]);
    }

    #[test]
    fn lex_example_by_hand() {
        // {x - y^2, y - x} under lex with x > y gives {x - y, y^2 - y}.
        let r = Ring::Generic(2);
        let x = Poly::var(r, 0);
        let y = Poly::var(r, 1);
        let order = MonomialOrder::with_priority(OrderKind::Lex, vec![0, 1]);
        let gb = buchberger(&[&x - &y.pow(2), &y - &x], &order).unwrap();
        let mut got: Vec<Poly> = gb.generators().to_vec();
        got.sort_by_key(|p| p.to_string());
        let mut want = vec![&x - &y, &y.pow(2) - &y];
        want.sort_by_key(|p| p.to_string());
        assert_eq!(got, want);
    }

    #[test]
    fn unit_ideal() {
        let gb = buchberger(&[Poly::one(Ring::Params)], &Ring::Params.default_order()).unwrap();
        assert!(gb.is_unit());
        let p = &params(0) * &params(4);
        assert!(normal_form(&p, &gb).unwrap().is_zero());
    }

    #[test]
    fn membership_by_construction() {
        let gb = buchberger(&[params(1), params(3)], &Ring::Params.default_order()).unwrap();
        let p = &(&params(0) * &params(1)) + &params(3);
        assert!(gb.contains(&p).unwrap());
        assert!(!gb.contains(&params(0)).unwrap());
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(buchberger(&[], &Ring::Params.default_order()), Err(AlgebraError::EmptyIdeal)));
    }
}
