//! Shared oracles and randomized suites for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use lvdarboux::algebra::linalg;
use lvdarboux::algebra::{buchberger, normal_form, rat, Monomial, MonomialOrder, Poly, Rational, Ring};
use lvdarboux::series::{solve_homological, ExponentVector, RatSeries, TruncatedSeries};
use lvdarboux::{LVSystem, Resonance};
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn monomial(max_exp: u32) -> impl Strategy<Value = Monomial> {
    prop::array::uniform3(0..=max_exp).prop_map(|e| Monomial::from_exponents(&e))
}

pub fn poly(max_exp: u32, max_terms: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((monomial(max_exp), small_rational()), 0..=max_terms)
        .prop_map(|t| Poly::from_terms(Ring::Xyz, t))
}

fn nonzero_poly(max_exp: u32, max_terms: usize) -> impl Strategy<Value = Poly> {
    poly(max_exp, max_terms).prop_filter("nonzero", |p| !p.is_zero())
}

fn ideal() -> impl Strategy<Value = Vec<Poly>> {
    // Low degree keeps Buchberger cheap at 1000 trials.
    prop::collection::vec(nonzero_poly(1, 3), 1..=3)
}

fn point3() -> impl Strategy<Value = [Rational; 3]> {
    prop::array::uniform3(small_rational())
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg.into()))
    }
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

pub fn ring_axioms(cases: u32) -> Result<(), String> {
    run(cases, (poly(3, 5), poly(3, 5), poly(3, 5), point3()), |(p, q, r, pt)| {
        let zero = Poly::zero(Ring::Xyz);
        let one = Poly::one(Ring::Xyz);
        check(&(&p + &q) + &r == &p + &(&q + &r), "addition is not associative")?;
        check(&p + &q == &q + &p, "addition is not commutative")?;
        check(&p + &zero == p && &p * &one == p, "identities")?;
        let p2 = p.clone();
        check((&p + &(-&p)).is_zero() && (&p - &p2).is_zero(), "additive inverse")?;
        check(&(&p * &q) * &r == &p * &(&q * &r), "multiplication is not associative")?;
        check(&p * &q == &q * &p, "multiplication is not commutative")?;
        check(&p * &(&q + &r) == &(&p * &q) + &(&p * &r), "distributivity")?;
        check((&p * &q).eval(&pt) == p.eval(&pt) * q.eval(&pt), "evaluation is not multiplicative")?;
        check((&p + &q).eval(&pt) == p.eval(&pt) + q.eval(&pt), "evaluation is not additive")?;
        Ok(())
    })
}

/// S-polynomial computed from the public term API, independent of the
/// Buchberger implementation.
pub fn s_poly(f: &Poly, g: &Poly, order: &MonomialOrder) -> Poly {
    let (mf, cf) = f.leading_term(order).unwrap();
    let (mg, cg) = g.leading_term(order).unwrap();
    let l = mf.lcm(&mg);
    let a = f.mul_monomial(&mf.quotient_of(&l).unwrap(), &cf.recip());
    let b = g.mul_monomial(&mg.quotient_of(&l).unwrap(), &cg.recip());
    &a - &b
}

pub fn groebner_s_pairs(cases: u32) -> Result<(), String> {
    let order = MonomialOrder::grevlex(3);
    run(cases, ideal(), |gens| {
        let gb = buchberger(&gens, &order).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let g = gb.generators();
        for p in &gens {
            check(normal_form(p, &gb).unwrap().is_zero(), format!("generator {p} not reduced to 0"))?;
        }
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                let s = s_poly(&g[i], &g[j], &order);
                check(normal_form(&s, &gb).unwrap().is_zero(), format!("S({}, {}) does not reduce to 0", g[i], g[j]))?;
            }
        }
        Ok(())
    })
}

pub fn normal_form_idempotence(cases: u32) -> Result<(), String> {
    let order = MonomialOrder::grevlex(3);
    run(cases, (ideal(), poly(3, 5), poly(2, 3)), |(gens, p, h)| {
        let gb = buchberger(&gens, &order).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let r = normal_form(&p, &gb).unwrap();
        check(normal_form(&r, &gb).unwrap() == r, "normal form is not idempotent")?;
        check(normal_form(&(&p - &r), &gb).unwrap().is_zero(), "p - NF(p) not in the ideal")?;
        let shifted = &p + &(&h * &gens[0]);
        check(normal_form(&shifted, &gb).unwrap() == r, "normal form depends on the coset representative")?;
        let leads: Vec<Monomial> = gb.generators().iter().map(|g| g.leading_term(&order).unwrap().0).collect();
        for (m, _) in r.terms() {
            check(!leads.iter().any(|l| l.divides(m)), "normal form has a reducible term")?;
        }
        Ok(())
    })
}

fn rhs_series() -> impl Strategy<Value = RatSeries> {
    prop::collection::vec((prop::array::uniform3(0u32..=3), small_rational()), 0..8).prop_map(|t| {
        let t = t.into_iter().map(|(e, c)| (ExponentVector(e), c)).filter(|(i, _)| i.degree() >= 1 && i.degree() <= 5);
        TruncatedSeries::from_terms(5, &Rational::zero(), t)
    })
}

pub fn homological_residuals(cases: u32) -> Result<(), String> {
    let weights = (prop::array::uniform3(-3i64..=3), -3i64..=3);
    run(cases, (weights, rhs_series()), |((w, w0), rhs)| {
        let w = w.map(|v| Rational::from_integer(v.into()));
        let w0 = Rational::from_integer(w0.into());
        let (a, residual) = solve_homological(&w, &w0, &rhs).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let mut lhs = a.scale(&-&w0);
        for m in 0..3 {
            lhs = lhs.try_add(&a.euler(m).scale(&w[m])).unwrap();
        }
        for (i, c) in &residual {
            check(i.dot(&w) == w0, format!("residual index {i} is not resonant"))?;
            check(a.coeff(i).is_zero(), "resonant coefficient was set")?;
            lhs.add_term(*i, c);
        }
        check(lhs == rhs, "(w·I - w0) a_I + residual != b")
    })
}

pub fn random_matrix(rng: &mut ChaCha8Rng) -> [[Rational; 3]; 3] {
    std::array::from_fn(|_| std::array::from_fn(|_| rat(rng.gen_range(-5..=5), rng.gen_range(1..=3))))
}

pub fn random_system(resonance: Resonance, seed: u64) -> LVSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    LVSystem::new(resonance, random_matrix(&mut rng))
}

/// Dense oracle for `X(X^ρ u) = κ X^ρ u`: every coefficient of `u` through
/// `order` is an unknown of one linear system built from polynomial
/// arithmetic on the vector field; resonant unknowns are fixed to zero and
/// the obstruction is the leftover coefficient of the residual.
pub fn dense_oracle(sys: &LVSystem, rho: &[Rational; 3], order: u32) -> (RatSeries, BTreeMap<ExponentVector, Rational>) {
    let lambda = sys.eigenvalues().map(|l| Rational::from_integer(l.into()));
    let kappa: Rational = (0..3).map(|m| &rho[m] * &lambda[m]).sum();
    let cof: Vec<Poly> = (0..3).map(|m| sys.coordinate_cofactor(m)).collect();
    let op = |f: &Poly| {
        let mut r = f.scale(&-&kappa);
        for m in 0..3 {
            let t = &f.scale(&rho[m]) + &(&Poly::var(Ring::Xyz, m) * &f.derivative(m));
            r = &r + &(&cof[m] * &t);
        }
        r
    };
    let unknowns: Vec<ExponentVector> = ExponentVector::up_to(order).into_iter().filter(|i| i.degree() > 0).collect();
    let columns: Vec<Poly> = unknowns.iter().map(|j| op(&Poly::term(Ring::Xyz, j.monomial(), Rational::one()))).collect();
    let constant = op(&Poly::one(Ring::Xyz));
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (r, i) in unknowns.iter().enumerate() {
        if i.dot(&lambda).is_zero() {
            rows.push((0..unknowns.len()).map(|c| if c == r { Rational::one() } else { Rational::zero() }).collect());
            rhs.push(Rational::zero());
        } else {
            rows.push(columns.iter().map(|col| col.coeff(&i.monomial())).collect());
            rhs.push(-constant.coeff(&i.monomial()));
        }
    }
    let sol = linalg::solve(&rows, &rhs).expect("triangular system is solvable");
    let mut u = TruncatedSeries::one(order, &Rational::zero());
    let mut full = Poly::one(Ring::Xyz);
    for (i, c) in unknowns.iter().zip(sol) {
        full = &full + &Poly::term(Ring::Xyz, i.monomial(), c.clone());
        u.set(*i, c);
    }
    let res = op(&full);
    let obstructions =
        unknowns.iter().filter(|i| i.dot(&lambda).is_zero()).map(|i| (*i, res.coeff(&i.monomial()))).collect();
    (u, obstructions)
}
