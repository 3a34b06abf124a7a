//! Exact arithmetic kernel: rationals, sparse polynomials, monomial orders,
//! Gröbner bases and small dense linear algebra.

pub mod groebner;
pub mod linalg;
pub mod monomial;
pub mod poly;
pub mod rational;

pub use groebner::{buchberger, normal_form, GroebnerBasis};
pub use monomial::{Monomial, MonomialOrder, OrderKind};
pub use poly::{Poly, Ring};
pub use rational::{int, parse_rational, rat, Rational};

#[derive(Debug, Clone, thiserror::Error)]
pub enum AlgebraError {
    #[error("ring mismatch: {0:?} vs {1:?}")]
    RingMismatch(Ring, Ring),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("not divisible (remainder {remainder})")]
    NotDivisible { remainder: Poly },
    #[error("cannot compute a Gröbner basis of an empty generator list")]
    EmptyIdeal,
    #[error("monomial order does not match the ring")]
    OrderMismatch,
    #[error("invalid rational literal {0:?} (use integers or p/q)")]
    BadRational(String),
}

pub fn poly_mul(p: &Poly, q: &Poly) -> Result<Poly, AlgebraError> {
    p.try_mul(q)
}

pub fn poly_exact_div(p: &Poly, q: &Poly) -> Result<Poly, AlgebraError> {
    p.exact_div(q)
}
