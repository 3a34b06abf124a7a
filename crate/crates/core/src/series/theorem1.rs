use num_traits::{One, Zero};

use super::{resonant_series_integral, ExponentVector, ResonantIntegralResult, SeriesError};
use crate::algebra::Rational;
use crate::darboux::{DarbouxFunction, RelationKind};
use crate::system::LVSystem;

/// Second first integral `ψ = X^{1−θ} (1 + O(x, y, z))` built from a first
/// integral with prefactor `X^δ` and an inverse Jacobi multiplier with
/// prefactor `X^θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Result {
    pub delta: [Rational; 3],
    pub theta: [Rational; 3],
    pub psi: ResonantIntegralResult<Rational>,
    /// Indices `I ≠ 0`, `|I| <= N`, where `(θ − I − 1) × δ = 0`. All have `A_I = 0`.
    pub exceptional: Vec<ExponentVector>,
    /// False when `(θ − 1) × δ = 0`, i.e. the prefactor of `ψ` is a power of that of `φ`.
    pub independent: bool,
    pub verified_order: u32,
}

fn cross(u: &[Rational; 3], v: &[Rational; 3]) -> [Rational; 3] {
    [
        &u[1] * &v[2] - &u[2] * &v[1],
        &u[2] * &v[0] - &u[0] * &v[2],
        &u[0] * &v[1] - &u[1] * &v[0],
    ]
}

/// Coefficient vector of `X^I` in `(ẋ/x, ẏ/y, ż/z)`.
fn a_vector(sys: &LVSystem, i: &ExponentVector) -> [Rational; 3] {
    match i.degree() {
        0 => sys.eigenvalues().map(|l| Rational::from_integer(l.into())),
        1 => {
            let n = i.0.iter().position(|&e| e == 1).unwrap();
            std::array::from_fn(|m| sys.matrix()[m][n].clone())
        }
        _ => std::array::from_fn(|_| Rational::zero()),
    }
}

pub fn theorem1_construct(
    sys: &LVSystem,
    phi: &DarbouxFunction,
    m: &DarbouxFunction,
    order: u32,
) -> Result<Theorem1Result, SeriesError> {
    if !phi.verify_relation(sys, &RelationKind::FirstIntegral)? {
        return Err(SeriesError::PreconditionViolated(format!("{phi} is not a first integral")));
    }
    theorem1_construct_with_prefactor(sys, &phi.monomial, m, order)
}

/// As `theorem1_construct` when the first integral is only known as a
/// series `X^δ (1 + ...)`.
pub fn theorem1_construct_with_prefactor(
    sys: &LVSystem,
    delta: &[Rational; 3],
    m: &DarbouxFunction,
    order: u32,
) -> Result<Theorem1Result, SeriesError> {
    if !m.verify_relation(sys, &RelationKind::InverseJacobiMultiplier)? {
        return Err(SeriesError::PreconditionViolated(format!("{m} is not an inverse Jacobi multiplier")));
    }
    let theta = m.monomial.clone();
    let mut exceptional = Vec::new();
    let mut independent = true;
    for i in ExponentVector::up_to(order) {
        let v: [Rational; 3] = std::array::from_fn(|j| &theta[j] - Rational::from_integer(i.0[j].into()) - Rational::one());
        if cross(&v, delta).iter().any(|c| !c.is_zero()) {
            continue;
        }
        if i == ExponentVector::ZERO {
            independent = false;
        } else if a_vector(sys, &i).iter().all(|c| c.is_zero()) {
            exceptional.push(i);
        } else {
            return Err(SeriesError::HypothesisFailed(i));
        }
    }
    let rho: [Rational; 3] = std::array::from_fn(|j| Rational::one() - &theta[j]);
    let psi = resonant_series_integral(sys, &rho, order)?;
    Ok(Theorem1Result { delta: delta.clone(), theta, psi, exceptional, independent, verified_order: order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;
    use crate::expr::Env;
    use crate::system::Resonance;

    #[test]
    fn linear_system_example() {
        let sys = LVSystem::zero(Resonance::new(1, -1, 1).unwrap());
        let phi = DarbouxFunction::parse("x*y", &Env::new()).unwrap();
        let m = DarbouxFunction::parse("x^2*y^2*z", &Env::new()).unwrap();
        let r = theorem1_construct(&sys, &phi, &m, 4).unwrap();
        assert_eq!(r.psi.prefactor, [int(-1), int(-1), int(0)]);
        assert!(r.psi.u.num_terms() == 1 && r.psi.is_obstruction_free());
        assert!(!r.independent);
        assert_eq!(r.exceptional, vec![ExponentVector::new(1, 1, 0), ExponentVector::new(2, 2, 0)]);
    }

    #[test]
    fn rejects_non_integral() {
        let sys = LVSystem::all_ones(Resonance::new(1, -1, 1).unwrap());
        let phi = DarbouxFunction::parse("x*y", &Env::new()).unwrap();
        let m = DarbouxFunction::parse("x^2*y^2*z", &Env::new()).unwrap();
        assert!(matches!(theorem1_construct(&sys, &phi, &m, 4), Err(SeriesError::PreconditionViolated(_))));
    }
}
