use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{Coeff, ExponentVector, RatSeries, SeriesError, TruncatedSeries};
use crate::algebra::{Poly, Rational, Ring};
use crate::system::{LVSystem, Resonance};

/// A field of the form `ẋ_m = x_m (λ_m + p_m(x, y, z))` with `p_m(0) = 0`.
/// Lotka–Volterra systems are the case where every `p_m` is linear.
#[derive(Clone, Debug)]
pub struct DiagonalField<C: Coeff> {
    pub lambda: [Rational; 3],
    p: [Vec<(ExponentVector, C)>; 3],
    proto: C,
}

impl<C: Coeff> DiagonalField<C> {
    pub fn new(lambda: [Rational; 3], p: [TruncatedSeries<C>; 3]) -> Result<Self, SeriesError> {
        let proto = p[0].zero_coeff().clone();
        let mut terms: [Vec<(ExponentVector, C)>; 3] = Default::default();
        for m in 0..3 {
            if !p[m].constant_term().is_zero() {
                return Err(SeriesError::PreconditionViolated(format!("p_{m} must vanish at the origin")));
            }
            terms[m] = p[m].terms().map(|(i, c)| (*i, c.clone())).collect();
        }
        Ok(DiagonalField { lambda, p: terms, proto })
    }

    fn from_matrix(lambda: [Rational; 3], matrix: [[C; 3]; 3]) -> Self {
        let proto = matrix[0][0].zero_like();
        let p = std::array::from_fn(|m| {
            (0..3)
                .filter(|&n| !matrix[m][n].is_zero())
                .map(|n| (ExponentVector::unit(n), matrix[m][n].clone()))
                .collect()
        });
        DiagonalField { lambda, p, proto }
    }

    pub fn proto(&self) -> &C {
        &self.proto
    }

    /// `p_m` as a series of the given order.
    pub fn p_series(&self, m: usize, order: u32) -> TruncatedSeries<C> {
        TruncatedSeries::from_terms(order, &self.proto, self.p[m].iter().cloned())
    }

    /// `(X(X^ρ u) − κ X^ρ u) / X^ρ`, computed with series arithmetic.
    pub fn residual(&self, rho: &[Rational; 3], kappa: &Rational, u: &TruncatedSeries<C>) -> TruncatedSeries<C> {
        let n = u.order();
        let mut r = u.scale(&-kappa);
        for m in 0..3 {
            let mut lam = self.p_series(m, n);
            lam.set(ExponentVector::ZERO, self.proto.constant_like(&self.lambda[m]));
            let t = u.scale(&rho[m]).try_add(&u.euler(m)).expect("same order");
            r = r.try_add(&lam.try_mul(&t).expect("same order")).expect("same order");
        }
        r
    }
}

impl DiagonalField<Rational> {
    pub fn from_system(sys: &LVSystem) -> Self {
        let lambda = sys.eigenvalues().map(|l| Rational::from_integer(l.into()));
        DiagonalField::from_matrix(lambda, sys.matrix().clone())
    }
}

impl DiagonalField<Poly> {
    /// The generic system of a resonance, coefficients being the parameters
    /// `a, ..., k` of the ring `Params`.
    pub fn symbolic(resonance: Resonance) -> Self {
        let lambda = resonance.eigenvalues().map(|l| Rational::from_integer(l.into()));
        let matrix = std::array::from_fn(|m| std::array::from_fn(|n| Poly::var(Ring::Params, 3 * m + n)));
        DiagonalField::from_matrix(lambda, matrix)
    }
}

/// `X^ρ u` with `X(X^ρ u) = κ X^ρ u` through the order, resonant
/// coefficients gauged to zero and their forced values kept as obstructions.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonantIntegralResult<C: Coeff> {
    pub prefactor: [Rational; 3],
    pub kappa: Rational,
    pub u: TruncatedSeries<C>,
    pub obstructions: Vec<(ExponentVector, C)>,
}

impl<C: Coeff> ResonantIntegralResult<C> {
    pub fn is_obstruction_free(&self) -> bool {
        self.obstructions.iter().all(|(_, c)| c.is_zero())
    }

    pub fn first_nonzero_obstruction(&self) -> Option<&(ExponentVector, C)> {
        self.obstructions.iter().find(|(_, c)| !c.is_zero())
    }
}

/// Solves `c_I (I·λ) = −Σ_m Σ_K c_{I−K} (ρ + I − K)_m p_{m,K}` degree by degree.
pub fn eigen_series<C: Coeff>(field: &DiagonalField<C>, rho: &[Rational; 3], order: u32) -> ResonantIntegralResult<C> {
    let kappa: Rational = (0..3).map(|m| &rho[m] * &field.lambda[m]).sum();
    let one = field.proto.constant_like(&Rational::one());
    let mut u = TruncatedSeries::one(order, &field.proto);
    let mut obstructions = Vec::new();
    for d in 1..=order {
        let solved: Vec<(ExponentVector, C, bool)> = ExponentVector::of_degree(d)
            .into_par_iter()
            .map(|i| {
                let mut s = field.proto.clone();
                for m in 0..3 {
                    for (k, pk) in &field.p[m] {
                        let Some(j) = i.checked_sub(k) else { continue };
                        let Some(cj) = u.get(&j) else { continue };
                        let w = &rho[m] + Rational::from_integer(j.0[m].into());
                        if Zero::is_zero(&w) {
                            continue;
                        }
                        s = s.add(&cj.mul(pk).scale(&w));
                    }
                }
                let w = i.dot(&field.lambda);
                if Zero::is_zero(&w) {
                    (i, s, true)
                } else {
                    (i, s.scale(&-w.recip()), false)
                }
            })
            .collect();
        for (i, c, resonant) in solved {
            if resonant {
                obstructions.push((i, c));
            } else {
                u.set(i, c);
            }
        }
    }
    debug_assert!(u.constant_term() == one);
    ResonantIntegralResult { prefactor: rho.clone(), kappa, u, obstructions }
}

/// Series first integral `X^ρ (1 + O(x, y, z))`; requires `ρ·(λ, μ, ν) = 0`.
pub fn resonant_series_integral(
    sys: &LVSystem,
    rho: &[Rational; 3],
    order: u32,
) -> Result<ResonantIntegralResult<Rational>, SeriesError> {
    let field = DiagonalField::from_system(sys);
    let kappa: Rational = (0..3).map(|m| &rho[m] * &field.lambda[m]).sum();
    if !Zero::is_zero(&kappa) {
        return Err(SeriesError::PreconditionViolated(format!(
            "rho·eigenvalues = {kappa}, must be 0 for a first integral"
        )));
    }
    Ok(eigen_series(&field, rho, order))
}

/// Solves `(w·I − w₀) a_I = b_I`; indices with `w·I = w₀` are returned with
/// their right-hand side untouched.
pub fn solve_homological<C: Coeff>(
    w: &[Rational; 3],
    w0: &Rational,
    rhs: &TruncatedSeries<C>,
) -> Result<(TruncatedSeries<C>, Vec<(ExponentVector, C)>), SeriesError> {
    if !rhs.constant_term().is_zero() {
        return Err(SeriesError::PreconditionViolated("right-hand side must vanish at the origin".into()));
    }
    let mut a = TruncatedSeries::zero(rhs.order(), rhs.zero_coeff());
    let mut residual = Vec::new();
    for (i, b) in rhs.terms() {
        let den = i.dot(w) - w0;
        if Zero::is_zero(&den) {
            residual.push((*i, b.clone()));
        } else {
            a.set(*i, b.scale(&den.recip()));
        }
    }
    Ok((a, residual))
}

/// `(X, Y, Z) = (x u₁, y u₂, z u₃)` with `Ẋ_m = λ_m X_m` through the order.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearizationResult<C: Coeff> {
    pub u: [TruncatedSeries<C>; 3],
    /// `(coordinate, I, forced value)` for every resonant coefficient equation.
    pub obstructions: Vec<(usize, ExponentVector, C)>,
}

impl<C: Coeff> LinearizationResult<C> {
    pub fn is_obstruction_free(&self) -> bool {
        self.obstructions.iter().all(|(_, _, c)| c.is_zero())
    }
}

pub fn linearize_field<C: Coeff>(field: &DiagonalField<C>, order: u32) -> LinearizationResult<C> {
    let mut obstructions = Vec::new();
    let u = std::array::from_fn(|m| {
        let rho = ExponentVector::unit(m).as_rationals();
        let r = eigen_series(field, &rho, order);
        obstructions.extend(r.obstructions.into_iter().map(|(i, c)| (m, i, c)));
        r.u
    });
    LinearizationResult { u, obstructions }
}

pub fn linearize_system(sys: &LVSystem, order: u32) -> LinearizationResult<Rational> {
    linearize_field(&DiagonalField::from_system(sys), order)
}

/// Linearizes the node `ẋ = x(λ₁ + p(x, z))`, `ż = z(λ₂ + q(x, z))` with
/// positive eigenvalues: returns `u, v` with `X = x u`, `Z = z v`.
pub fn node_linearize_2d(
    eigs: (Rational, Rational),
    p: &RatSeries,
    q: &RatSeries,
    order: u32,
) -> Result<(RatSeries, RatSeries), SeriesError> {
    if eigs.0 <= Rational::zero() || eigs.1 <= Rational::zero() {
        return Err(SeriesError::PreconditionViolated("node eigenvalues must be positive".into()));
    }
    if p.terms().chain(q.terms()).any(|(i, _)| i.0[1] != 0) {
        return Err(SeriesError::PreconditionViolated("node series may only involve x and z".into()));
    }
    let zero = TruncatedSeries::zero(order, &Rational::zero());
    let field = DiagonalField::new([eigs.0, Rational::one(), eigs.1], [p.truncate(order), zero, q.truncate(order)])?;
    let mut out = Vec::new();
    for m in [0, 2] {
        let r = eigen_series(&field, &ExponentVector::unit(m).as_rationals(), order);
        if let Some((i, _)) = r.first_nonzero_obstruction() {
            return Err(SeriesError::ResonantObstruction(*i));
        }
        out.push(r.u);
    }
    let v = out.pop().unwrap();
    Ok((out.pop().unwrap(), v))
}
