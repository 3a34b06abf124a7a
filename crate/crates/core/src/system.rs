//! The three-dimensional Lotka–Volterra model
//!
//! ```text
//! x' = x(λ + a x + b y + c z)
//! y' = y(μ + d x + e y + f z)
//! z' = z(ν + g x + h y + k z)
//! ```
//!
//! with integer eigenvalues `λ, ν > 0 > μ`, `gcd(λ, μ, ν) = 1`.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::algebra::linalg;
use crate::algebra::{int, AlgebraError, Poly, Rational, Ring};

#[derive(Debug, Clone, thiserror::Error)]
pub enum LvError {
    #[error("invalid resonance {0:?}: need λ > 0, μ < 0, ν > 0 and gcd 1")]
    InvalidResonance([i64; 3]),
    #[error("polynomial must be over (x, y, z), got {0:?}")]
    WrongRing(Ring),
    #[error("the zero polynomial has no cofactor")]
    ZeroPolynomial,
    #[error("factor {index} ({factor}) is not invariant; remainder {remainder}")]
    NotInvariant { index: usize, factor: Poly, remainder: Poly },
    #[error("X(f/g) is not a polynomial for the exponential factor")]
    ExpPartNotPolynomial,
    #[error("cofactor {0} has degree > 1")]
    CofactorDegree(Poly),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Expr(#[from] crate::expr::ExprError),
}

/// An eigenvalue triple `(λ:μ:ν)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Resonance(pub [i64; 3]);

impl Resonance {
    pub fn new(l: i64, m: i64, n: i64) -> Result<Resonance, LvError> {
        let r = [l, m, n];
        let g = l.gcd(&m).gcd(&n);
        if l <= 0 || m >= 0 || n <= 0 || g != 1 {
            return Err(LvError::InvalidResonance(r));
        }
        Ok(Resonance(r))
    }

    pub fn eigenvalues(&self) -> [i64; 3] {
        self.0
    }

    /// Prefactor exponents of the two target integrals `x^{-μ} y^{λ}` and
    /// `y^{ν} z^{-μ}`.
    pub fn integral_prefactors(&self) -> [[i64; 3]; 2] {
        let [l, m, n] = self.0;
        [[-m, l, 0], [0, n, -m]]
    }

    /// Default truncation order for the resonances treated in the catalog.
    pub fn default_order(&self) -> u32 {
        match self.0 {
            [1, -1, 1] => 6,
            [2, -1, 1] | [1, -1, 2] => 10,
            [1, -2, 1] => 12,
            _ => 8,
        }
    }

    pub fn dual(&self) -> Resonance {
        let [l, m, n] = self.0;
        Resonance([n, m, l])
    }
}

impl fmt::Display for Resonance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.0[0], self.0[1], self.0[2])
    }
}

impl std::str::FromStr for Resonance {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<i64> = s
            .split(':')
            .map(|p| p.trim().parse::<i64>().map_err(|_| format!("bad resonance {s:?}")))
            .collect::<Result<_, _>>()?;
        if parts.len() != 3 {
            return Err(format!("resonance must be L:M:N, got {s:?}"));
        }
        Resonance::new(parts[0], parts[1], parts[2]).map_err(|e| e.to_string())
    }
}

/// A degree-≤1 polynomial in `x, y, z`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cofactor(Poly);

impl Cofactor {
    pub fn new(p: Poly) -> Result<Cofactor, LvError> {
        if p.ring() != Ring::Xyz {
            return Err(LvError::WrongRing(p.ring()));
        }
        if p.total_degree() > 1 {
            return Err(LvError::CofactorDegree(p));
        }
        Ok(Cofactor(p))
    }

    pub fn poly(&self) -> &Poly {
        &self.0
    }

    pub fn into_poly(self) -> Poly {
        self.0
    }
}

/// Coefficients in basis `(1, x, y, z)` of a degree-≤1 polynomial.
pub fn linear_coefficients(p: &Poly) -> [Rational; 4] {
    let one = p.constant_term();
    let lin = |i| p.coeff(&crate::algebra::Monomial::var(i));
    [one, lin(0), lin(1), lin(2)]
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LVSystem {
    resonance: Resonance,
    /// Rows `(a,b,c), (d,e,f), (g,h,k)`.
    matrix: [[Rational; 3]; 3],
}

impl LVSystem {
    pub fn new(resonance: Resonance, matrix: [[Rational; 3]; 3]) -> LVSystem {
        LVSystem { resonance, matrix }
    }

    pub fn from_eigenvalues(eigenvalues: [i64; 3], matrix: [[Rational; 3]; 3]) -> Result<LVSystem, LvError> {
        let [l, m, n] = eigenvalues;
        Ok(LVSystem::new(Resonance::new(l, m, n)?, matrix))
    }

    /// Builds the system from the parameter vector `(a, b, c, d, e, f, g, h, k)`.
    pub fn from_point(resonance: Resonance, p: &[Rational; 9]) -> LVSystem {
        let m = [
            [p[0].clone(), p[1].clone(), p[2].clone()],
            [p[3].clone(), p[4].clone(), p[5].clone()],
            [p[6].clone(), p[7].clone(), p[8].clone()],
        ];
        LVSystem::new(resonance, m)
    }

    pub fn zero(resonance: Resonance) -> LVSystem {
        LVSystem::from_point(resonance, &std::array::from_fn(|_| Rational::zero()))
    }

    pub fn all_ones(resonance: Resonance) -> LVSystem {
        LVSystem::from_point(resonance, &std::array::from_fn(|_| Rational::one()))
    }

    pub fn resonance(&self) -> Resonance {
        self.resonance
    }

    pub fn eigenvalues(&self) -> [i64; 3] {
        self.resonance.0
    }

    pub fn matrix(&self) -> &[[Rational; 3]; 3] {
        &self.matrix
    }

    pub fn point(&self) -> [Rational; 9] {
        std::array::from_fn(|i| self.matrix[i / 3][i % 3].clone())
    }

    /// Cofactor `Λ_i` of the coordinate plane `x_i = 0`.
    pub fn coordinate_cofactor(&self, i: usize) -> Poly {
        let mut p = Poly::constant(Ring::Xyz, int(self.resonance.0[i]));
        for j in 0..3 {
            p = &p + &Poly::var(Ring::Xyz, j).scale(&self.matrix[i][j]);
        }
        p
    }

    /// Components `(P, Q, R)` of the vector field.
    pub fn vector_field(&self) -> [Poly; 3] {
        std::array::from_fn(|i| &Poly::var(Ring::Xyz, i) * &self.coordinate_cofactor(i))
    }

    /// `X F = P F_x + Q F_y + R F_z`.
    pub fn apply_vector_field(&self, f: &Poly) -> Result<Poly, LvError> {
        if f.ring() != Ring::Xyz {
            return Err(LvError::WrongRing(f.ring()));
        }
        let field = self.vector_field();
        let mut out = Poly::zero(Ring::Xyz);
        for (i, comp) in field.iter().enumerate() {
            let d = f.derivative(i);
            if !d.is_zero() {
                out = &out + &(comp * &d);
            }
        }
        Ok(out)
    }

    pub fn divergence(&self) -> Poly {
        let field = self.vector_field();
        (0..3).fold(Poly::zero(Ring::Xyz), |acc, i| &acc + &field[i].derivative(i))
    }

    /// The cofactor `C` with `X F = C F`, or `NotInvariant` with the division
    /// remainder as witness.
    pub fn cofactor_of(&self, f: &Poly) -> Result<Cofactor, LvError> {
        if f.is_zero() {
            return Err(LvError::ZeroPolynomial);
        }
        let xf = self.apply_vector_field(f)?;
        match xf.exact_div(f) {
            Ok(c) => Cofactor::new(c),
            Err(AlgebraError::NotDivisible { remainder }) => {
                Err(LvError::NotInvariant { index: 0, factor: f.clone(), remainder })
            }
            Err(e) => Err(e.into()),
        }
    }

    /// The system conjugated by `(x, y, z) -> (z, y, x)`.
    pub fn dual_transform(&self) -> LVSystem {
        let m = &self.matrix;
        let rev = |r: usize| [m[r][2].clone(), m[r][1].clone(), m[r][0].clone()];
        LVSystem::new(self.resonance.dual(), [rev(2), rev(1), rev(0)])
    }

    /// Whether `Λ_x, Λ_y, Λ_z` and the divergence are linearly independent.
    pub fn independence_check(&self) -> bool {
        let mut rows: Vec<Vec<Rational>> = (0..3).map(|i| linear_coefficients(&self.coordinate_cofactor(i)).to_vec()).collect();
        rows.push(linear_coefficients(&self.divergence()).to_vec());
        linalg::rank(&rows) == 4
    }
}

impl fmt::Display for LVSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["x", "y", "z"];
        for i in 0..3 {
            writeln!(f, "{}' = {}*({})", names[i], names[i], self.coordinate_cofactor(i))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn res(l: i64, m: i64, n: i64) -> Resonance {
        Resonance::new(l, m, n).unwrap()
    }

    fn x() -> Poly {
        Poly::var(Ring::Xyz, 0)
    }

    #[test]
    fn resonance_validation() {
        assert!(Resonance::new(1, 1, 1).is_err());
        assert!(Resonance::new(2, -2, 2).is_err());
        assert!(Resonance::new(-1, -1, 1).is_err());
        assert_eq!("2:-1:1".parse::<Resonance>().unwrap(), res(2, -1, 1));
    }

    #[test]
    fn vector_field_on_coordinates() {
        let s = LVSystem::zero(res(1, -1, 1));
        assert_eq!(s.apply_vector_field(&x()).unwrap(), x());
        let xy = &x() * &Poly::var(Ring::Xyz, 1);
        assert!(s.apply_vector_field(&xy).unwrap().is_zero());
        let g = LVSystem::all_ones(res(1, -1, 1));
        assert_eq!(g.apply_vector_field(&x()).unwrap(), &x() * &g.coordinate_cofactor(0));
    }

    #[test]
    fn divergence_examples() {
        assert_eq!(LVSystem::zero(res(1, -1, 1)).divergence().to_string(), "1");
        assert_eq!(LVSystem::zero(res(2, -1, 1)).divergence().to_string(), "2");
        assert_eq!(LVSystem::all_ones(res(1, -1, 1)).divergence().to_string(), "4*z + 4*y + 4*x + 1");
    }

    #[test]
    fn cofactors() {
        let g = LVSystem::all_ones(res(1, -1, 1));
        let y = Poly::var(Ring::Xyz, 1);
        assert_eq!(g.cofactor_of(&y).unwrap().poly(), &g.coordinate_cofactor(1));
        let one_plus_x = &Poly::one(Ring::Xyz) + &x();
        assert!(matches!(g.cofactor_of(&one_plus_x), Err(LvError::NotInvariant { .. })));
        // Case 2 point: b = d = f = h = 0, e = 1; 1 - y has cofactor y.
        let mut p: [Rational; 9] = std::array::from_fn(|_| rat(1, 1));
        for i in [1, 3, 5, 7] {
            p[i] = rat(0, 1);
        }
        let s = LVSystem::from_point(res(1, -1, 1), &p);
        let l = &Poly::one(Ring::Xyz) - &y;
        assert_eq!(s.cofactor_of(&l).unwrap().poly(), &y);
    }

    #[test]
    fn dual_is_an_involution() {
        let p: [Rational; 9] = std::array::from_fn(|i| rat(i as i64 + 1, 1));
        let s = LVSystem::from_point(res(2, -1, 1), &p);
        let d = s.dual_transform();
        assert_eq!(d.eigenvalues(), [1, -1, 2]);
        assert_eq!(d.point()[0], rat(9, 1));
        assert_eq!(d.point()[1], rat(8, 1));
        assert_eq!(d.dual_transform(), s);
        let z = LVSystem::zero(res(1, -2, 1));
        assert_eq!(z.dual_transform(), z);
    }

    #[test]
    fn independence() {
        assert!(!LVSystem::zero(res(1, -1, 1)).independence_check());
        assert!(!LVSystem::all_ones(res(1, -1, 1)).independence_check());
        let m = [[rat(1, 1), rat(2, 1), rat(0, 1)], [rat(0, 1), rat(1, 1), rat(3, 1)], [rat(5, 1), rat(0, 1), rat(1, 1)]];
        assert!(LVSystem::new(res(1, -1, 1), m).independence_check());
    }
}
