//! Obstruction polynomials: forced values of resonant series coefficients,
//! whose vanishing is necessary for the integrals or the linearization.

use std::fmt;

use crate::algebra::{buchberger, normal_form, AlgebraError, Poly, Rational, Ring};
use crate::series::{eigen_series, linearize_field, Coeff, DiagonalField, ExponentVector};
use crate::system::{LVSystem, Resonance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObstructionTarget {
    /// `φ₁` (index 0, prefactor `x^{−μ} y^λ`) or `φ₂` (index 1, `y^ν z^{−μ}`).
    Integrability(usize),
    /// Linearizing coordinate `X`, `Y` or `Z`.
    Linearizability(usize),
}

impl fmt::Display for ObstructionTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObstructionTarget::Integrability(i) => write!(f, "phi{}", i + 1),
            ObstructionTarget::Linearizability(m) => write!(f, "{}", ["X", "Y", "Z"][*m]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionSet<C: Coeff> {
    pub resonance: Resonance,
    pub target: ObstructionTarget,
    pub order: u32,
    /// Ordered by total degree, then monomial order.
    pub entries: Vec<(ExponentVector, C)>,
}

impl<C: Coeff> ObstructionSet<C> {
    pub fn all_zero(&self) -> bool {
        self.entries.iter().all(|(_, c)| c.is_zero())
    }

    pub fn first_nonzero(&self) -> Option<&(ExponentVector, C)> {
        self.entries.iter().find(|(_, c)| !c.is_zero())
    }

    pub fn truncate(&self, order: u32) -> Self {
        ObstructionSet {
            entries: self.entries.iter().filter(|(i, _)| i.degree() <= order).cloned().collect(),
            order,
            ..self.clone()
        }
    }
}

impl ObstructionSet<Poly> {
    pub fn evaluate(&self, point: &[Rational; 9]) -> ObstructionSet<Rational> {
        ObstructionSet {
            resonance: self.resonance,
            target: self.target,
            order: self.order,
            entries: self.entries.iter().map(|(i, p)| (*i, p.eval(point))).collect(),
        }
    }

    /// Content-free normal forms (integer coefficients, positive leading term).
    pub fn primitive_entries(&self) -> Vec<(ExponentVector, Poly)> {
        self.entries.iter().map(|(i, p)| (*i, p.primitive())).collect()
    }
}

pub fn all_vanish<C: Coeff>(sets: &[ObstructionSet<C>]) -> bool {
    sets.iter().all(|s| s.all_zero())
}

fn integrability_sets<C: Coeff>(field: &DiagonalField<C>, resonance: Resonance, order: u32) -> Vec<ObstructionSet<C>> {
    resonance
        .integral_prefactors()
        .iter()
        .enumerate()
        .map(|(which, rho)| {
            let rho = rho.map(|r| Rational::from_integer(r.into()));
            ObstructionSet {
                resonance,
                target: ObstructionTarget::Integrability(which),
                order,
                entries: eigen_series(field, &rho, order).obstructions,
            }
        })
        .collect()
}

fn linearizability_sets<C: Coeff>(field: &DiagonalField<C>, resonance: Resonance, order: u32) -> Vec<ObstructionSet<C>> {
    let lin = linearize_field(field, order);
    (0..3)
        .map(|m| ObstructionSet {
            resonance,
            target: ObstructionTarget::Linearizability(m),
            order,
            entries: lin.obstructions.iter().filter(|(k, _, _)| *k == m).map(|(_, i, c)| (*i, c.clone())).collect(),
        })
        .collect()
}

/// Symbolic obstructions of `φ₁` and `φ₂` over the parameters `a, ..., k`.
pub fn integrability_obstructions(resonance: Resonance, order: u32) -> Vec<ObstructionSet<Poly>> {
    integrability_sets(&DiagonalField::symbolic(resonance), resonance, order)
}

/// Symbolic obstructions of the three linearizing coordinates.
pub fn linearizability_obstructions(resonance: Resonance, order: u32) -> Vec<ObstructionSet<Poly>> {
    linearizability_sets(&DiagonalField::symbolic(resonance), resonance, order)
}

/// The same obstructions computed directly over the rationals at one system.
pub fn integrability_obstructions_at(sys: &LVSystem, order: u32) -> Vec<ObstructionSet<Rational>> {
    integrability_sets(&DiagonalField::from_system(sys), sys.resonance(), order)
}

pub fn linearizability_obstructions_at(sys: &LVSystem, order: u32) -> Vec<ObstructionSet<Rational>> {
    linearizability_sets(&DiagonalField::from_system(sys), sys.resonance(), order)
}

/// Outcome of reducing obstructions modulo a case ideal.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    /// Normal form of every entry of every set, in order.
    pub normal_forms: Vec<(ObstructionTarget, ExponentVector, Poly)>,
    /// Present when some normal form is nonzero: whether every entry
    /// vanished exactly at the sampled points of the case variety.
    pub sample_fallback: Option<SampleFallback>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleFallback {
    pub points: usize,
    pub vanishes_on_samples: bool,
}

impl Reduction {
    pub fn by_membership(&self) -> bool {
        self.normal_forms.iter().all(|(_, _, p)| p.is_zero())
    }

    /// Membership, or failing that vanishing on every sample.
    pub fn certified(&self) -> bool {
        self.by_membership() || self.sample_fallback.as_ref().is_some_and(|s| s.vanishes_on_samples)
    }

    pub fn verdict(&self) -> &'static str {
        if self.by_membership() {
            "zero by membership"
        } else if self.certified() {
            "vanishes on samples but not by membership"
        } else {
            "nonzero"
        }
    }
}

/// Normal forms of the obstructions modulo `⟨conditions⟩`; when one is
/// nonzero, evaluates all entries at the supplied sample points instead.
pub fn reduce_obstructions(
    sets: &[ObstructionSet<Poly>],
    conditions: &[Poly],
    samples: impl FnOnce() -> Vec<[Rational; 9]>,
) -> Result<Reduction, AlgebraError> {
    let gb = buchberger(conditions, &Ring::Params.default_order())?;
    let mut normal_forms = Vec::new();
    for s in sets {
        for (i, p) in &s.entries {
            normal_forms.push((s.target, *i, normal_form(p, &gb)?));
        }
    }
    let mut r = Reduction { normal_forms, sample_fallback: None };
    if !r.by_membership() {
        let points = samples();
        let vanishes = points.iter().all(|pt| sets.iter().all(|s| s.entries.iter().all(|(_, p)| p.eval(pt).is_zero())));
        r.sample_fallback = Some(SampleFallback { points: points.len(), vanishes_on_samples: vanishes && !points.is_empty() });
    }
    Ok(r)
}
