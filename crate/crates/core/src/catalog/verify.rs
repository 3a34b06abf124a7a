use rayon::prelude::*;
use serde::Serialize;

use super::{sample_branch, Branch, CaseSpec, Certificate, CertificateKind, IntegralSpec, RelationSpec};
use crate::algebra::rational::format_rational;
use crate::algebra::{Rational, Ring};
use crate::darboux::{DarbouxFunction, RelationKind};
use crate::expr::{self, Env, Expr};
use crate::obstruction::{all_vanish, integrability_obstructions_at, linearizability_obstructions_at};
use crate::series::{
    format_triple, linearize_system, resonant_series_integral, theorem1_construct, theorem1_construct_with_prefactor,
    DiagonalField, ExponentVector,
};
use crate::system::LVSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Exact,
    Series,
    Both,
}

impl VerifyMode {
    fn exact(&self) -> bool {
        matches!(self, VerifyMode::Exact | VerifyMode::Both)
    }

    fn series(&self) -> bool {
        matches!(self, VerifyMode::Series | VerifyMode::Both)
    }
}

impl std::str::FromStr for VerifyMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(VerifyMode::Exact),
            "series" => Ok(VerifyMode::Series),
            "both" => Ok(VerifyMode::Both),
            _ => Err(format!("unknown mode {s:?} (expected exact, series or both)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertReport {
    pub kind: String,
    pub statement: String,
    pub provenance: super::Provenance,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesReport {
    pub order: u32,
    /// Prefactors of the two series integrals.
    pub integrals: Vec<String>,
    pub integrals_obstruction_free: bool,
    pub integral_residuals_zero: bool,
    /// `None` for cases that only claim integrability.
    pub linearization_obstruction_free: Option<bool>,
    pub linearization_residuals_zero: Option<bool>,
}

impl SeriesReport {
    fn pass(&self) -> bool {
        self.integrals_obstruction_free
            && self.integral_residuals_zero
            && self.linearization_obstruction_free != Some(false)
            && self.linearization_residuals_zero != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleReport {
    pub index: usize,
    pub branch: Option<String>,
    pub point: Vec<String>,
    pub integrability_obstructions_vanish: bool,
    pub linearizability_obstructions_vanish: Option<bool>,
    pub first_nonzero_obstruction: Option<String>,
    pub certificates: Vec<CertReport>,
    pub series: Option<SeriesReport>,
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseReport {
    pub label: String,
    pub resonance: String,
    pub kind: super::CaseKind,
    pub conditions: Vec<String>,
    pub order: u32,
    pub mode: VerifyMode,
    pub seed: u64,
    pub samples: Vec<SampleReport>,
    pub pass: bool,
}

fn relation_name(kind: &CertificateKind) -> &'static str {
    match kind {
        CertificateKind::Cofactor { .. } => "cofactor",
        CertificateKind::Relation { relation: RelationSpec::FirstIntegral, .. } => "first-integral",
        CertificateKind::Relation { relation: RelationSpec::InverseJacobiMultiplier, .. } => "inverse-jacobi-multiplier",
        CertificateKind::Relation { relation: RelationSpec::Eigenfunction(_), .. } => "eigenfunction",
        CertificateKind::Linearization(_) => "linearization",
        CertificateKind::RationalIntegral { .. } => "rational-first-integral",
        CertificateKind::Theorem1 { .. } => "theorem1",
    }
}

fn statement(kind: &CertificateKind) -> String {
    match kind {
        CertificateKind::Cofactor { expr, cofactor } => format!("X({expr}) = ({cofactor})*({expr})"),
        CertificateKind::Relation { expr, relation } => match relation {
            RelationSpec::FirstIntegral => format!("X({expr}) = 0"),
            RelationSpec::InverseJacobiMultiplier => format!("X({expr}) = div X*({expr})"),
            RelationSpec::Eigenfunction(k) => format!("X({expr}) = ({k})*({expr})"),
        },
        CertificateKind::Linearization(t) => format!("(X, Y, Z) = ({}, {}, {})", t[0], t[1], t[2]),
        CertificateKind::RationalIntegral { num, den } => format!("X(({num})/({den})) = 0"),
        CertificateKind::Theorem1 { phi, m, psi, .. } => {
            let phi = match phi {
                IntegralSpec::Darboux(e) => e.to_string(),
                IntegralSpec::Prefactor(d) => format!("x^({})*y^({})*z^({})*(1 + ...)", d[0], d[1], d[2]),
            };
            format!("phi = {phi}, M = {m} => psi = x^({})*y^({})*z^({})*(1 + ...)", psi[0], psi[1], psi[2])
        }
    }
}

fn consts(t: &[Expr; 3], env: &Env) -> Result<[Rational; 3], String> {
    let v: Vec<Rational> = t.iter().map(|e| expr::eval_const(e, env)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    Ok([v[0].clone(), v[1].clone(), v[2].clone()])
}

fn check_certificate(cert: &Certificate, sys: &LVSystem, env: &Env, order: u32) -> Result<(bool, String), String> {
    let darboux = |e: &Expr| DarbouxFunction::parse(&e.to_string(), env).map_err(|e| e.to_string());
    match &cert.kind {
        CertificateKind::Cofactor { expr, cofactor } => {
            let d = darboux(expr)?;
            let want = expr::eval_poly(cofactor, Ring::Xyz, env).map_err(|e| e.to_string())?;
            let got = d.log_derivative(sys).map_err(|e| e.to_string())?;
            Ok((got == want, format!("cofactor {got}")))
        }
        CertificateKind::Relation { expr, relation } => {
            let d = darboux(expr)?;
            let kind = match relation {
                RelationSpec::FirstIntegral => RelationKind::FirstIntegral,
                RelationSpec::InverseJacobiMultiplier => RelationKind::InverseJacobiMultiplier,
                RelationSpec::Eigenfunction(k) => {
                    RelationKind::Eigenfunction(expr::eval_const(k, env).map_err(|e| e.to_string())?)
                }
            };
            let got = d.log_derivative(sys).map_err(|e| e.to_string())?;
            let ok = d.verify_relation(sys, &kind).map_err(|e| e.to_string())?;
            Ok((ok, format!("{d}: log-derivative {got}")))
        }
        CertificateKind::Linearization(t) => {
            let lambda = sys.eigenvalues();
            let mut ok = true;
            let mut parts = Vec::new();
            for m in 0..3 {
                let d = darboux(&t[m])?;
                let unit = ExponentVector::unit(m).as_rationals();
                let lam = Rational::from_integer(lambda[m].into());
                let good = d.monomial == unit
                    && d.verify_relation(sys, &RelationKind::Eigenfunction(lam)).map_err(|e| e.to_string())?;
                ok &= good;
                parts.push(format!("{}: {}", ["X", "Y", "Z"][m], if good { "ok" } else { "fails" }));
            }
            Ok((ok, parts.join(", ")))
        }
        CertificateKind::RationalIntegral { num, den } => {
            let n = expr::eval_poly(num, Ring::Xyz, env).map_err(|e| e.to_string())?;
            let d = expr::eval_poly(den, Ring::Xyz, env).map_err(|e| e.to_string())?;
            if d.is_zero() {
                return Err("zero denominator".into());
            }
            let xn = sys.apply_vector_field(&n).map_err(|e| e.to_string())?;
            let xd = sys.apply_vector_field(&d).map_err(|e| e.to_string())?;
            let w = &(&xn * &d) - &(&n * &xd);
            Ok((w.is_zero(), if w.is_zero() { "X(num)*den = num*X(den)".into() } else { format!("Wronskian {w}") }))
        }
        CertificateKind::Theorem1 { phi, m, psi, exceptional } => {
            let mm = darboux(m)?;
            let r = match phi {
                IntegralSpec::Darboux(e) => theorem1_construct(sys, &darboux(e)?, &mm, order),
                IntegralSpec::Prefactor(d) => theorem1_construct_with_prefactor(sys, &consts(d, env)?, &mm, order),
            }
            .map_err(|e| e.to_string())?;
            let want = consts(psi, env)?;
            let field = DiagonalField::from_system(sys);
            let residual_zero = field.residual(&r.psi.prefactor, &r.psi.kappa, &r.psi.u).is_zero();
            let exc_ok = exceptional.iter().filter(|e| e.degree() <= order).copied().collect::<Vec<_>>() == r.exceptional;
            let ok = r.psi.prefactor == want && r.independent && r.psi.is_obstruction_free() && residual_zero && exc_ok;
            let exc: Vec<String> = r.exceptional.iter().map(|e| e.to_string()).collect();
            Ok((
                ok,
                format!(
                    "psi prefactor {} to order {order}, independent {}, exceptional [{}]",
                    format_triple(&r.psi.prefactor),
                    r.independent,
                    exc.join(", ")
                ),
            ))
        }
    }
}

fn series_report(sys: &LVSystem, order: u32, linearizable: bool) -> Result<SeriesReport, String> {
    let field = DiagonalField::from_system(sys);
    let mut integrals = Vec::new();
    let mut free = true;
    let mut residuals = true;
    for rho in sys.resonance().integral_prefactors() {
        let rho = rho.map(|r| Rational::from_integer(r.into()));
        let r = resonant_series_integral(sys, &rho, order).map_err(|e| e.to_string())?;
        free &= r.is_obstruction_free();
        residuals &= field.residual(&r.prefactor, &r.kappa, &r.u).is_zero();
        integrals.push(format!("{} (1 + {} terms)", format_triple(&r.prefactor), r.u.num_terms().saturating_sub(1)));
    }
    let (lin_free, lin_res) = if linearizable {
        let lin = linearize_system(sys, order);
        let lambda = sys.eigenvalues();
        let res = (0..3).all(|m| {
            let rho = ExponentVector::unit(m).as_rationals();
            field.residual(&rho, &Rational::from_integer(lambda[m].into()), &lin.u[m]).is_zero()
        });
        (Some(lin.is_obstruction_free()), Some(res))
    } else {
        (None, None)
    };
    Ok(SeriesReport {
        order,
        integrals,
        integrals_obstruction_free: free,
        integral_residuals_zero: residuals,
        linearization_obstruction_free: lin_free,
        linearization_residuals_zero: lin_res,
    })
}

/// Checks one parameter point against a case. Certificates are only run
/// when the point comes from a known branch.
pub fn verify_point(
    case: &CaseSpec,
    point: &[Rational; 9],
    branch: Option<&Branch>,
    order: u32,
    mode: VerifyMode,
) -> SampleReport {
    let sys = LVSystem::from_point(case.resonance, point);
    let env = expr::env_from_point(point);
    let int_sets = integrability_obstructions_at(&sys, order);
    let integrable = all_vanish(&int_sets);
    let lin_sets = case.kind.linearizable().then(|| linearizability_obstructions_at(&sys, order));
    let linearizable = lin_sets.as_ref().map(|s| all_vanish(s));
    let first_nonzero = int_sets
        .iter()
        .chain(lin_sets.iter().flatten())
        .find_map(|s| s.first_nonzero().map(|(i, c)| format!("{} at {i}: {}", s.target, format_rational(c))));
    let mut certificates = Vec::new();
    let mut error = None;
    if mode.exact() {
        if let Some(b) = branch {
            for cert in &b.certificates {
                let (ok, detail) = match check_certificate(cert, &sys, &env, order) {
                    Ok(r) => r,
                    Err(e) => (false, format!("error: {e}")),
                };
                certificates.push(CertReport {
                    kind: relation_name(&cert.kind).into(),
                    statement: statement(&cert.kind),
                    provenance: cert.provenance,
                    ok,
                    detail,
                });
            }
        }
    }
    let series = if mode.series() {
        match series_report(&sys, order, case.kind.linearizable()) {
            Ok(r) => Some(r),
            Err(e) => {
                error = Some(e);
                None
            }
        }
    } else {
        None
    };
    let pass = integrable
        && linearizable != Some(false)
        && certificates.iter().all(|c| c.ok)
        && series.as_ref().is_none_or(|s| s.pass())
        && error.is_none();
    SampleReport {
        index: 0,
        branch: branch.map(|b| b.tag.clone()),
        point: point.iter().map(format_rational).collect(),
        integrability_obstructions_vanish: integrable,
        linearizability_obstructions_vanish: linearizable,
        first_nonzero_obstruction: first_nonzero,
        certificates,
        series,
        error,
        pass,
    }
}

/// Samples `samples` points, cycling through the branches, and checks each
/// one. Samples run in parallel; the report order is the sample order.
pub fn verify_case(case: &CaseSpec, order: u32, samples: usize, seed: u64, mode: VerifyMode) -> CaseReport {
    let reports: Vec<SampleReport> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let bi = i % case.branches.len().max(1);
            let sample_seed = seed.wrapping_add(i as u64);
            match case.branches.get(bi).map(|_| sample_branch(case, bi, sample_seed)) {
                Some(Ok(point)) => {
                    let mut r = verify_point(case, &point, Some(&case.branches[bi]), order, mode);
                    r.index = i;
                    r
                }
                Some(Err(e)) => SampleReport {
                    index: i,
                    branch: case.branches.get(bi).map(|b| b.tag.clone()),
                    point: Vec::new(),
                    integrability_obstructions_vanish: false,
                    linearizability_obstructions_vanish: None,
                    first_nonzero_obstruction: None,
                    certificates: Vec::new(),
                    series: None,
                    error: Some(e.to_string()),
                    pass: false,
                },
                None => {
                    let zero: [Rational; 9] = Default::default();
                    let mut r = verify_point(case, &zero, None, order, mode);
                    r.index = i;
                    r
                }
            }
        })
        .collect();
    let pass = !reports.is_empty() && reports.iter().all(|r| r.pass);
    CaseReport {
        label: case.label.clone(),
        resonance: case.resonance.to_string(),
        kind: case.kind,
        conditions: case.conditions.iter().map(|p| p.to_string()).collect(),
        order,
        mode,
        seed,
        samples: reports,
        pass,
    }
}
