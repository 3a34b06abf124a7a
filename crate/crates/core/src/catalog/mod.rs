//! The case catalog: every integrability and linearizability condition for
//! the supported resonances, with sampling parametrizations and
//! certificates, loaded from a versioned TOML data file.

mod sample;
mod verify;

pub use sample::{sample_branch, sample_case_point, symbolic_parametrization_check, SampledPoint};
pub use verify::{verify_case, verify_point, CaseReport, CertReport, SampleReport, SeriesReport, VerifyMode};

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::algebra::{Poly, Ring};
use crate::expr::{self, Env, Expr};
use crate::series::ExponentVector;
use crate::system::Resonance;

pub const CATALOG_FORMAT_VERSION: u32 = 1;
const CATALOG_SOURCE: &str = include_str!("../../data/catalog.toml");

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CatalogError {
    #[error("catalog parse error: {0}")]
    Parse(String),
    #[error("unsupported resonance {0}")]
    UnsupportedResonance(Resonance),
    #[error("unknown case {0:?}")]
    UnknownCase(String),
    #[error("branch {tag:?} of {label} is infeasible: {reason}")]
    BranchInfeasible { label: String, tag: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    Integrable,
    Linearizable,
    Both,
}

impl CaseKind {
    pub fn integrable(&self) -> bool {
        matches!(self, CaseKind::Integrable | CaseKind::Both)
    }

    pub fn linearizable(&self) -> bool {
        matches!(self, CaseKind::Linearizable | CaseKind::Both)
    }
}

/// Where a catalog item comes from: printed in the source classification,
/// derived here (duals, unprinted sub-branches), or a printed formula that
/// needed a correction to verify.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Printed,
    Derived,
    Corrected,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RelationSpec {
    FirstIntegral,
    InverseJacobiMultiplier,
    Eigenfunction(Expr),
}

/// Either a Darboux first integral or only the prefactor exponents of one.
#[derive(Clone, Debug, PartialEq)]
pub enum IntegralSpec {
    Darboux(Expr),
    Prefactor([Expr; 3]),
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertificateKind {
    /// `X(D) = cofactor · D`.
    Cofactor { expr: Expr, cofactor: Expr },
    Relation { expr: Expr, relation: RelationSpec },
    /// `(X, Y, Z)` with `X_m = x_m (...)` and `Ẋ_m = λ_m X_m`.
    Linearization([Expr; 3]),
    /// A rational first integral `num / den`.
    RationalIntegral { num: Expr, den: Expr },
    /// Second integral from a first integral and an inverse Jacobi multiplier.
    Theorem1 { phi: IntegralSpec, m: Expr, psi: [Expr; 3], exceptional: Vec<ExponentVector> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub provenance: Provenance,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub tag: String,
    /// Parameters set to zero on this branch.
    pub zero: Vec<usize>,
    /// Dependent parameters, solved in order once their inputs are known.
    pub assign: Vec<(usize, Expr)>,
    pub nonzero: Vec<Expr>,
    pub certificates: Vec<Certificate>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseSpec {
    pub label: String,
    pub resonance: Resonance,
    pub kind: CaseKind,
    pub conditions: Vec<Poly>,
    pub condition_exprs: Vec<Expr>,
    pub branches: Vec<Branch>,
    pub dual_of: Option<String>,
    pub provenance: Provenance,
    pub note: Option<String>,
}

impl CaseSpec {
    /// Cases proved without a closed-form certificate on some branch.
    pub fn series_only_branches(&self) -> Vec<&str> {
        self.branches.iter().filter(|b| b.certificates.is_empty()).map(|b| b.tag.as_str()).collect()
    }
}

impl fmt::Display for CaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let conds: Vec<String> = self.condition_exprs.iter().map(|e| e.to_string()).collect();
        write!(f, "{} [{}] {}", self.label, format!("{:?}", self.kind).to_lowercase(), conds.join(" = "))?;
        write!(f, " = 0")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    format_version: u32,
    case: Vec<CaseRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseRecord {
    label: String,
    resonance: String,
    kind: String,
    conditions: Vec<String>,
    dual_of: Option<String>,
    #[serde(default)]
    derive_from_dual: bool,
    provenance: Option<String>,
    note: Option<String>,
    #[serde(default)]
    branch: Vec<BranchRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchRecord {
    tag: String,
    #[serde(default)]
    zero: Vec<String>,
    #[serde(default)]
    assign: Vec<[String; 2]>,
    #[serde(default)]
    nonzero: Vec<String>,
    provenance: Option<String>,
    #[serde(default)]
    cert: Vec<CertRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CertRecord {
    kind: String,
    expr: Option<String>,
    cofactor: Option<String>,
    kappa: Option<String>,
    x: Option<String>,
    y: Option<String>,
    z: Option<String>,
    num: Option<String>,
    den: Option<String>,
    phi: Option<String>,
    delta: Option<[String; 3]>,
    m: Option<String>,
    psi: Option<[String; 3]>,
    #[serde(default)]
    exceptional: Vec<[u32; 3]>,
    provenance: Option<String>,
    note: Option<String>,
}

/// The whole catalog, keyed by label in file order.
#[derive(Clone, Debug)]
pub struct Catalog {
    pub cases: Vec<CaseSpec>,
}

fn parse_expr(src: &str, ctx: &str) -> Result<Expr, CatalogError> {
    expr::parse(src).map_err(|e| CatalogError::Parse(format!("{ctx}: {src:?}: {e}")))
}

fn param_index(name: &str, ctx: &str) -> Result<usize, CatalogError> {
    Ring::Params.var_index(name).ok_or_else(|| CatalogError::Parse(format!("{ctx}: {name:?} is not a parameter")))
}

fn provenance(s: &Option<String>, ctx: &str) -> Result<Provenance, CatalogError> {
    match s.as_deref() {
        None | Some("printed") => Ok(Provenance::Printed),
        Some("derived") => Ok(Provenance::Derived),
        Some("corrected") => Ok(Provenance::Corrected),
        Some(o) => Err(CatalogError::Parse(format!("{ctx}: unknown provenance {o:?}"))),
    }
}

fn triple(v: &[String; 3], ctx: &str) -> Result<[Expr; 3], CatalogError> {
    Ok([parse_expr(&v[0], ctx)?, parse_expr(&v[1], ctx)?, parse_expr(&v[2], ctx)?])
}

fn cert_from_record(r: &CertRecord, ctx: &str) -> Result<Certificate, CatalogError> {
    let need = |f: &Option<String>, name: &str| -> Result<Expr, CatalogError> {
        match f {
            Some(s) => parse_expr(s, ctx),
            None => Err(CatalogError::Parse(format!("{ctx}: certificate {:?} needs field {name}", r.kind))),
        }
    };
    let kind = match r.kind.as_str() {
        "cofactor" => CertificateKind::Cofactor { expr: need(&r.expr, "expr")?, cofactor: need(&r.cofactor, "cofactor")? },
        "fi" => CertificateKind::Relation { expr: need(&r.expr, "expr")?, relation: RelationSpec::FirstIntegral },
        "ijm" => CertificateKind::Relation { expr: need(&r.expr, "expr")?, relation: RelationSpec::InverseJacobiMultiplier },
        "eig" => CertificateKind::Relation {
            expr: need(&r.expr, "expr")?,
            relation: RelationSpec::Eigenfunction(need(&r.kappa, "kappa")?),
        },
        "lin" => CertificateKind::Linearization([need(&r.x, "x")?, need(&r.y, "y")?, need(&r.z, "z")?]),
        "ratfi" => CertificateKind::RationalIntegral { num: need(&r.num, "num")?, den: need(&r.den, "den")? },
        "theorem1" => {
            let phi = match (&r.phi, &r.delta) {
                (Some(p), None) => IntegralSpec::Darboux(parse_expr(p, ctx)?),
                (None, Some(d)) => IntegralSpec::Prefactor(triple(d, ctx)?),
                _ => return Err(CatalogError::Parse(format!("{ctx}: theorem1 needs exactly one of phi, delta"))),
            };
            let psi = match &r.psi {
                Some(p) => triple(p, ctx)?,
                None => return Err(CatalogError::Parse(format!("{ctx}: theorem1 needs psi"))),
            };
            CertificateKind::Theorem1 {
                phi,
                m: need(&r.m, "m")?,
                psi,
                exceptional: r.exceptional.iter().map(|e| ExponentVector(*e)).collect(),
            }
        }
        o => return Err(CatalogError::Parse(format!("{ctx}: unknown certificate kind {o:?}"))),
    };
    Ok(Certificate { kind, provenance: provenance(&r.provenance, ctx)?, note: r.note.clone() })
}

/// The symmetry `(x, y, z) -> (z, y, x)` on identifiers; on parameters it
/// swaps `a<->k, b<->h, c<->g, d<->f`.
pub fn dual_name(s: &str) -> String {
    match s {
        "x" => "z",
        "z" => "x",
        "a" => "k",
        "k" => "a",
        "b" => "h",
        "h" => "b",
        "c" => "g",
        "g" => "c",
        "d" => "f",
        "f" => "d",
        other => other,
    }
    .to_string()
}

/// Parameter permutation of the dual transform, by index.
pub const DUAL_PARAM_PERM: [usize; 9] = [8, 7, 6, 5, 4, 3, 2, 1, 0];

pub fn dual_expr(e: &Expr) -> Expr {
    e.rename(&dual_name)
}

pub fn dual_poly(p: &Poly) -> Poly {
    assert_eq!(p.ring(), Ring::Params);
    p.permute_vars(&DUAL_PARAM_PERM)
}

fn dual_tag(tag: &str) -> String {
    tag.chars()
        .map(|c| if c.is_ascii_lowercase() { dual_name(&c.to_string()).chars().next().unwrap() } else { c })
        .collect()
}

fn dual_certificate(c: &Certificate) -> Certificate {
    let d = dual_expr;
    let rev = |t: &[Expr; 3]| [d(&t[2]), d(&t[1]), d(&t[0])];
    let kind = match &c.kind {
        CertificateKind::Cofactor { expr, cofactor } => CertificateKind::Cofactor { expr: d(expr), cofactor: d(cofactor) },
        CertificateKind::Relation { expr, relation } => CertificateKind::Relation {
            expr: d(expr),
            relation: match relation {
                RelationSpec::Eigenfunction(k) => RelationSpec::Eigenfunction(d(k)),
                other => other.clone(),
            },
        },
        CertificateKind::Linearization(t) => CertificateKind::Linearization(rev(t)),
        CertificateKind::RationalIntegral { num, den } => CertificateKind::RationalIntegral { num: d(num), den: d(den) },
        CertificateKind::Theorem1 { phi, m, psi, exceptional } => CertificateKind::Theorem1 {
            phi: match phi {
                IntegralSpec::Darboux(e) => IntegralSpec::Darboux(d(e)),
                IntegralSpec::Prefactor(t) => IntegralSpec::Prefactor(rev(t)),
            },
            m: d(m),
            psi: rev(psi),
            exceptional: exceptional.iter().map(|e| ExponentVector([e.0[2], e.0[1], e.0[0]])).collect(),
        },
    };
    Certificate { kind, provenance: Provenance::Derived, note: Some("dual image".into()) }
}

fn dual_branch(b: &Branch) -> Branch {
    Branch {
        tag: dual_tag(&b.tag),
        zero: b.zero.iter().map(|&i| DUAL_PARAM_PERM[i]).collect(),
        assign: b.assign.iter().map(|(i, e)| (DUAL_PARAM_PERM[*i], dual_expr(e))).collect(),
        nonzero: b.nonzero.iter().map(dual_expr).collect(),
        certificates: b.certificates.iter().map(dual_certificate).collect(),
        provenance: Provenance::Derived,
    }
}

impl Catalog {
    pub fn parse(src: &str) -> Result<Catalog, CatalogError> {
        let file: CatalogFile = toml::from_str(src).map_err(|e| CatalogError::Parse(e.to_string()))?;
        if file.format_version != CATALOG_FORMAT_VERSION {
            return Err(CatalogError::Parse(format!(
                "format_version {} (expected {CATALOG_FORMAT_VERSION})",
                file.format_version
            )));
        }
        let mut cases: Vec<CaseSpec> = Vec::new();
        let mut deferred = Vec::new();
        for (pos, r) in file.case.iter().enumerate() {
            let ctx = r.label.as_str();
            let resonance: Resonance =
                r.resonance.parse().map_err(|e| CatalogError::Parse(format!("{ctx}: resonance: {e}")))?;
            let kind = match r.kind.as_str() {
                "integrable" => CaseKind::Integrable,
                "linearizable" => CaseKind::Linearizable,
                "both" => CaseKind::Both,
                o => return Err(CatalogError::Parse(format!("{ctx}: unknown kind {o:?}"))),
            };
            let condition_exprs = r.conditions.iter().map(|c| parse_expr(c, ctx)).collect::<Result<Vec<_>, _>>()?;
            let conditions = condition_exprs
                .iter()
                .map(|e| expr::eval_poly(e, Ring::Params, &Env::new()).map_err(|err| CatalogError::Parse(format!("{ctx}: {err}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let mut branches = Vec::new();
            for b in &r.branch {
                let bctx = format!("{ctx} branch {:?}", b.tag);
                branches.push(Branch {
                    tag: b.tag.clone(),
                    zero: b.zero.iter().map(|n| param_index(n, &bctx)).collect::<Result<_, _>>()?,
                    assign: b
                        .assign
                        .iter()
                        .map(|[n, e]| Ok((param_index(n, &bctx)?, parse_expr(e, &bctx)?)))
                        .collect::<Result<_, CatalogError>>()?,
                    nonzero: b.nonzero.iter().map(|e| parse_expr(e, &bctx)).collect::<Result<_, _>>()?,
                    certificates: b.cert.iter().map(|c| cert_from_record(c, &bctx)).collect::<Result<_, _>>()?,
                    provenance: provenance(&b.provenance, &bctx)?,
                });
            }
            if r.derive_from_dual {
                if !branches.is_empty() || r.dual_of.is_none() {
                    return Err(CatalogError::Parse(format!("{ctx}: derive_from_dual needs dual_of and no branches")));
                }
                deferred.push(pos);
            } else if branches.is_empty() {
                return Err(CatalogError::Parse(format!("{ctx}: no branches")));
            }
            cases.push(CaseSpec {
                label: r.label.clone(),
                resonance,
                kind,
                conditions,
                condition_exprs,
                branches,
                dual_of: r.dual_of.clone(),
                provenance: provenance(&r.provenance, ctx)?,
                note: r.note.clone(),
            });
        }
        let index: HashMap<String, usize> = cases.iter().enumerate().map(|(i, c)| (c.label.clone(), i)).collect();
        if index.len() != cases.len() {
            return Err(CatalogError::Parse("duplicate case labels".into()));
        }
        for pos in deferred {
            let base_label = cases[pos].dual_of.clone().unwrap();
            let base = *index.get(&base_label).ok_or_else(|| CatalogError::UnknownCase(base_label.clone()))?;
            if cases[base].branches.is_empty() {
                return Err(CatalogError::Parse(format!("{}: dual base {base_label} has no branches", cases[pos].label)));
            }
            cases[pos].branches = cases[base].branches.iter().map(dual_branch).collect();
        }
        for c in &cases {
            if let Some(d) = &c.dual_of {
                let j = *index.get(d).ok_or_else(|| CatalogError::UnknownCase(d.clone()))?;
                if cases[j].dual_of.as_deref() != Some(c.label.as_str()) {
                    return Err(CatalogError::Parse(format!("{}: dual link to {d} is not symmetric", c.label)));
                }
            }
        }
        Ok(Catalog { cases })
    }

    /// The catalog shipped with the library.
    pub fn builtin() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| Catalog::parse(CATALOG_SOURCE).expect("built-in catalog is valid"))
    }

    pub fn source() -> &'static str {
        CATALOG_SOURCE
    }

    pub fn get(&self, label: &str) -> Result<&CaseSpec, CatalogError> {
        self.cases.iter().find(|c| c.label == label).ok_or_else(|| CatalogError::UnknownCase(label.to_string()))
    }

    pub fn resonances(&self) -> Vec<Resonance> {
        let mut out: Vec<Resonance> = Vec::new();
        for c in &self.cases {
            if !out.contains(&c.resonance) {
                out.push(c.resonance);
            }
        }
        out
    }
}

pub fn list_cases(resonance: Resonance) -> Result<Vec<CaseSpec>, CatalogError> {
    let cases: Vec<CaseSpec> = Catalog::builtin().cases.iter().filter(|c| c.resonance == resonance).cloned().collect();
    if cases.is_empty() {
        Err(CatalogError::UnsupportedResonance(resonance))
    } else {
        Ok(cases)
    }
}

pub fn get_case(label: &str) -> Result<CaseSpec, CatalogError> {
    Catalog::builtin().get(label).cloned()
}

/// Whether two condition lists generate the same ideal, by reducing each
/// generator modulo a Gröbner basis of the other list.
pub fn same_ideal(p: &[Poly], q: &[Poly]) -> Result<bool, crate::algebra::AlgebraError> {
    use crate::algebra::{buchberger, normal_form};
    let order = Ring::Params.default_order();
    let gp = buchberger(p, &order)?;
    let gq = buchberger(q, &order)?;
    for f in p {
        if !normal_form(f, &gq)?.is_zero() {
            return Ok(false);
        }
    }
    for f in q {
        if !normal_form(f, &gp)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityCheck {
    pub label: String,
    pub dual: String,
    pub involutive: bool,
    pub ideals_match: bool,
}

impl Catalog {
    /// For every linked pair: the link is symmetric and the dual image of
    /// one condition list generates the ideal of the other.
    pub fn duality_checks(&self) -> Result<Vec<DualityCheck>, CatalogError> {
        let mut out = Vec::new();
        for c in &self.cases {
            let Some(d) = &c.dual_of else { continue };
            let other = self.get(d)?;
            let image: Vec<Poly> = c.conditions.iter().map(dual_poly).collect();
            let ideals_match =
                same_ideal(&image, &other.conditions).map_err(|e| CatalogError::Parse(format!("{}: {e}", c.label)))?;
            out.push(DualityCheck {
                label: c.label.clone(),
                dual: d.clone(),
                involutive: other.dual_of.as_deref() == Some(c.label.as_str()),
                ideals_match,
            });
        }
        Ok(out)
    }

    /// Number of integrability cases and of cases that only add
    /// linearizability, for one resonance.
    pub fn counts(&self, resonance: Resonance) -> (usize, usize) {
        let cases = self.cases.iter().filter(|c| c.resonance == resonance);
        let integrable = cases.clone().filter(|c| c.kind.integrable()).count();
        let lin_only = cases.filter(|c| c.kind == CaseKind::Linearizable).count();
        (integrable, lin_only)
    }
}

/// Reduces the symbolic obstructions of order `order` modulo the case's
/// ideal; integrability obstructions always, linearizability ones too when
/// the case claims linearizability. Falls back to `fallback_samples` points
/// of the case when some normal form is nonzero.
pub fn reduce_obstructions_mod_case(
    case: &CaseSpec,
    order: u32,
    fallback_samples: usize,
) -> Result<crate::obstruction::Reduction, crate::algebra::AlgebraError> {
    use crate::obstruction::{integrability_obstructions, linearizability_obstructions, reduce_obstructions};
    let mut sets = integrability_obstructions(case.resonance, order);
    if case.kind.linearizable() {
        sets.extend(linearizability_obstructions(case.resonance, order));
    }
    reduce_obstructions(&sets, &case.conditions, || {
        (0..fallback_samples)
            .filter_map(|i| {
                let bi = i % case.branches.len().max(1);
                sample_branch(case, bi, 1000 + i as u64).ok()
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_catalog_loads() {
        let cat = Catalog::builtin();
        assert_eq!(cat.counts(Resonance::new(1, -1, 1).unwrap()), (7, 4));
        assert_eq!(cat.counts(Resonance::new(2, -1, 1).unwrap()), (11, 4));
        assert_eq!(cat.counts(Resonance::new(1, -2, 1).unwrap()), (27, 3));
    }

    #[test]
    fn rejects_wrong_version() {
        let src = Catalog::source().replacen("format_version = 1", "format_version = 2", 1);
        assert!(matches!(Catalog::parse(&src), Err(CatalogError::Parse(_))));
    }

    #[test]
    fn unsupported_resonance() {
        let r = Resonance::new(3, -1, 1).unwrap();
        assert_eq!(list_cases(r).unwrap_err(), CatalogError::UnsupportedResonance(r));
    }

    #[test]
    fn dual_names_are_involutive() {
        for n in ["x", "y", "z", "a", "b", "c", "d", "e", "f", "g", "h", "k", "w"] {
            assert_eq!(dual_name(&dual_name(n)), n);
        }
    }
}
