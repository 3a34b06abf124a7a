use std::collections::HashMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Branch, CaseSpec, CatalogError};
use crate::algebra::{linalg, Monomial, Poly, Rational, Ring};
use crate::expr::{self, eval_ratfunc_bound, RatFunc};

type Solved = (usize, Vec<(usize, Rational)>, Rational);

const PARAM_NAMES: [&str; 9] = ["a", "b", "c", "d", "e", "f", "g", "h", "k"];
const MAX_ATTEMPTS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct SampledPoint {
    pub point: [Rational; 9],
    pub branch: usize,
}

/// Every parameter as a rational function of the branch's free parameters.
struct Parametrization {
    values: Vec<RatFunc>,
    free: Vec<usize>,
}

fn infeasible(case: &CaseSpec, branch: &Branch, reason: impl Into<String>) -> CatalogError {
    CatalogError::BranchInfeasible { label: case.label.clone(), tag: branch.tag.clone(), reason: reason.into() }
}

fn param_idents(e: &expr::Expr) -> Vec<usize> {
    let mut names = Vec::new();
    e.idents(&mut names);
    names.iter().filter_map(|n| Ring::Params.var_index(n)).collect()
}

fn resolve(case: &CaseSpec, branch: &Branch) -> Result<Parametrization, CatalogError> {
    let assigned: Vec<usize> = branch.assign.iter().map(|(i, _)| *i).collect();
    // Columns: unassigned parameters first so linear elimination solves for
    // them rather than for explicitly assigned ones; constant term last.
    let mut order: Vec<usize> = (0..9).filter(|i| !assigned.contains(i)).collect();
    order.extend(assigned.iter().copied());
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut push_linear = |p: &Poly| {
        let mut row = vec![Rational::zero(); 10];
        for (col, &v) in order.iter().enumerate() {
            row[col] = p.coeff(&Monomial::var(v));
        }
        row[9] = p.constant_term();
        rows.push(row);
    };
    for p in case.conditions.iter().filter(|p| p.total_degree() <= 1) {
        push_linear(p);
    }
    for &z in &branch.zero {
        push_linear(&Poly::var(Ring::Params, z));
    }
    let (rref, pivots) = linalg::rref(rows);
    if pivots.contains(&9) {
        return Err(infeasible(case, branch, "linear conditions are inconsistent"));
    }
    // (pivot parameter, free-parameter terms, constant)
    let mut solved: Vec<Solved> = Vec::new();
    let mut pivot_params = Vec::new();
    for (r, &pc) in pivots.iter().enumerate() {
        let param = order[pc];
        if assigned.contains(&param) {
            continue;
        }
        pivot_params.push(param);
        let deps = (0..9)
            .filter(|&c| c != pc && !rref[r][c].is_zero())
            .map(|c| (order[c], rref[r][c].clone()))
            .collect();
        solved.push((param, deps, rref[r][9].clone()));
    }
    let free: Vec<usize> = (0..9).filter(|i| !assigned.contains(i) && !pivot_params.contains(i)).collect();
    let mut values: HashMap<usize, RatFunc> = free.iter().map(|&i| (i, RatFunc::from_poly(Poly::var(Ring::Params, i)))).collect();
    let mut pending_rows: Vec<usize> = (0..solved.len()).collect();
    let mut pending_assign: Vec<usize> = (0..branch.assign.len()).collect();
    while values.len() < 9 {
        let before = values.len();
        pending_rows.retain(|&r| {
            let (param, deps, c) = &solved[r];
            if !deps.iter().all(|(d, _)| values.contains_key(d)) {
                return true;
            }
            let mut acc = RatFunc::from_poly(Poly::constant(Ring::Params, -c.clone()));
            for (d, k) in deps {
                let term = values[d].mul(&RatFunc::from_poly(Poly::constant(Ring::Params, -k.clone())));
                acc = acc.add(&term);
            }
            values.insert(*param, acc);
            false
        });
        let mut failure = None;
        pending_assign.retain(|&a| {
            let (param, e) = &branch.assign[a];
            if !param_idents(e).iter().all(|d| values.contains_key(d)) {
                return true;
            }
            let bound: HashMap<String, RatFunc> =
                values.iter().map(|(&i, v)| (PARAM_NAMES[i].to_string(), v.clone())).collect();
            match eval_ratfunc_bound(e, Ring::Params, &bound) {
                Ok(v) => {
                    if values.insert(*param, v).is_some() {
                        failure = Some(format!("{} is assigned twice", PARAM_NAMES[*param]));
                    }
                }
                Err(err) => failure = Some(format!("assignment {} = {e}: {err}", PARAM_NAMES[*param])),
            }
            false
        });
        if let Some(f) = failure {
            return Err(infeasible(case, branch, f));
        }
        if values.len() == before {
            return Err(infeasible(case, branch, "dependent parameters cannot be resolved"));
        }
    }
    Ok(Parametrization { values: (0..9).map(|i| values.remove(&i).unwrap()).collect(), free })
}

fn bound_names(values: &[RatFunc]) -> HashMap<String, RatFunc> {
    values.iter().enumerate().map(|(i, v)| (PARAM_NAMES[i].to_string(), v.clone())).collect()
}

/// Substitutes the branch's parametrization into every condition and checks
/// the result is identically zero in the free parameters.
pub fn symbolic_parametrization_check(case: &CaseSpec, branch: &Branch) -> Result<(), CatalogError> {
    let par = resolve(case, branch)?;
    let bound = bound_names(&par.values);
    for e in &case.condition_exprs {
        let v = eval_ratfunc_bound(e, Ring::Params, &bound).map_err(|err| infeasible(case, branch, err.to_string()))?;
        if !v.is_zero() {
            return Err(infeasible(case, branch, format!("condition {e} does not vanish identically")));
        }
    }
    for e in &branch.nonzero {
        let v = eval_ratfunc_bound(e, Ring::Params, &bound).map_err(|err| infeasible(case, branch, err.to_string()))?;
        if v.is_zero() {
            return Err(infeasible(case, branch, format!("inequation {e} != 0 fails identically")));
        }
    }
    Ok(())
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    let mut n: i64 = rng.gen_range(1..=5);
    if rng.gen_bool(0.5) {
        n = -n;
    }
    Rational::new(n.into(), rng.gen_range(1i64..=3).into())
}

fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// A point on one branch, drawn from `seed`.
pub fn sample_branch(case: &CaseSpec, branch_index: usize, seed: u64) -> Result<[Rational; 9], CatalogError> {
    let branch = &case.branches[branch_index];
    let par = resolve(case, branch)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ label_hash(&case.label) ^ (branch_index as u64).rotate_left(32));
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let mut free_point = vec![Rational::zero(); 9];
        for &i in &par.free {
            free_point[i] = small_rational(&mut rng);
        }
        let mut point: [Rational; 9] = Default::default();
        for (i, v) in par.values.iter().enumerate() {
            let den = v.den.eval(&free_point);
            if den.is_zero() {
                continue 'attempt;
            }
            point[i] = v.num.eval(&free_point) / den;
        }
        let env = expr::env_from_point(&point);
        for e in &branch.nonzero {
            match expr::eval_const(e, &env) {
                Ok(v) if !v.is_zero() => {}
                _ => continue 'attempt,
            }
        }
        if let Some(p) = case.conditions.iter().find(|p| !p.eval(&point).is_zero()) {
            return Err(infeasible(case, branch, format!("sampled point violates condition {p}")));
        }
        return Ok(point);
    }
    Err(infeasible(case, branch, format!("no admissible point in {MAX_ATTEMPTS} draws")))
}

/// A point of the case's variety; the branch is chosen by the seed.
pub fn sample_case_point(case: &CaseSpec, seed: u64) -> Result<SampledPoint, CatalogError> {
    if case.branches.is_empty() {
        return Err(CatalogError::BranchInfeasible {
            label: case.label.clone(),
            tag: String::new(),
            reason: "case has no parametrization".into(),
        });
    }
    let branch = (seed % case.branches.len() as u64) as usize;
    Ok(SampledPoint { point: sample_branch(case, branch, seed)?, branch })
}
