//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Everything is exact rational arithmetic.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use lvdarboux::algebra::{int, rat, Rational};
use lvdarboux::catalog::{list_cases, get_case, sample_branch, verify_case, Catalog, CaseSpec, VerifyMode};
use lvdarboux::expr::env_from_point;
use lvdarboux::obstruction::{
    all_vanish, integrability_obstructions, integrability_obstructions_at, linearizability_obstructions_at,
    reduce_obstructions,
};
use lvdarboux::series::{resonant_series_integral, theorem1_construct, DiagonalField, ExponentVector};
use lvdarboux::{DarbouxFunction, LVSystem, Resonance};
use num_traits::{One, Zero};

type Outcome = Result<String, String>;

fn res(l: i64, m: i64, n: i64) -> Resonance {
    Resonance::new(l, m, n).unwrap()
}

fn sweep_order(r: Resonance) -> u32 {
    match r.eigenvalues() {
        [1, -1, 1] => 6,
        [2, -1, 1] => 10,
        _ => 12,
    }
}

fn catalog_sweep() -> Outcome {
    let mut failed = Vec::new();
    let mut samples = 0;
    for case in &Catalog::builtin().cases {
        let r = verify_case(case, sweep_order(case.resonance), 5, 0, VerifyMode::Both);
        samples += r.samples.len();
        if !r.pass {
            failed.push(case.label.clone());
        }
    }
    let n = Catalog::builtin().cases.len();
    if failed.is_empty() {
        Ok(format!("{n} cases, {samples} samples, orders 6/10/12"))
    } else {
        Err(format!("failing cases: {}", failed.join(", ")))
    }
}

fn symbolic_run() -> Outcome {
    let r = res(1, -1, 1);
    let t = Instant::now();
    let sets = integrability_obstructions(r, 6);
    let elapsed = t.elapsed();
    if elapsed.as_secs() >= 600 {
        return Err(format!("symbolic N=6 took {elapsed:?}"));
    }
    let cases: Vec<CaseSpec> = list_cases(r).unwrap().into_iter().filter(|c| c.kind.integrable()).collect();
    if cases.len() != 7 {
        return Err(format!("{} integrability cases", cases.len()));
    }
    let mut verdicts = Vec::new();
    for case in &cases {
        let red = reduce_obstructions(&sets, &case.conditions, || {
            (0..10).filter_map(|i| sample_branch(case, i % case.branches.len(), 1000 + i as u64).ok()).collect()
        })
        .map_err(|e| e.to_string())?;
        if !red.certified() {
            return Err(format!("{}: {}", case.label, red.verdict()));
        }
        verdicts.push(format!("{}: {}", case.label, red.verdict()));
    }
    let membership = verdicts.iter().filter(|v| v.ends_with("zero by membership")).count();
    Ok(format!("N=6 in {:.1}s; {membership}/7 zero by membership", elapsed.as_secs_f64()))
}

fn theorem1_case7() -> Outcome {
    let case = get_case("T4.case7").unwrap();
    let order = 8;
    let expected_psi = [rat(-3, 2), int(-2), int(1)];
    let mut checked = 0;
    for (bi, b) in case.branches.iter().enumerate() {
        let point = sample_branch(&case, bi, 17).map_err(|e| e.to_string())?;
        let sys = LVSystem::from_point(case.resonance, &point);
        let env = env_from_point(&point);
        // phi and M as stored in the branch's theorem-1 certificate
        let (phi, m) = match b.tag.as_str() {
            "a!=0" => (
                "x^(-1)*y^(-1)*z*(1 + (a/2)*x)^((d - g + a)/a)",
                "x^(5/2)*y^3*(1 + (a/2)*x)^(-1/2 - 2*d/a + g/a)",
            ),
            _ => ("x^(-1)*y^(-1)*z*exp((d - g)*x/2)", "x^(5/2)*y^3*exp((g/2 - d)*x)"),
        };
        let phi = DarbouxFunction::parse(phi, &env).map_err(|e| e.to_string())?;
        let m = DarbouxFunction::parse(m, &env).map_err(|e| e.to_string())?;
        let t1 = theorem1_construct(&sys, &phi, &m, order).map_err(|e| e.to_string())?;
        if t1.psi.prefactor != expected_psi {
            return Err(format!("{}: psi prefactor {:?}", b.tag, t1.psi.prefactor));
        }
        if !t1.psi.is_obstruction_free() {
            return Err(format!("{}: psi obstructed", b.tag));
        }
        // phi^2 psi^-2 = x y^2 (1 + ...)
        let pu = phi.unit_series(order).map_err(|e| e.to_string())?;
        let qi = t1.psi.u.inverse().map_err(|e| e.to_string())?;
        let unit = pu.try_mul(&pu).and_then(|s| s.try_mul(&qi)).and_then(|s| s.try_mul(&qi)).map_err(|e| e.to_string())?;
        let pre: [Rational; 3] = std::array::from_fn(|j| int(2) * (&phi.monomial[j] - &t1.psi.prefactor[j]));
        if pre != [int(1), int(2), int(0)] || !unit.constant_term().is_one() {
            return Err(format!("{}: product has prefactor {pre:?}", b.tag));
        }
        let residual = DiagonalField::from_system(&sys).residual(&pre, &Rational::zero(), &unit);
        if !residual.is_zero() {
            return Err(format!("{}: residual of phi^2 psi^-2 nonzero", b.tag));
        }
        checked += 1;
    }
    Ok(format!("psi = x^(-3/2) y^(-2) z (1+...), phi^2 psi^-2 = x y^2 (1+...) exact through order {order} on {checked} branches"))
}

fn separation() -> Outcome {
    let case1 = get_case("T3.case1").unwrap();
    let lin: Vec<CaseSpec> = ["T3.case1.1", "T3.case1.2", "T3.case1.2*", "T3.case1.3"].iter().map(|l| get_case(l).unwrap()).collect();
    for seed in 0..50 {
        let p = sample_branch(&case1, 0, seed).map_err(|e| e.to_string())?;
        if lin.iter().any(|c| c.conditions.iter().all(|q| q.eval(&p).is_zero())) {
            continue;
        }
        let sys = LVSystem::from_point(case1.resonance, &p);
        if !all_vanish(&integrability_obstructions_at(&sys, 6)) {
            return Err(format!("seed {seed}: integrability obstruction nonzero"));
        }
        let lin_sets = linearizability_obstructions_at(&sys, 6);
        return match lin_sets.iter().find_map(|s| s.first_nonzero().map(|(i, c)| (s.target, *i, c.clone()))) {
            Some((t, i, c)) => Ok(format!("seed {seed}: integrable, {t} obstructed at {i} ({c})")),
            None => Err(format!("seed {seed}: no linearizability obstruction by order 6")),
        };
    }
    Err("no sample outside the linearizable subcases".into())
}

fn negative_control() -> Outcome {
    let hits = (0..20)
        .filter(|&s| !all_vanish(&integrability_obstructions_at(&common::random_system(res(1, -1, 1), 5000 + s), 4)))
        .count();
    if hits >= 19 {
        Ok(format!("{hits}/20 obstructed by order 4"))
    } else {
        Err(format!("only {hits}/20 obstructed"))
    }
}

fn oracle() -> Outcome {
    let rs = [res(1, -1, 1), res(2, -1, 1), res(1, -2, 1)];
    let mut coeffs = 0;
    for s in 0..20u64 {
        let r = rs[s as usize % 3];
        let sys = common::random_system(r, 9000 + s);
        let [l, m, n] = r.eigenvalues();
        for rho in [[int(-m), int(l), int(0)], [int(0), int(n), int(-m)]] {
            let got = resonant_series_integral(&sys, &rho, 4).map_err(|e| e.to_string())?;
            let (u, obs) = common::dense_oracle(&sys, &rho, 4);
            let got_obs: BTreeMap<ExponentVector, Rational> = got.obstructions.into_iter().collect();
            if got.u != u || got_obs != obs {
                return Err(format!("system {s} ({r}) differs from the oracle"));
            }
            coeffs += u.num_terms() + obs.len();
        }
    }
    Ok(format!("20 systems, {coeffs} coefficients equal"))
}

fn full_check(sys: &LVSystem, order: u32, linearizable: bool) -> bool {
    all_vanish(&integrability_obstructions_at(sys, order))
        && (!linearizable || all_vanish(&linearizability_obstructions_at(sys, order)))
}

fn duality() -> Outcome {
    let order = 12;
    let mut points = 0;
    let mut passing = 0;
    for case in list_cases(res(1, -2, 1)).unwrap() {
        for i in 0..5u64 {
            let p = sample_branch(&case, i as usize % case.branches.len(), i).map_err(|e| e.to_string())?;
            let mut q = p.clone();
            q[(i as usize * 4 + 1) % 9] += Rational::one();
            for pt in [p, q] {
                let sys = LVSystem::from_point(case.resonance, &pt);
                let a = full_check(&sys, order, case.kind.linearizable());
                let b = full_check(&sys.dual_transform(), order, case.kind.linearizable());
                if a != b {
                    return Err(format!("{} sample {i}: {a} vs dual {b}", case.label));
                }
                points += 1;
                passing += a as usize;
            }
        }
    }
    Ok(format!("{points} points ({passing} passing) agree with their duals at order {order}"))
}

fn kernels() -> Outcome {
    let trials = 1000;
    common::ring_axioms(trials)?;
    common::groebner_s_pairs(trials)?;
    common::normal_form_idempotence(trials)?;
    common::homological_residuals(trials)?;
    Ok(format!("4 suites x {trials} trials"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("catalog sufficiency sweep", catalog_sweep),
        ("symbolic (1,-1,1) run", symbolic_run),
        ("theorem-1 reproduction (2,-1,1) case 7", theorem1_case7),
        ("integrable/linearizable separation", separation),
        ("negative control", negative_control),
        ("oracle equivalence", oracle),
        ("duality", duality),
        ("kernel property suites", kernels),
    ];
    let mut ok = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("criterion {}: PASS  {name}: {msg} [{secs:.1}s]", i + 1),
            Err(msg) => {
                ok = false;
                println!("criterion {}: FAIL  {name}: {msg} [{secs:.1}s]", i + 1);
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
