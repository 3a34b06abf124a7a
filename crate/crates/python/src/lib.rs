//! Python module `lvdarboux`. Rationals cross the boundary as strings
//! such as `"-3/2"`; a system is `(eigenvalues, matrix)` with `matrix` a
//! 3x3 nested list.

use lvdarboux::algebra::rational::format_rational;
use lvdarboux::algebra::{parse_rational, Rational};
use lvdarboux::catalog::{get_case, list_cases as catalog_cases, verify_case as verify, VerifyMode};
use lvdarboux::expr::env_from_point;
use lvdarboux::obstruction::{integrability_obstructions_at, linearizability_obstructions_at};
use lvdarboux::series::resonant_series_integral;
use lvdarboux::{DarbouxFunction, LVSystem, RelationKind, Resonance};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

type Matrix = [[String; 3]; 3];
type Index = (u32, u32, u32);
type Coefficients = Vec<(Index, String)>;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(s: &str) -> PyResult<Rational> {
    parse_rational(s).map_err(value_err)
}

fn system(eigenvalues: [i64; 3], matrix: &Matrix) -> PyResult<LVSystem> {
    let mut m: [[Rational; 3]; 3] = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = rational(&matrix[i][j])?;
        }
    }
    LVSystem::from_eigenvalues(eigenvalues, m).map_err(value_err)
}

fn resonance(s: &str) -> PyResult<Resonance> {
    s.parse().map_err(value_err)
}

/// Resonant coefficients `(target, (i, j, k), value)` through `order`;
/// `target` is "int" or "lin".
#[pyfunction]
#[pyo3(signature = (eigenvalues, matrix, target = "int", order = None))]
fn obstructions(
    eigenvalues: [i64; 3],
    matrix: Matrix,
    target: &str,
    order: Option<u32>,
) -> PyResult<Vec<(String, Index, String)>> {
    let sys = system(eigenvalues, &matrix)?;
    let n = order.unwrap_or_else(|| sys.resonance().default_order());
    let sets = match target {
        "int" => integrability_obstructions_at(&sys, n),
        "lin" => linearizability_obstructions_at(&sys, n),
        _ => return Err(value_err(format!("target must be \"int\" or \"lin\", got {target:?}"))),
    };
    Ok(sets
        .iter()
        .flat_map(|s| s.entries.iter().map(move |(i, c)| (s.target.to_string(), (i.0[0], i.0[1], i.0[2]), format_rational(c))))
        .collect())
}

/// Coefficients of `u` in `x^rho (1 + u)` and the resonant obstructions.
#[pyfunction]
fn series_integral(
    eigenvalues: [i64; 3],
    matrix: Matrix,
    rho: [String; 3],
    order: u32,
) -> PyResult<(Coefficients, Coefficients)> {
    let sys = system(eigenvalues, &matrix)?;
    let rho = [rational(&rho[0])?, rational(&rho[1])?, rational(&rho[2])?];
    let r = resonant_series_integral(&sys, &rho, order).map_err(value_err)?;
    let coeffs = r.u.terms().map(|(i, c)| ((i.0[0], i.0[1], i.0[2]), format_rational(c))).collect();
    let obs = r.obstructions.iter().map(|(i, c)| ((i.0[0], i.0[1], i.0[2]), format_rational(c))).collect();
    Ok((coeffs, obs))
}

/// Whether `expr` is a first integral ("fi"), an inverse Jacobi multiplier
/// ("ijm") or an eigenfunction ("eig:K").
#[pyfunction]
fn check(eigenvalues: [i64; 3], matrix: Matrix, expr: &str, kind: &str) -> PyResult<bool> {
    let sys = system(eigenvalues, &matrix)?;
    let kind: RelationKind = kind.parse().map_err(value_err)?;
    let f = DarbouxFunction::parse(expr, &env_from_point(&sys.point())).map_err(value_err)?;
    f.verify_relation(&sys, &kind).map_err(value_err)
}

/// The system under `(x, y, z) -> (z, y, x)`.
#[pyfunction]
fn dual(eigenvalues: [i64; 3], matrix: Matrix) -> PyResult<([i64; 3], Vec<Vec<String>>)> {
    let d = system(eigenvalues, &matrix)?.dual_transform();
    let m = d.matrix().iter().map(|row| row.iter().map(format_rational).collect()).collect();
    Ok((d.eigenvalues(), m))
}

/// Case labels of a resonance given as "L:M:N".
#[pyfunction]
fn list_cases(res: &str) -> PyResult<Vec<String>> {
    Ok(catalog_cases(resonance(res)?).map_err(value_err)?.into_iter().map(|c| c.label).collect())
}

/// Runs the sampled verification of a catalog case; returns the verdict
/// and the full report as JSON text.
#[pyfunction]
#[pyo3(signature = (label, samples = 5, order = None, seed = 0, mode = "both"))]
fn verify_case(label: &str, samples: usize, order: Option<u32>, seed: u64, mode: &str) -> PyResult<(bool, String)> {
    let case = get_case(label).map_err(value_err)?;
    let mode: VerifyMode = mode.parse().map_err(value_err)?;
    let n = order.unwrap_or_else(|| case.resonance.default_order());
    let report = verify(&case, n, samples, seed, mode);
    Ok((report.pass, serde_json::to_string(&report).map_err(value_err)?))
}

#[pymodule]
#[pyo3(name = "lvdarboux")]
fn lvdarboux_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(obstructions, m)?)?;
    m.add_function(wrap_pyfunction!(series_integral, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(dual, m)?)?;
    m.add_function(wrap_pyfunction!(list_cases, m)?)?;
    m.add_function(wrap_pyfunction!(verify_case, m)?)?;
    Ok(())
}
