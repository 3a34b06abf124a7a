mod system_file;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use lvdarboux::algebra::rational::format_rational;
use lvdarboux::algebra::{parse_rational, Rational};
use lvdarboux::catalog::{get_case, list_cases, verify_case, Catalog, CaseSpec, VerifyMode};
use lvdarboux::expr::env_from_point;
use lvdarboux::obstruction::{
    all_vanish, integrability_obstructions, integrability_obstructions_at, linearizability_obstructions,
    linearizability_obstructions_at, ObstructionSet,
};
use lvdarboux::series::{
    format_triple, linearize_system, resonant_series_integral, theorem1_construct, RatSeries, SeriesError,
};
use lvdarboux::{find_darboux_combination, CombinationTarget, DarbouxFunction, LVSystem, LvError, RelationKind, Resonance};
use num_traits::Zero;
use serde_json::{json, Value};

use system_file::{emit_system, parse_system, SystemFile};

#[derive(Parser)]
#[command(name = "lvdarboux", version, about = "Integrability and linearizability checks for resonant 3D Lotka-Volterra systems")]
struct Cli {
    /// System description (TOML with `eigenvalues` and `matrix`).
    #[arg(long, global = true)]
    system: Option<PathBuf>,
    /// Add wall-clock timing to the report (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Int,
    Lin,
}

#[derive(Clone, Copy, ValueEnum)]
enum CombineTarget {
    Zero,
    Div,
}

#[derive(Subcommand)]
enum Command {
    /// Forced values of resonant coefficients, at the system or symbolically.
    Obstructions {
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long)]
        order: Option<u32>,
        /// Over the ring of the nine parameters instead of at the system.
        #[arg(long)]
        symbolic: bool,
        /// Resonance for `--symbolic` runs without a system file.
        #[arg(long)]
        resonance: Option<Resonance>,
    },
    /// Series first integral x^r1 y^r2 z^r3 (1 + ...).
    SeriesIntegral {
        #[arg(long, num_args = 3, allow_hyphen_values = true, value_names = ["R1", "R2", "R3"])]
        rho: Vec<String>,
        #[arg(long)]
        order: Option<u32>,
    },
    /// Checks a Darboux function as first integral, inverse Jacobi multiplier or eigenfunction.
    Check {
        #[arg(long)]
        expr: String,
        /// fi, ijm or eig:K
        #[arg(long)]
        kind: RelationKind,
    },
    /// Exponents making a product of Darboux atoms a first integral or an inverse Jacobi multiplier.
    Combine {
        #[arg(long, num_args = 1.., required = true)]
        atoms: Vec<String>,
        #[arg(long, value_enum)]
        target: CombineTarget,
    },
    /// Second first integral from a first integral and an inverse Jacobi multiplier.
    Theorem1 {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        m: String,
        #[arg(long)]
        order: Option<u32>,
    },
    /// Formal linearizing coordinates X = x(1 + ...), Y, Z.
    Linearize {
        #[arg(long)]
        order: Option<u32>,
    },
    /// Samples points of a catalog case and verifies them.
    VerifyCase {
        #[arg(long)]
        resonance: Resonance,
        #[arg(long)]
        case: String,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "both")]
        mode: VerifyMode,
    },
    /// Lists the cases of a resonance (all cases without `--resonance`).
    Catalog {
        #[arg(long)]
        resonance: Option<Resonance>,
    },
    /// Prints the system under (x, y, z) -> (z, y, x) as a system file.
    Dual,
}

struct Outcome {
    inputs: Value,
    results: Value,
    summary: Vec<String>,
    seed: Option<u64>,
    pass: bool,
}

impl Outcome {
    fn new(inputs: Value, results: Value, pass: bool, summary: Vec<String>) -> Self {
        Outcome { inputs, results, summary, seed: None, pass }
    }
}

/// Usage, input or parse problems: exit code 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn load_system(path: &Option<PathBuf>) -> Result<SystemFile, UsageError> {
    let path = path.as_ref().ok_or_else(|| UsageError("this command needs --system FILE".into()))?;
    let src = std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    parse_system(&src).map_err(|e| UsageError(format!("{}:{e}", path.display())))
}

fn rat_str(r: &Rational) -> String {
    format_rational(r)
}

fn system_json(f: &SystemFile) -> Value {
    json!({
        "label": f.label,
        "eigenvalues": f.system.eigenvalues(),
        "matrix": f.system.matrix().iter().map(|row| row.iter().map(rat_str).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn series_json(u: &RatSeries) -> Value {
    Value::Array(u.terms().map(|(i, c)| json!({"index": i.to_string(), "value": rat_str(c)})).collect())
}

fn numeric_sets_json(sets: &[ObstructionSet<Rational>]) -> Value {
    Value::Array(
        sets.iter()
            .map(|s| {
                json!({
                    "target": s.target.to_string(),
                    "all_zero": s.all_zero(),
                    "entries": s.entries.iter().map(|(i, c)| json!({"index": i.to_string(), "value": rat_str(c)})).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn order_or_default(order: Option<u32>, r: Resonance) -> u32 {
    order.unwrap_or_else(|| r.default_order())
}

fn obstructions(
    sys: Result<SystemFile, UsageError>,
    target: Target,
    order: Option<u32>,
    symbolic: bool,
    resonance: Option<Resonance>,
) -> Result<Outcome, UsageError> {
    let tname = match target {
        Target::Int => "int",
        Target::Lin => "lin",
    };
    if symbolic {
        let (r, inputs) = match (resonance, sys) {
            (Some(r), _) => (r, json!({"resonance": r.to_string()})),
            (None, Ok(f)) => (f.system.resonance(), json!({"resonance": f.system.resonance().to_string()})),
            (None, Err(e)) => return Err(UsageError(format!("{} (or give --resonance)", e.0))),
        };
        let n = order_or_default(order, r);
        let sets = match target {
            Target::Int => integrability_obstructions(r, n),
            Target::Lin => linearizability_obstructions(r, n),
        };
        let mut summary = Vec::new();
        let json_sets: Vec<Value> = sets
            .iter()
            .map(|s| {
                let nonzero = s.entries.iter().filter(|(_, p)| !p.is_zero()).count();
                summary.push(format!("{}: {} resonant entries, {nonzero} nonzero", s.target, s.entries.len()));
                let entries: Vec<Value> = s
                    .entries
                    .iter()
                    .zip(s.primitive_entries())
                    .map(|((i, p), (_, q))| json!({"index": i.to_string(), "polynomial": p.to_string(), "normal_form": q.to_string()}))
                    .collect();
                json!({"target": s.target.to_string(), "entries": entries})
            })
            .collect();
        let mut inputs = inputs;
        inputs["target"] = json!(tname);
        inputs["order"] = json!(n);
        inputs["symbolic"] = json!(true);
        return Ok(Outcome::new(inputs, json!({ "sets": json_sets }), true, summary));
    }
    let f = sys?;
    let n = order_or_default(order, f.system.resonance());
    let sets = match target {
        Target::Int => integrability_obstructions_at(&f.system, n),
        Target::Lin => linearizability_obstructions_at(&f.system, n),
    };
    let pass = all_vanish(&sets);
    let first = sets.iter().find_map(|s| s.first_nonzero().map(|(i, c)| format!("{} at {i}: {}", s.target, rat_str(c))));
    let summary = vec![match &first {
        None => format!("all {tname} obstructions vanish through order {n}"),
        Some(s) => format!("first nonzero obstruction: {s}"),
    }];
    let inputs = json!({"system": system_json(&f), "target": tname, "order": n});
    let results = json!({"sets": numeric_sets_json(&sets), "all_zero": pass, "first_nonzero": first});
    Ok(Outcome::new(inputs, results, pass, summary))
}

fn series_integral(f: SystemFile, rho: &[String], order: Option<u32>) -> Result<Outcome, UsageError> {
    let rho: Vec<Rational> = rho.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?;
    let rho: [Rational; 3] = [rho[0].clone(), rho[1].clone(), rho[2].clone()];
    let n = order_or_default(order, f.system.resonance());
    let r = resonant_series_integral(&f.system, &rho, n)?;
    let pass = r.is_obstruction_free();
    let first = r.first_nonzero_obstruction().map(|(i, c)| format!("{i}: {}", rat_str(c)));
    let summary = vec![
        format!("prefactor x^r y^s z^t with (r, s, t) = {}", format_triple(&r.prefactor)),
        match &first {
            None => format!("no obstruction through order {n}"),
            Some(s) => format!("first nonzero obstruction at {s}"),
        },
    ];
    let inputs = json!({"system": system_json(&f), "rho": rho.iter().map(rat_str).collect::<Vec<_>>(), "order": n});
    let results = json!({
        "prefactor": r.prefactor.iter().map(rat_str).collect::<Vec<_>>(),
        "coefficients": series_json(&r.u),
        "obstructions": r.obstructions.iter().map(|(i, c)| json!({"index": i.to_string(), "value": rat_str(c)})).collect::<Vec<_>>(),
        "obstruction_free": pass,
        "first_nonzero": first,
    });
    Ok(Outcome::new(inputs, results, pass, summary))
}

fn parse_darboux(src: &str, sys: &LVSystem) -> Result<DarbouxFunction, UsageError> {
    DarbouxFunction::parse(src, &env_from_point(&sys.point())).map_err(|e| UsageError(format!("{src:?}: {e}")))
}

fn check(f: SystemFile, expr: &str, kind: &RelationKind) -> Result<Outcome, UsageError> {
    let d = parse_darboux(expr, &f.system)?;
    let inputs = json!({"system": system_json(&f), "expr": expr, "kind": kind.to_string()});
    let expected = match kind {
        RelationKind::FirstIntegral => "0".to_string(),
        RelationKind::InverseJacobiMultiplier => f.system.divergence().to_string(),
        RelationKind::Eigenfunction(k) => rat_str(k),
    };
    match d.log_derivative(&f.system) {
        Ok(ld) => {
            let holds = d.verify_relation(&f.system, kind)?;
            let summary = vec![format!("X(F)/F = {ld}, expected {expected}: {}", if holds { "holds" } else { "fails" })];
            let results = json!({"function": d.to_string(), "log_derivative": ld.to_string(), "expected": expected, "holds": holds});
            Ok(Outcome::new(inputs, results, holds, summary))
        }
        Err(e @ (LvError::NotInvariant { .. } | LvError::ExpPartNotPolynomial | LvError::CofactorDegree(_))) => {
            let results = json!({"function": d.to_string(), "expected": expected, "holds": false, "error": e.to_string()});
            Ok(Outcome::new(inputs, results, false, vec![e.to_string()]))
        }
        Err(e) => Err(e.into()),
    }
}

fn combine(f: SystemFile, atoms: &[String], target: CombineTarget) -> Result<Outcome, UsageError> {
    let parsed: Vec<DarbouxFunction> = atoms.iter().map(|a| parse_darboux(a, &f.system)).collect::<Result<_, _>>()?;
    let (t, tname) = match target {
        CombineTarget::Zero => (CombinationTarget::Zero, "zero"),
        CombineTarget::Div => (CombinationTarget::Divergence, "div"),
    };
    let inputs = json!({"system": system_json(&f), "atoms": atoms, "target": tname});
    match find_darboux_combination(&f.system, &parsed, t) {
        Ok(sol) => {
            let found = sol.is_some();
            let vectors: Vec<Vec<String>> =
                sol.unwrap_or_default().iter().map(|v| v.iter().map(rat_str).collect()).collect();
            let summary = if found {
                vectors.iter().map(|v| format!("exponents ({})", v.join(", "))).collect()
            } else {
                vec!["no combination".to_string()]
            };
            let cofactors: Vec<String> =
                parsed.iter().map(|a| a.log_derivative(&f.system).map(|p| p.to_string()).unwrap_or_default()).collect();
            let key = if tname == "zero" { "basis" } else { "solution" };
            let results = json!({"cofactors": cofactors, key: vectors, "found": found});
            Ok(Outcome::new(inputs, results, found, summary))
        }
        Err(e @ LvError::NotInvariant { .. }) => {
            Ok(Outcome::new(inputs, json!({"found": false, "error": e.to_string()}), false, vec![e.to_string()]))
        }
        Err(e) => Err(e.into()),
    }
}

fn theorem1(f: SystemFile, phi: &str, m: &str, order: Option<u32>) -> Result<Outcome, UsageError> {
    let n = order_or_default(order, f.system.resonance());
    let pd = parse_darboux(phi, &f.system)?;
    let md = parse_darboux(m, &f.system)?;
    let inputs = json!({"system": system_json(&f), "phi": phi, "m": m, "order": n});
    match theorem1_construct(&f.system, &pd, &md, n) {
        Ok(r) => {
            let pass = r.psi.is_obstruction_free();
            let summary = vec![
                format!("psi = x^r y^s z^t (1 + ...) with (r, s, t) = {}", format_triple(&r.psi.prefactor)),
                format!("independent prefactors: {}; obstruction-free through order {n}: {pass}", r.independent),
            ];
            let results = json!({
                "delta": r.delta.iter().map(rat_str).collect::<Vec<_>>(),
                "theta": r.theta.iter().map(rat_str).collect::<Vec<_>>(),
                "psi_prefactor": r.psi.prefactor.iter().map(rat_str).collect::<Vec<_>>(),
                "psi_coefficients": series_json(&r.psi.u),
                "obstructions": r.psi.obstructions.iter().map(|(i, c)| json!({"index": i.to_string(), "value": rat_str(c)})).collect::<Vec<_>>(),
                "exceptional": r.exceptional.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
                "independent": r.independent,
                "obstruction_free": pass,
            });
            Ok(Outcome::new(inputs, results, pass, summary))
        }
        Err(e @ (SeriesError::PreconditionViolated(_) | SeriesError::HypothesisFailed(_))) => {
            Ok(Outcome::new(inputs, json!({"error": e.to_string(), "obstruction_free": false}), false, vec![e.to_string()]))
        }
        Err(e) => Err(e.into()),
    }
}

fn linearize(f: SystemFile, order: Option<u32>) -> Result<Outcome, UsageError> {
    let n = order_or_default(order, f.system.resonance());
    let r = linearize_system(&f.system, n);
    let pass = r.is_obstruction_free();
    let names = ["X", "Y", "Z"];
    let coords: Vec<Value> = (0..3)
        .map(|m| {
            let obs: Vec<Value> = r
                .obstructions
                .iter()
                .filter(|(c, _, _)| *c == m)
                .map(|(_, i, c)| json!({"index": i.to_string(), "value": rat_str(c)}))
                .collect();
            json!({"coordinate": names[m], "unit": series_json(&r.u[m]), "obstructions": obs})
        })
        .collect();
    let first = r.obstructions.iter().find(|(_, _, c)| !c.is_zero());
    let summary = vec![match first {
        None => format!("linearizing coordinates exist through order {n}"),
        Some((m, i, c)) => format!("{} obstructed at {i}: {}", names[*m], rat_str(c)),
    }];
    let inputs = json!({"system": system_json(&f), "order": n});
    Ok(Outcome::new(inputs, json!({"coordinates": coords, "obstruction_free": pass}), pass, summary))
}

fn verify(
    resonance: Resonance,
    label: &str,
    samples: usize,
    order: Option<u32>,
    seed: u64,
    mode: VerifyMode,
) -> Result<Outcome, UsageError> {
    let case = get_case(label)?;
    if case.resonance != resonance {
        return Err(UsageError(format!("{label} belongs to resonance {}, not {resonance}", case.resonance)));
    }
    let n = order_or_default(order, resonance);
    let report = verify_case(&case, n, samples, seed, mode);
    let mut summary: Vec<String> = report
        .samples
        .iter()
        .map(|s| {
            let why = s.error.clone().or_else(|| s.first_nonzero_obstruction.clone()).unwrap_or_default();
            format!("sample {} [{}]: {} {why}", s.index, s.branch.as_deref().unwrap_or("-"), if s.pass { "pass" } else { "FAIL" })
        })
        .collect();
    summary.insert(0, format!("{case}"));
    let inputs = json!({"resonance": resonance.to_string(), "case": label, "samples": samples, "order": n, "mode": mode});
    let mut o = Outcome::new(inputs, serde_json::to_value(&report)?, report.pass, summary);
    o.seed = Some(seed);
    Ok(o)
}

fn case_json(c: &CaseSpec) -> Value {
    json!({
        "label": c.label,
        "resonance": c.resonance.to_string(),
        "kind": c.kind,
        "conditions": c.condition_exprs.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "dual_of": c.dual_of,
        "provenance": c.provenance,
        "note": c.note,
        "branches": c.branches.iter().map(|b| json!({
            "tag": b.tag,
            "certificates": b.certificates.len(),
            "provenance": b.provenance,
        })).collect::<Vec<_>>(),
    })
}

fn catalog(resonance: Option<Resonance>) -> Result<Outcome, UsageError> {
    let cases = match resonance {
        Some(r) => list_cases(r)?,
        None => Catalog::builtin().cases.clone(),
    };
    let summary = cases.iter().map(|c| format!("{c}")).collect();
    let inputs = json!({"resonance": resonance.map(|r| r.to_string())});
    let mut counts = serde_json::Map::new();
    for r in Catalog::builtin().resonances() {
        if resonance.is_none_or(|q| q == r) {
            let (i, l) = Catalog::builtin().counts(r);
            counts.insert(r.to_string(), json!({"integrable": i, "linearizable_only": l}));
        }
    }
    let results = json!({"cases": cases.iter().map(case_json).collect::<Vec<_>>(), "counts": counts});
    Ok(Outcome::new(inputs, results, true, summary))
}

fn run(cli: &Cli) -> Result<Option<Outcome>, UsageError> {
    let outcome = match &cli.command {
        Command::Obstructions { target, order, symbolic, resonance } => {
            obstructions(load_system(&cli.system), *target, *order, *symbolic, *resonance)?
        }
        Command::SeriesIntegral { rho, order } => series_integral(load_system(&cli.system)?, rho, *order)?,
        Command::Check { expr, kind } => check(load_system(&cli.system)?, expr, kind)?,
        Command::Combine { atoms, target } => combine(load_system(&cli.system)?, atoms, *target)?,
        Command::Theorem1 { phi, m, order } => theorem1(load_system(&cli.system)?, phi, m, *order)?,
        Command::Linearize { order } => linearize(load_system(&cli.system)?, *order)?,
        Command::VerifyCase { resonance, case, samples, order, seed, mode } => {
            verify(*resonance, case, *samples, *order, *seed, *mode)?
        }
        Command::Catalog { resonance } => catalog(*resonance)?,
        Command::Dual => {
            let f = load_system(&cli.system)?;
            let label = f.label.as_ref().map(|l| format!("dual of {l}"));
            emit(&emit_system(&f.system.dual_transform(), label.as_deref()));
            return Ok(None);
        }
    };
    Ok(Some(outcome))
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

fn configure_threads() -> Result<(), UsageError> {
    if let Ok(v) = std::env::var("LVDARBOUX_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| UsageError(format!("LVDARBOUX_THREADS={v:?} is not a number")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = configure_threads().and_then(|_| run(&cli));
    let outcome = match result {
        Ok(Some(o)) => o,
        Ok(None) => return ExitCode::SUCCESS,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match cli.format {
        Format::Json => {
            let argv: Vec<String> = std::env::args().skip(1).collect();
            let mut report = json!({
                "tool": "lvdarboux",
                "version": env!("CARGO_PKG_VERSION"),
                "command": argv,
                "inputs": outcome.inputs,
                "seed": outcome.seed,
                "results": outcome.results,
                "pass": outcome.pass,
            });
            if cli.timing {
                report["timing_ms"] = json!(start.elapsed().as_millis() as u64);
            }
            emit(&format!("{}\n", serde_json::to_string_pretty(&report).expect("report serializes")));
        }
        Format::Text => {
            let mut text: String = outcome.summary.iter().map(|l| format!("{l}\n")).collect();
            if cli.timing {
                text.push_str(&format!("time: {} ms\n", start.elapsed().as_millis()));
            }
            text.push_str(&format!("verdict: {}\n", if outcome.pass { "pass" } else { "fail" }));
            emit(&text);
        }
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
