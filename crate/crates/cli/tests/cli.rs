use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lvdarboux")).args(args).output().unwrap()
}

fn run_on(file: &str, args: &[&str]) -> Output {
    let path = data(file);
    let mut all = vec!["--system", path.to_str().unwrap()];
    all.extend_from_slice(args);
    run(&all)
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn verify_case_passes() {
    let o = run(&["verify-case", "--resonance", "1:-1:1", "--case", "T3.case2", "--samples", "5", "--order", "6", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["pass"], true);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["results"]["samples"].as_array().unwrap().len(), 5);
}

#[test]
fn verify_case_rejects_wrong_resonance() {
    let o = run(&["verify-case", "--resonance", "2:-1:1", "--case", "T3.case2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn xy_is_not_an_integral_of_the_all_ones_system() {
    let o = run_on("all_ones_1m11.toml", &["check", "--expr", "x*y", "--kind", "fi"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["results"]["holds"], false);
    assert_ne!(r["results"]["log_derivative"], "0");
}

#[test]
fn eigenfunction_check_passes() {
    let o = run_on("zero_1m11.toml", &["check", "--expr", "x^2*z", "--kind", "eig:3"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn dual_of_zero_system() {
    let o = run_on("zero_2m11.toml", &["dual"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("eigenvalues = [1, -1, 2]"), "{text}");
}

#[test]
fn emitted_systems_reparse() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = "label = \"mixed\"\neigenvalues = [1, -2, 1]\nmatrix = [[\"1/2\", 0, -3], [1, \"-5/7\", 1], [\"-7/3\", 0, 2]]\n";
    let a = dir.join("rt_a.toml");
    std::fs::write(&a, src).unwrap();
    let d1 = run(&["--system", a.to_str().unwrap(), "dual"]);
    let b = dir.join("rt_b.toml");
    std::fs::write(&b, &d1.stdout).unwrap();
    let d2 = run(&["--system", b.to_str().unwrap(), "dual"]);
    let c = dir.join("rt_c.toml");
    std::fs::write(&c, &d2.stdout).unwrap();
    // same system after two duals, read back through the parser
    let lin = |p: &PathBuf| json(&run(&["--system", p.to_str().unwrap(), "linearize", "--order", "3"]))["inputs"]["system"]["matrix"].clone();
    assert_eq!(lin(&a), lin(&c));
    assert_ne!(lin(&a), lin(&b));
}

#[test]
fn decimals_are_rejected_with_position() {
    let o = run_on("decimal.toml", &["linearize"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("decimal.toml:2:26"), "{err}");
}

#[test]
fn invalid_resonance_is_a_parse_error() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let p = dir.join("bad_res.toml");
    std::fs::write(&p, "eigenvalues = [1, 1, 1]\nmatrix = [[0,0,0],[0,0,0],[0,0,0]]\n").unwrap();
    let o = run(&["--system", p.to_str().unwrap(), "linearize"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("invalid resonance"));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify-case", "--resonance", "1:-2:1", "--case", "T5.case16", "--samples", "3", "--order", "8", "--seed", "4"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let one = Command::new(env!("CARGO_BIN_EXE_lvdarboux")).args(args).env("LVDARBOUX_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, one.stdout);
    let o1 = run_on("generic_1m11.toml", &["obstructions", "--target", "int", "--order", "6"]);
    let o2 = run_on("generic_1m11.toml", &["obstructions", "--target", "int", "--order", "6"]);
    assert_eq!(o1.stdout, o2.stdout);
}

#[test]
fn timing_is_opt_in() {
    let plain = json(&run(&["catalog", "--resonance", "1:-1:1"]));
    assert!(plain.get("timing_ms").is_none());
    let timed = json(&run(&["--timing", "catalog", "--resonance", "1:-1:1"]));
    assert!(timed["timing_ms"].is_u64());
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_lvdarboux")).args(["catalog"]).env("LVDARBOUX_THREADS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn catalog_counts() {
    let r = json(&run(&["catalog"]));
    assert_eq!(r["results"]["cases"].as_array().unwrap().len(), 56);
    assert_eq!(r["results"]["counts"]["1:-2:1"]["integrable"], 27);
    assert_eq!(r["results"]["counts"]["1:-2:1"]["linearizable_only"], 3);
    assert_eq!(run(&["catalog", "--resonance", "3:-1:1"]).status.code(), Some(2));
}

#[test]
fn obstructions_numeric_and_symbolic() {
    let o = run_on("generic_1m11.toml", &["obstructions", "--target", "int", "--order", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["results"]["first_nonzero"], "phi1 at (1,1,0): -1");
    let o = run_on("zero_1m11.toml", &["obstructions", "--target", "lin", "--order", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["obstructions", "--symbolic", "--resonance", "1:-1:1", "--target", "int", "--order", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let sets = json(&o)["results"]["sets"].clone();
    assert_eq!(sets[0]["entries"][0]["index"], "(1,1,0)");
    assert_eq!(run(&["obstructions", "--target", "int"]).status.code(), Some(2));
}

#[test]
fn series_integral_with_negative_exponents() {
    let o = run_on("zero_1m11.toml", &["series-integral", "--rho", "-1", "-1", "0", "--order", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["results"]["prefactor"], serde_json::json!(["-1", "-1", "0"]));
    let o = run_on("generic_1m11.toml", &["series-integral", "--rho", "1", "1", "0", "--order", "4"]);
    assert_eq!(o.status.code(), Some(1));
    // rho·eigenvalues != 0
    let o = run_on("generic_1m11.toml", &["series-integral", "--rho", "1", "0", "0", "--order", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn theorem1_and_combine() {
    let o = run_on("zero_1m11.toml", &["theorem1", "--phi", "x*y", "--m", "x^2*y^2*z", "--order", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["results"]["psi_prefactor"], serde_json::json!(["-1", "-1", "0"]));
    let o = run_on("all_ones_1m11.toml", &["theorem1", "--phi", "x*y", "--m", "x^2*y^2*z", "--order", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run_on("zero_1m11.toml", &["combine", "--atoms", "x", "y", "z", "--target", "zero"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["results"]["basis"].as_array().unwrap().len(), 2);
    let o = run_on("zero_1m11.toml", &["combine", "--atoms", "x", "y", "z", "--target", "div"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn text_format() {
    let o = run_on("generic_1m11.toml", &["--format", "text", "linearize", "--order", "4"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.ends_with("verdict: fail\n"), "{text}");
}
