//! TOML system descriptions:
//!
//! ```toml
//! label = "all ones"
//! eigenvalues = [1, -1, 1]
//! matrix = [["1", "1", "1"], ["1", "1", "1"], ["1", "1", "1"]]
//! ```
//!
//! Row `m` holds the coefficients of `x, y, z` in the cofactor of the m-th
//! coordinate. Entries are integers or strings `"p/q"`; decimals are refused.

use std::fmt;

use lvdarboux::algebra::rational::format_rational;
use lvdarboux::algebra::{parse_rational, Rational};
use lvdarboux::LVSystem;
use serde::Deserialize;
use toml::Spanned;

#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Float(f64),
    Str(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    label: Option<String>,
    eigenvalues: Spanned<Vec<i64>>,
    matrix: Spanned<Vec<Spanned<Vec<Spanned<Entry>>>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemFile {
    pub label: Option<String>,
    pub system: LVSystem,
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn error_at(src: &str, offset: usize, message: impl Into<String>) -> ParseError {
    let (line, column) = position(src, offset);
    ParseError { line, column, message: message.into() }
}

pub fn parse_system(src: &str) -> Result<SystemFile, ParseError> {
    let raw: Raw = toml::from_str(src).map_err(|e| {
        let offset = e.span().map_or(0, |s| s.start);
        error_at(src, offset, e.message().to_string())
    })?;
    let eig = raw.eigenvalues.get_ref();
    if eig.len() != 3 {
        return Err(error_at(src, raw.eigenvalues.span().start, format!("expected 3 eigenvalues, got {}", eig.len())));
    }
    let rows = raw.matrix.get_ref();
    if rows.len() != 3 {
        return Err(error_at(src, raw.matrix.span().start, format!("matrix needs 3 rows, got {}", rows.len())));
    }
    let mut matrix: [[Rational; 3]; 3] = Default::default();
    for (m, row) in rows.iter().enumerate() {
        if row.get_ref().len() != 3 {
            return Err(error_at(src, row.span().start, format!("row {} needs 3 entries", m + 1)));
        }
        for (n, entry) in row.get_ref().iter().enumerate() {
            let at = entry.span().start;
            matrix[m][n] = match entry.get_ref() {
                Entry::Int(i) => Rational::from_integer((*i).into()),
                Entry::Float(v) => {
                    return Err(error_at(src, at, format!("decimal {v} not allowed; write an exact rational such as \"1/2\"")))
                }
                Entry::Str(s) => parse_rational(s).map_err(|_| {
                    let hint = if s.contains('.') { "; decimals are not allowed, write \"p/q\"" } else { "" };
                    error_at(src, at, format!("bad rational {s:?}{hint}"))
                })?,
            };
        }
    }
    let system = LVSystem::from_eigenvalues([eig[0], eig[1], eig[2]], matrix)
        .map_err(|e| error_at(src, raw.eigenvalues.span().start, e.to_string()))?;
    Ok(SystemFile { label: raw.label, system })
}

/// TOML text that `parse_system` reads back to the same system.
pub fn emit_system(sys: &LVSystem, label: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(l) = label {
        out.push_str(&format!("label = {}\n", toml::Value::String(l.to_string())));
    }
    let [l, m, n] = sys.eigenvalues();
    out.push_str(&format!("eigenvalues = [{l}, {m}, {n}]\nmatrix = [\n"));
    for row in sys.matrix() {
        let cells: Vec<String> = row.iter().map(|r| format!("\"{}\"", format_rational(r))).collect();
        out.push_str(&format!("  [{}],\n", cells.join(", ")));
    }
    out.push_str("]\n");
    out
}
