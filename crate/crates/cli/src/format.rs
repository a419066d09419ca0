//! Pinned text serialization for result tables.
//!
//! Floats are written with 12 significant digits using `%.12g` rules, except
//! that fixed-notation integers keep a trailing `.0` (so zero prints as `0.0`).

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

const SIG_DIGITS: i32 = 12;

pub fn fmt_g12(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{:.*e}", (SIG_DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");

    if !(-4..SIG_DIGITS).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let fixed = format!("{:.*}", (SIG_DIGITS - 1 - exp) as usize, x);
        let mut out = strip_zeros(&fixed).to_string();
        if !out.contains('.') {
            out.push_str(".0");
        }
        out
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The float a reader gets back from the 12-digit text.
pub fn round_g12(x: f64) -> f64 {
    if x.is_finite() {
        fmt_g12(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(usize),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => fmt_g12(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => {
                let r = round_g12(*x);
                serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
            }
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

/// Column-named rows, the common shape of every artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json<S: Serialize>(&self, spec: &S) -> String {
        #[derive(Serialize)]
        struct Artifact<'a, S> {
            spec: &'a S,
            columns: &'a [String],
            rows: Vec<Vec<Value>>,
        }
        let artifact = Artifact {
            spec,
            columns: &self.columns,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(Cell::json).collect())
                .collect(),
        };
        let mut out = serde_json::to_string(&artifact).expect("artifact serializes");
        out.push('\n');
        out
    }
}
