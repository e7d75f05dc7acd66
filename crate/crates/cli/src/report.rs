use std::fmt::Write as _;

use serde_json::{Map, Value};

/// How a successful computation ended, mapped to the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// A negative verdict: not semistable, not S-equivalent, catalog mismatch.
    Negative,
    /// The Langton loop stopped at its iteration cap.
    LangtonCap,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Negative => 1,
            Outcome::LangtonCap => 4,
        }
    }
}

/// Ordered key/value output, rendered either as `key value` lines or as JSON.
#[derive(Clone, Debug)]
pub struct Report {
    entries: Map<String, Value>,
    pub outcome: Outcome,
}

impl Default for Report {
    fn default() -> Self {
        Report { entries: Map::new(), outcome: Outcome::Ok }
    }
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.entries.insert(key.to_owned(), value.into());
        self
    }

    /// Scalars and flat lists on one line; lists of lists as one row per
    /// line below the key; objects as indented blocks.
    pub fn text(&self) -> String {
        let mut out = String::new();
        render_map(&mut out, &self.entries, 0);
        out
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&Value::Object(self.entries.clone())).expect("json values serialize");
        s.push('\n');
        s
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Bool(true) => "yes".into(),
        Value::Bool(false) => "no".into(),
        Value::Null => "-".into(),
        Value::Array(xs) => xs.iter().map(scalar).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn render_map(out: &mut String, map: &Map<String, Value>, indent: usize) {
    for (k, v) in map {
        render(out, k, v, indent);
    }
}

fn render(out: &mut String, key: &str, value: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match value {
        Value::Object(m) => {
            let _ = writeln!(out, "{pad}{key}");
            render_map(out, m, indent + 2);
        }
        Value::Array(xs) if xs.iter().any(Value::is_object) => {
            for x in xs {
                render(out, key, x, indent);
            }
        }
        Value::Array(xs) if xs.iter().any(Value::is_array) => {
            let _ = writeln!(out, "{pad}{key}");
            for row in xs {
                let _ = writeln!(out, "{pad}  {}", scalar(row));
            }
        }
        Value::String(s) if s.contains('\n') => {
            let _ = writeln!(out, "{pad}{key}");
            for line in s.lines() {
                let _ = writeln!(out, "{pad}  {line}");
            }
        }
        v => {
            let s = scalar(v);
            if s.is_empty() {
                let _ = writeln!(out, "{pad}{key}");
            } else {
                let _ = writeln!(out, "{pad}{key} {s}");
            }
        }
    }
}
