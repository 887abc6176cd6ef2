//! One schema for both output formats: a command name and an ordered list of keyed records.
//!
//! Line format prints an optional headline, then `key v1 v2 ...` per record, reals at 17
//! significant digits. JSON format prints
//! `{"command": ..., "headline": ..., "records": [{"key": ..., "values": [...]}, ...]}`.

use serde_json::{json, Value};
use std::fmt::Write;

/// One field of a record.
#[derive(Debug, Clone, PartialEq)]
pub enum Val {
    Real(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Val {
    fn from(x: f64) -> Self {
        Val::Real(x)
    }
}

impl From<usize> for Val {
    fn from(x: usize) -> Self {
        Val::Int(x as i64)
    }
}

impl From<u64> for Val {
    fn from(x: u64) -> Self {
        Val::Int(x as i64)
    }
}

impl From<bool> for Val {
    fn from(x: bool) -> Self {
        Val::Bool(x)
    }
}

impl From<&str> for Val {
    fn from(x: &str) -> Self {
        Val::Text(x.to_string())
    }
}

impl From<String> for Val {
    fn from(x: String) -> Self {
        Val::Text(x)
    }
}

/// Reals at 17 significant digits; integers and text as is.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

impl Val {
    fn line(&self) -> String {
        match self {
            Val::Real(x) => real(*x),
            Val::Int(i) => i.to_string(),
            Val::Text(s) => s.clone(),
            Val::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // JSON has no non-finite numbers.
            Val::Real(x) if !x.is_finite() => json!(x.to_string()),
            Val::Real(x) => json!(x),
            Val::Int(i) => json!(i),
            Val::Text(s) => json!(s),
            Val::Bool(b) => json!(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub key: String,
    pub values: Vec<Val>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub headline: Option<String>,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            headline: None,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, key: &str, values: Vec<Val>) {
        self.records.push(Record {
            key: key.to_string(),
            values,
        });
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let records: Vec<Value> = self
                .records
                .iter()
                .map(|r| json!({ "key": r.key, "values": r.values.iter().map(Val::json).collect::<Vec<_>>() }))
                .collect();
            let mut s =
                json!({ "command": self.command, "headline": self.headline, "records": records })
                    .to_string();
            s.push('\n');
            s
        } else {
            let mut s = self
                .headline
                .as_ref()
                .map_or(String::new(), |h| format!("{h}\n"));
            for r in &self.records {
                s.push_str(&r.key);
                for v in &r.values {
                    let _ = write!(s, " {}", v.line());
                }
                s.push('\n');
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_formats_share_records() {
        let mut r = Report::new("demo");
        r.headline = Some("ok".into());
        r.push("K", vec![0u64.into(), 2.5.into()]);
        r.push("note", vec!["two words".into(), true.into()]);
        assert_eq!(
            r.render(false),
            "ok\nK 0 2.5000000000000000e0\nnote two words true\n"
        );
        let v: Value = serde_json::from_str(&r.render(true)).unwrap();
        assert_eq!(v["command"], "demo");
        assert_eq!(v["headline"], "ok");
        assert_eq!(v["records"][0]["values"][1], 2.5);
        assert_eq!(v["records"][1]["key"], "note");
    }

    #[test]
    fn reals_keep_17_digits() {
        let x = std::f64::consts::PI;
        assert_eq!(real(x).parse::<f64>().unwrap(), x);
        assert_eq!(real(f64::NAN), "NaN");
    }
}
