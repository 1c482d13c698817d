//! Flat, byte-stable report records (JSON objects and CSV rows).
//!
//! Floats are written in scientific notation with 17 significant digits so
//! identical inputs produce identical files.

use std::fmt::Write as _;

/// Formats with 17 significant digits, e.g. `1.4215990171369564e0`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "Infinity".to_string()
    } else {
        "-Infinity".to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u8> for Value {
    fn from(x: u8) -> Self {
        Value::Int(i64::from(x))
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

impl Value {
    fn json(&self) -> String {
        match self {
            // JSON has no NaN/Infinity literals
            Value::Num(x) if !x.is_finite() => quote(&fmt_f64(*x)),
            Value::Num(x) => fmt_f64(*x),
            Value::Int(i) => i.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => quote(s),
        }
    }

    fn csv(&self) -> String {
        match self {
            Value::Num(x) => fmt_f64(*x),
            Value::Int(i) => i.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Value::Text(s) => s.clone(),
        }
    }

    /// Plain rendering for key-value text files.
    pub fn plain(&self) -> String {
        match self {
            Value::Text(s) => s.clone(),
            other => other.csv(),
        }
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Ordered key/value pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    entries: Vec<(String, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<Value>) -> &mut Self {
        self.entries.push((key.into(), value.into()));
        self
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.push(key, value);
        self
    }

    /// Appends every entry of `other` with `prefix` prepended to its key.
    pub fn extend_prefixed(&mut self, prefix: &str, other: &Record) -> &mut Self {
        for (k, v) in &other.entries {
            self.entries.push((format!("{prefix}{k}"), v.clone()));
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn entries(&self) -> &[(String, Value)] {
        &self.entries
    }

    /// One flat JSON object, keys in insertion order.
    pub fn to_json(&self) -> String {
        let body: Vec<String> = self
            .entries
            .iter()
            .map(|(k, v)| format!("  {}: {}", quote(k), v.json()))
            .collect();
        format!("{{\n{}\n}}\n", body.join(",\n"))
    }

    pub fn csv_header(&self) -> String {
        self.entries
            .iter()
            .map(|(k, _)| Value::Text(k.clone()).csv())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn csv_row(&self) -> String {
        self.entries
            .iter()
            .map(|(_, v)| v.csv())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// `key = value` lines.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {}", v.plain());
        }
        out
    }
}

/// Header plus one row per record. All records must share the same keys.
pub fn to_csv(rows: &[Record]) -> String {
    let mut out = String::new();
    if let Some(first) = rows.first() {
        out.push_str(&first.csv_header());
        out.push('\n');
        for r in rows {
            debug_assert!(r.keys().eq(first.keys()));
            out.push_str(&r.csv_row());
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.1), "-1.0000000000000001e-1");
        let x = 1.4215990171369564;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn json_and_csv_layout() {
        let r = Record::new()
            .with("S_scalar", 2.5)
            .with("regime", 1u8)
            .with("note", "a \"quoted\", text")
            .with("ok", true);
        assert_eq!(
            r.to_json(),
            "{\n  \"S_scalar\": 2.5000000000000000e0,\n  \"regime\": 1,\n  \"note\": \"a \\\"quoted\\\", text\",\n  \"ok\": true\n}\n"
        );
        assert_eq!(r.csv_header(), "S_scalar,regime,note,ok");
        assert_eq!(r.csv_row(), "2.5000000000000000e0,1,\"a \"\"quoted\"\", text\",true");
    }

    #[test]
    fn nonfinite_numbers_stay_valid_json() {
        let r = Record::new().with("x", f64::NAN);
        assert!(r.to_json().contains("\"NaN\""));
    }
}
