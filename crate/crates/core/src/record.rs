// SPDX-License-Identifier: Apache-2.0

//! Flat named records and their json-lines / csv encodings.

use std::fmt::Write as _;

/// One named value in an output record.
#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Int(i128),
    /// An exact integer too wide for `Int`, as decimal digits.
    Digits(String),
    Real(f64),
    Str(String),
    Bool(bool),
    List(Vec<Field>),
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::Int(v.into())
    }
}

impl From<i64> for Field {
    fn from(v: i64) -> Self {
        Field::Int(v.into())
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as i128)
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Real(v)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Str(v.to_string())
    }
}

impl From<String> for Field {
    fn from(v: String) -> Self {
        Field::Str(v)
    }
}

impl<T: Into<Field>> From<Vec<T>> for Field {
    fn from(v: Vec<T>) -> Self {
        Field::List(v.into_iter().map(Into::into).collect())
    }
}

/// Ordered `(name, value)` pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record {
    pub fields: Vec<(String, Field)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: impl Into<Field>) -> Self {
        self.fields.push((name.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, name: &str, value: impl Into<Field>) {
        self.fields.push((name.to_string(), value.into()));
    }

    pub fn get(&self, name: &str) -> Option<&Field> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn real(&self, name: &str) -> Option<f64> {
        match self.get(name)? {
            Field::Real(v) => Some(*v),
            Field::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn int(&self, name: &str) -> Option<i128> {
        match self.get(name)? {
            Field::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn header(&self) -> Vec<&str> {
        self.fields.iter().map(|(n, _)| n.as_str()).collect()
    }
}

/// Round to 12 significant digits. Non-finite values pass through.
pub fn round_sig12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

fn json_field(out: &mut String, f: &Field) {
    match f {
        Field::Int(v) => write!(out, "{v}").unwrap(),
        Field::Digits(d) => out.push_str(d),
        Field::Real(v) => {
            let r = round_sig12(*v);
            if r.is_finite() {
                out.push_str(&serde_json::Number::from_f64(r).unwrap().to_string());
            } else {
                // json has no infinities; emit a string the reader can recognize
                out.push_str(&serde_json::Value::String(r.to_string()).to_string());
            }
        }
        Field::Str(s) => out.push_str(&serde_json::Value::String(s.clone()).to_string()),
        Field::Bool(b) => write!(out, "{b}").unwrap(),
        Field::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                json_field(out, item);
            }
            out.push(']');
        }
    }
}

/// One json object on a single line, fields in record order.
pub fn to_json_line(rec: &Record) -> String {
    let mut out = String::from("{");
    for (i, (name, value)) in rec.fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&serde_json::Value::String(name.clone()).to_string());
        out.push(':');
        json_field(&mut out, value);
    }
    out.push('}');
    out
}

/// Plain-text cell for csv; lists are joined with `;`.
pub fn csv_cell(f: &Field) -> String {
    match f {
        Field::Int(v) => v.to_string(),
        Field::Digits(d) => d.clone(),
        Field::Real(v) => {
            let r = round_sig12(*v);
            if r.is_finite() {
                serde_json::Number::from_f64(r).unwrap().to_string()
            } else {
                r.to_string()
            }
        }
        Field::Str(s) => s.clone(),
        Field::Bool(b) => b.to_string(),
        Field::List(items) => items.iter().map(csv_cell).collect::<Vec<_>>().join(";"),
    }
}
