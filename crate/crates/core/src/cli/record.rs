//! Output records with fixed float formatting.
//!
//! Floats are written with 17 significant digits (`{:.16e}`) so identical
//! inputs always produce identical bytes; `serde_json`'s shortest-roundtrip
//! formatting is not used for output.

use std::fmt::Write as _;

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj<K: Into<String>>(fields: impl IntoIterator<Item = (K, Json)>) -> Json {
        Json::Obj(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn complex(z: C64) -> Json {
        Json::obj([("re", Json::Num(z.re)), ("im", Json::Num(z.im))])
    }

    pub fn str(s: impl Into<String>) -> Json {
        Json::Str(s.into())
    }

    pub fn write(&self, out: &mut String) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => write!(out, "{i}").unwrap(),
            Json::Num(x) => out.push_str(&format_float(*x)),
            Json::Str(s) => write_string(out, s),
            Json::Arr(items) => {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    item.write(out);
                }
                out.push(']');
            }
            Json::Obj(fields) => {
                out.push('{');
                for (k, (key, value)) in fields.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    write_string(out, key);
                    out.push(':');
                    value.write(out);
                }
                out.push('}');
            }
        }
    }

    pub fn to_line(&self) -> String {
        let mut s = String::new();
        self.write(&mut s);
        s.push('\n');
        s
    }
}

impl From<f64> for Json {
    fn from(x: f64) -> Self {
        Json::Num(x)
    }
}

impl From<C64> for Json {
    fn from(z: C64) -> Self {
        Json::complex(z)
    }
}

impl From<bool> for Json {
    fn from(b: bool) -> Self {
        Json::Bool(b)
    }
}

impl From<usize> for Json {
    fn from(n: usize) -> Self {
        Json::Int(n as i64)
    }
}

impl From<&str> for Json {
    fn from(s: &str) -> Self {
        Json::Str(s.to_owned())
    }
}

impl From<String> for Json {
    fn from(s: String) -> Self {
        Json::Str(s)
    }
}

impl<T: Into<Json>> From<Option<T>> for Json {
    fn from(v: Option<T>) -> Self {
        v.map_or(Json::Null, Into::into)
    }
}

/// Non-finite values become `null`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_owned()
    }
}

fn write_string(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => write!(out, "\\u{:04x}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Rows for `--format csv`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Json>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// One row from the scalar fields of an object; complex values expand
    /// into `_re`/`_im` columns, nested arrays and objects are skipped.
    pub fn from_object(value: &Json) -> Self {
        let mut t = Table::default();
        let mut row = Vec::new();
        if let Json::Obj(fields) = value {
            for (key, v) in fields {
                match v {
                    Json::Obj(inner) if is_complex(inner) => {
                        t.header.push(format!("{key}_re"));
                        t.header.push(format!("{key}_im"));
                        row.push(inner[0].1.clone());
                        row.push(inner[1].1.clone());
                    }
                    Json::Obj(_) | Json::Arr(_) => {}
                    scalar => {
                        t.header.push(key.clone());
                        row.push(scalar.clone());
                    }
                }
            }
        }
        t.rows.push(row);
        t
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn is_complex(fields: &[(String, Json)]) -> bool {
    fields.len() == 2 && fields[0].0 == "re" && fields[1].0 == "im"
}

fn csv_cell(v: &Json) -> String {
    match v {
        Json::Null => String::new(),
        Json::Str(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Json::Str(s) => s.clone(),
        other => {
            let mut s = String::new();
            other.write(&mut s);
            s
        }
    }
}
