//! Records rendered as JSON, CSV or plain text.
//!
//! Floating-point fields are written as decimal strings with 17 significant
//! digits so that output is byte-stable and round-trips exactly.

use clap::ValueEnum;
use serde_json::{Map, Value};
use wfunc::fixtures::format_f64;
use wfunc::{Complex, EvalResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => Value::String(format_f64(*x)),
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }

    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format_f64(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// An ordered list of named fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(pub Vec<(String, Cell)>);

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn push(&mut self, key: &str, cell: Cell) -> &mut Self {
        self.0.push((key.to_string(), cell));
        self
    }

    pub fn num(&mut self, key: &str, x: f64) -> &mut Self {
        self.push(key, Cell::Num(x))
    }

    pub fn complex(&mut self, key: &str, z: Complex) -> &mut Self {
        self.num(&format!("{key}_re"), z.re).num(&format!("{key}_im"), z.im)
    }

    pub fn text(&mut self, key: &str, s: impl Into<String>) -> &mut Self {
        self.push(key, Cell::Text(s.into()))
    }

    pub fn eval_result(&mut self, r: &EvalResult) -> &mut Self {
        self.complex("value", r.value)
            .num("abs_error_estimate", r.abs_error_estimate)
            .push("terms_used", Cell::Int(r.terms_used as u64))
            .push("converged", Cell::Bool(r.converged))
    }

    fn json(&self) -> Value {
        Value::Object(self.0.iter().map(|(k, v)| (k.clone(), v.json())).collect::<Map<_, _>>())
    }
}

fn csv(records: &[Record]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = records.first() {
        w.write_record(first.0.iter().map(|(k, _)| k.as_str()))
            .expect("in-memory write");
    }
    for r in records {
        w.write_record(r.0.iter().map(|(_, v)| v.text()))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

/// A single record: a JSON object, a one-row CSV, or `key: value` lines.
pub fn render_one(record: &Record, format: Format) -> String {
    match format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&record.json()).expect("serializable")
        ),
        Format::Csv => csv(std::slice::from_ref(record)),
        Format::Text => record.0.iter().map(|(k, v)| format!("{k}: {}\n", v.text())).collect(),
    }
}

/// Several records: a JSON array, a CSV table, or tab-separated text.
pub fn render_many(records: &[Record], format: Format) -> String {
    match format {
        Format::Json => {
            let rows: Vec<Value> = records.iter().map(Record::json).collect();
            format!("{}\n", serde_json::to_string_pretty(&rows).expect("serializable"))
        }
        Format::Csv => csv(records),
        Format::Text => {
            let mut out = String::new();
            if let Some(first) = records.first() {
                out += &first.0.iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>().join("\t");
                out.push('\n');
            }
            for r in records {
                out += &r.0.iter().map(|(_, v)| v.text()).collect::<Vec<_>>().join("\t");
                out.push('\n');
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Record {
        let mut r = Record::new();
        r.num("x", 0.5)
            .text("note", "a, \"quoted\" cell")
            .push("ok", Cell::Bool(true));
        r
    }

    #[test]
    fn csv_quotes_fields() {
        let out = render_many(&[sample()], Format::Csv);
        assert_eq!(
            out,
            "x,note,ok\n5.0000000000000000e-1,\"a, \"\"quoted\"\" cell\",true\n"
        );
    }

    #[test]
    fn json_keeps_order_and_strings() {
        let out = render_one(&sample(), Format::Json);
        let x = out.find("\"x\"").unwrap();
        let note = out.find("\"note\"").unwrap();
        assert!(x < note);
        assert!(out.contains("\"5.0000000000000000e-1\""));
    }
}
