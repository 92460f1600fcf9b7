//! Row output shared by every subcommand: fixed leading columns, then
//! command-specific extras. Absent fields are empty in CSV and null in JSON.

use std::io::Write;

use serde_json::{Map, Value};

pub const BASE_COLUMNS: [&str; 10] = ["family", "N", "p", "g", "b", "t", "epsilon", "reference", "delta", "converged"];

#[derive(Clone, Debug, Default)]
pub struct Row {
    pub family: String,
    pub n: Option<u64>,
    pub p: Option<u64>,
    pub g: Option<f64>,
    pub b: Option<f64>,
    pub t: Option<f64>,
    pub epsilon: Option<f64>,
    pub reference: Option<f64>,
    pub delta: Option<f64>,
    pub converged: Option<bool>,
    pub extras: Vec<Value>,
}

impl Row {
    pub fn new(family: impl Into<String>) -> Self {
        Self { family: family.into(), ..Self::default() }
    }

    /// Sets `epsilon`, `reference` and their absolute difference.
    pub fn compared(mut self, epsilon: f64, reference: Option<f64>) -> Self {
        self.epsilon = Some(epsilon);
        self.reference = reference;
        self.delta = reference.map(|r| (epsilon - r).abs());
        self
    }

    fn base_values(&self) -> [Value; 10] {
        let num = |x: Option<f64>| x.map_or(Value::Null, Value::from);
        [
            Value::from(self.family.clone()),
            self.n.map_or(Value::Null, Value::from),
            self.p.map_or(Value::Null, Value::from),
            num(self.g),
            num(self.b),
            num(self.t),
            num(self.epsilon),
            num(self.reference),
            num(self.delta),
            self.converged.map_or(Value::Null, Value::from),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Table {
    first: &'static str,
    extras: Vec<&'static str>,
    pub rows: Vec<Row>,
}

impl Table {
    /// `first` names the leading column (`family` or `transition`).
    pub fn new(first: &'static str, extras: &[&'static str]) -> Self {
        Self { first, extras: extras.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    fn header(&self) -> Vec<&'static str> {
        let mut h = BASE_COLUMNS.to_vec();
        h[0] = self.first;
        h.extend(&self.extras);
        h
    }

    fn cell(v: &Value) -> String {
        match v {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> eprod_core::Result<()> {
        let header = self.header();
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&header)?;
                for row in &self.rows {
                    let cells = row.base_values().iter().chain(&row.extras).map(Self::cell).collect::<Vec<_>>();
                    w.write_record(&cells)?;
                }
                w.flush()?;
            }
            Format::Json => {
                let items: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = Map::new();
                        for (k, v) in header.iter().zip(row.base_values().into_iter().chain(row.extras.iter().cloned())) {
                            obj.insert((*k).to_string(), v);
                        }
                        Value::Object(obj)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &items)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}
