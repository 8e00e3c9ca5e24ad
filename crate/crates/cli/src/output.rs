use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::args::Format;
use crate::CliError;

/// Flat rows for CSV output; complex values become `_re`/`_im` column pairs.
#[derive(Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn row(&mut self) -> Row<'_> {
        let first = self.rows.is_empty();
        self.rows.push(Vec::new());
        Row { table: self, first }
    }
}

pub struct Row<'a> {
    table: &'a mut Table,
    first: bool,
}

impl Row<'_> {
    fn push(&mut self, name: String, value: String) {
        if self.first {
            self.table.header.push(name);
        }
        self.table.rows.last_mut().unwrap().push(value);
    }

    pub fn num(mut self, name: &str, v: impl Cell) -> Self {
        self.push(name.to_string(), v.cell());
        self
    }

    pub fn complex(mut self, name: &str, z: Complex64) -> Self {
        self.push(format!("{name}_re"), z.re.cell());
        self.push(format!("{name}_im"), z.im.cell());
        self
    }
}

pub trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    // shortest round-trip form, exponent notation for tiny and huge values
    fn cell(&self) -> String {
        format!("{self:?}")
    }
}

impl Cell for u64 {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for bool {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for &String {
    fn cell(&self) -> String {
        self.to_string()
    }
}

pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    pub table: Table,
    pub runtime_seconds: f64,
}

impl Report {
    fn json(&self) -> String {
        let doc = json!({
            "command": self.command,
            "config": self.config,
            "result": self.result,
            "runtime_seconds": self.runtime_seconds,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    fn csv(&self) -> Result<String, CliError> {
        let config = serde_json::to_string(&self.config).expect("config serializes");
        let runtime = self.runtime_seconds.cell();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = self.table.header.clone();
        header.extend(["runtime_seconds".to_string(), "config".to_string()]);
        w.write_record(&header).map_err(io_error)?;
        for row in &self.table.rows {
            let mut rec = row.clone();
            rec.extend([runtime.clone(), config.clone()]);
            w.write_record(&rec).map_err(io_error)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn write(&self, format: Format, path: Option<&Path>) -> Result<(), CliError> {
        let text = match format {
            Format::Json => self.json(),
            Format::Csv => self.csv()?,
        };
        match path {
            Some(p) => File::create(p)
                .and_then(|mut f| f.write_all(text.as_bytes()))
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display()))),
            None => io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Config(e.to_string())),
        }
    }
}

fn io_error(e: csv::Error) -> CliError {
    CliError::Config(e.to_string())
}
