use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::Params;
use crate::error::CliError;

#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// 17 significant digits in scientific notation, `nan`/`inf` spelled out.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// What an experiment hands back before anything is written.
#[derive(Debug, Default)]
pub struct Outcome {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub checks: Vec<Check>,
    pub summary: Map<String, Value>,
}

impl Outcome {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), ..Self::default() }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.to_string(), serde_json::to_value(value).expect("serializable summary value"));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'a str,
    seed: u64,
    params: &'a Params,
    passed: bool,
    checks: &'a [Check],
    summary: &'a Map<String, Value>,
}

/// Writes `<name>.csv` and `<name>.json` under `dir` and returns both paths.
pub fn write_outputs(
    dir: &Path,
    name: &str,
    seed: u64,
    params: &Params,
    out: &Outcome,
) -> Result<(PathBuf, PathBuf), CliError> {
    let io = |e: &dyn std::fmt::Display| CliError::Output(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(&e))?;
    let csv_path = dir.join(format!("{name}.csv"));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(&csv_path).map_err(|e| io(&e))?;
    w.write_record(&out.header).map_err(|e| io(&e))?;
    for row in &out.rows {
        w.write_record(row.iter().map(Cell::render)).map_err(|e| io(&e))?;
    }
    w.flush().map_err(|e| io(&e))?;
    let json_path = dir.join(format!("{name}.json"));
    let summary = Summary {
        experiment: name,
        seed,
        params,
        passed: out.passed(),
        checks: &out.checks,
        summary: &out.summary,
    };
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| io(&e))?;
    text.push('\n');
    std::fs::write(&json_path, text).map_err(|e| io(&e))?;
    Ok((csv_path, json_path))
}
