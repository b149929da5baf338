use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::ScenarioConfig;

pub const TOOL_NAME: &str = "sepq";
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }
}

/// Output of one scenario run. Identical `(config, seed, version)` give
/// identical reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub report_schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub scenario: String,
    pub seed: u64,
    pub rng: String,
    pub config: ScenarioConfig,
    pub values: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, Cell>,
    pub notes: Vec<String>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self {
            report_schema_version: REPORT_SCHEMA_VERSION,
            tool: TOOL_NAME.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            scenario: config.scenario.name().into(),
            seed: config.seed(),
            rng: sepq_core::streams::RNG_ALGORITHM.into(),
            config: config.clone(),
            values: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            notes: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn value(&mut self, key: impl Into<String>, x: f64) {
        self.values.insert(key.into(), x);
    }

    pub fn verdict(&mut self, key: impl Into<String>, v: impl Into<Cell>) {
        self.verdicts.insert(key.into(), v.into());
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn find_table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}
