// Copyright 2026 The qsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Result rows and their JSON-lines / CSV encodings.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::Format;
use crate::RunError;

/// JSON schema every emitted [`ResultRow`] validates against.
pub const RESULT_ROW_SCHEMA: &str = include_str!("../schema/result_row.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRow {
    pub experiment: String,
    pub seed: u64,
    pub params: Map<String, Value>,
    pub metric: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

pub const CSV_HEADER: [&str; 7] = ["experiment", "seed", "params", "metric", "value", "stderr", "reference"];

impl ResultRow {
    fn check_finite(&self) -> Result<(), RunError> {
        let all = [Some(self.value), self.stderr, self.reference];
        if all.iter().flatten().any(|v| !v.is_finite()) {
            return Err(RunError::Internal(format!("non-finite value in metric {}", self.metric)));
        }
        Ok(())
    }

    fn csv_record(&self) -> [String; 7] {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.experiment.clone(),
            self.seed.to_string(),
            Value::Object(self.params.clone()).to_string(),
            self.metric.clone(),
            self.value.to_string(),
            opt(self.stderr),
            opt(self.reference),
        ]
    }
}

/// A plain table with fixed columns, for the per-shot CHSH rows and the
/// QEC sweep.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn write_json<W: Write>(&self, out: &mut W) -> Result<(), RunError> {
        for row in &self.rows {
            let obj: Map<String, Value> = self
                .columns
                .iter()
                .zip(row)
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect();
            writeln!(out, "{}", Value::Object(obj))?;
        }
        Ok(())
    }

    fn write_csv<W: Write>(&self, out: &mut W) -> Result<(), RunError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            }))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A named pass/fail judgement used by `--assert`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Everything an experiment produces.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub rows: Vec<ResultRow>,
    pub checks: Vec<Check>,
    /// Replaces the rows in both formats.
    pub raw: Option<Table>,
    /// Replaces the rows in CSV output.
    pub csv_table: Option<Table>,
}

impl Report {
    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn write<W: Write>(&self, format: Format, out: &mut W) -> Result<(), RunError> {
        for row in &self.rows {
            row.check_finite()?;
        }
        if let Some(raw) = &self.raw {
            return match format {
                Format::JsonLines => raw.write_json(out),
                Format::Csv => raw.write_csv(out),
            };
        }
        match format {
            Format::JsonLines => {
                for row in &self.rows {
                    writeln!(out, "{}", serde_json::to_string(row)?)?;
                }
                Ok(())
            }
            Format::Csv => {
                if let Some(t) = &self.csv_table {
                    return t.write_csv(out);
                }
                let mut w = csv::Writer::from_writer(out);
                w.write_record(CSV_HEADER)?;
                for row in &self.rows {
                    w.write_record(row.csv_record())?;
                }
                w.flush()?;
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(value: f64) -> ResultRow {
        ResultRow {
            experiment: "qft".into(),
            seed: 1,
            params: Map::new(),
            metric: "m".into(),
            value,
            stderr: None,
            reference: Some(0.5),
        }
    }

    #[test]
    fn json_omits_missing_stderr() {
        let report = Report {
            rows: vec![row(0.25)],
            ..Report::default()
        };
        let mut out = Vec::new();
        report.write(Format::JsonLines, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.trim(), r#"{"experiment":"qft","seed":1,"params":{},"metric":"m","value":0.25,"reference":0.5}"#);
        let back: ResultRow = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(back, row(0.25));
    }

    #[test]
    fn csv_quotes_params() {
        let mut r = row(1.0);
        r.params.insert("p".into(), serde_json::json!([1, 2]));
        let report = Report {
            rows: vec![r],
            ..Report::default()
        };
        let mut out = Vec::new();
        report.write(Format::Csv, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "experiment,seed,params,metric,value,stderr,reference\nqft,1,\"{\"\"p\"\":[1,2]}\",m,1,,0.5\n");
    }

    #[test]
    fn non_finite_values_are_refused() {
        let report = Report {
            rows: vec![row(f64::NAN)],
            ..Report::default()
        };
        assert!(matches!(report.write(Format::JsonLines, &mut Vec::new()), Err(RunError::Internal(_))));
    }
}
