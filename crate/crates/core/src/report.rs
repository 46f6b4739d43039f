//! Report assembly: JSON lines for machines, aligned columns for people,
//! CSV for stratum tables.

use std::io::{self, Write};

use serde_json::{json, Value};

use crate::strata::{StratumCount, CSV_HEADER};

/// Records emitted by one run, in canonical order.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
    records: Vec<Value>,
    csv_rows: Vec<[String; 6]>,
    assertions: usize,
    failures: usize,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Report {
            command: command.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    /// Adds a record. `passed` is `None` for informational records.
    pub fn push(&mut self, record: Value, passed: Option<bool>, row: Vec<String>) {
        if let Some(ok) = passed {
            self.assertions += 1;
            if !ok {
                self.failures += 1;
            }
        }
        self.records.push(record);
        self.rows.push(row);
    }

    pub fn push_stratum(&mut self, count: &StratumCount) {
        let row = count.csv_row().to_vec();
        self.csv_rows.push(count.csv_row());
        let mut record = count.to_json();
        record["record"] = json!("stratum");
        self.push(record, count.matches(), row);
    }

    pub fn records(&self) -> &[Value] {
        &self.records
    }

    pub fn assertions(&self) -> usize {
        self.assertions
    }

    pub fn failures(&self) -> usize {
        self.failures
    }

    /// Every executed assertion passed.
    pub fn ok(&self) -> bool {
        self.failures == 0
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for row in &self.csv_rows {
            w.write_record(row)?;
        }
        w.flush()
    }

    pub fn render_table(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i < widths.len() {
                    widths[i] = widths[i].max(cell.chars().count());
                } else {
                    widths.push(cell.chars().count());
                }
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> =
                cells.iter().enumerate().map(|(i, c)| format!("{c:<w$}", w = widths[i])).collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        out.push_str(&line(&self.columns));
        out.push('\n');
        out.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out.push_str(&format!(
            "{}: {} record(s), {} assertion(s), {} failure(s)\n",
            self.command,
            self.records.len(),
            self.assertions,
            self.failures
        ));
        out
    }
}
