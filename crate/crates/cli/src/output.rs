//! CSV tables and TOML summaries.

use std::io::Write;
use std::path::Path;

use toml::Table;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // Debug formatting is the shortest string that parses back exactly
            Cell::Float(x) => format!("{x:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableData {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl TableData {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write_csv<W: Write>(&self, sink: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(&self.header).map_err(io_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io_error)?;
        }
        w.flush().map_err(|e| CliError::Config(format!("write failed: {e}")))
    }
}

fn io_error(e: csv::Error) -> CliError {
    CliError::Config(format!("write failed: {e}"))
}

/// What a command produces: an optional data table and a summary block.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub table: Option<TableData>,
    pub summary: Table,
}

impl Output {
    pub fn with_table(table: TableData, summary: Table) -> Self {
        Self {
            table: Some(table),
            summary,
        }
    }

    pub fn report(summary: Table) -> Self {
        Self {
            table: None,
            summary,
        }
    }

    fn summary_text(&self) -> Result<String, CliError> {
        toml::to_string(&self.summary)
            .map_err(|e| CliError::Numerical(format!("cannot format summary: {e}")))
    }

    /// With a path, the table (or the report when there is no table) goes to
    /// the file and the summary to `stdout`. Without one, everything goes to
    /// `stdout` and the summary trails the table as `# ` comment lines.
    pub fn emit<W: Write>(&self, path: Option<&Path>, stdout: &mut W) -> Result<(), CliError> {
        let summary = self.summary_text()?;
        let write_err = |e: std::io::Error| CliError::Config(format!("write failed: {e}"));
        match (path, &self.table) {
            (Some(p), Some(table)) => {
                let file = std::fs::File::create(p)
                    .map_err(|e| CliError::Config(format!("cannot create {}: {e}", p.display())))?;
                table.write_csv(std::io::BufWriter::new(file))?;
                stdout.write_all(summary.as_bytes()).map_err(write_err)?;
            }
            (Some(p), None) => {
                std::fs::write(p, &summary)
                    .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display())))?;
                stdout.write_all(summary.as_bytes()).map_err(write_err)?;
            }
            (None, Some(table)) => {
                table.write_csv(&mut *stdout)?;
                for line in summary.lines() {
                    writeln!(stdout, "# {line}").map_err(write_err)?;
                }
            }
            (None, None) => stdout.write_all(summary.as_bytes()).map_err(write_err)?,
        }
        Ok(())
    }
}
