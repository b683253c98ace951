use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use lambda_de::analysis::Grid2;
use lambda_de::io::{write_grid, write_json, write_table, GridMetadata};
use lambda_de::Error;

use crate::{Format, GlobalArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(Error::Validation(_) | Error::UnsupportedScheme(_) | Error::DivisionByZero(_)) => 2,
            CliError::Lib(Error::Convergence { .. }) => 3,
            CliError::Lib(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Record of one invocation, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub parameters: Value,
    pub outputs: Vec<String>,
    pub duration_s: f64,
}

/// Writes tables and grids in the selected format and remembers every file.
pub struct Output {
    dir: PathBuf,
    format: Format,
    tolerance: f64,
    written: Vec<PathBuf>,
    started: Instant,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    columns: &'a [&'a str],
    rows: &'a [Vec<f64>],
}

#[derive(Serialize)]
struct JsonGrid<'a> {
    metadata: &'a GridMetadata,
    row_values: &'a [f64],
    col_values: &'a [f64],
    values: Vec<&'a [f64]>,
}

impl Output {
    pub fn new(global: &GlobalArgs) -> Self {
        Output {
            dir: global.out_dir.clone(),
            format: global.format,
            tolerance: global.tolerance,
            written: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn table(&mut self, stem: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        match self.format {
            Format::Csv => {
                let path = self.dir.join(format!("{stem}.csv"));
                write_table(&path, header, rows)?;
                self.written.push(path);
            }
            Format::Json => {
                let path = self.dir.join(format!("{stem}.json"));
                write_json(&path, &JsonTable { columns: header, rows })?;
                self.written.push(path);
            }
        }
        Ok(())
    }

    pub fn grid(&mut self, stem: &str, grid: &Grid2, kind: &str, scheme: &str, metric: &str, parameters: &Value) -> Result<(), CliError> {
        let tolerances = json!({ "propagation": self.tolerance });
        match self.format {
            Format::Csv => {
                let mut meta = GridMetadata::for_grid(grid, &format!("{stem}.csv"), kind, scheme, metric);
                meta.tolerances = tolerances;
                meta.parameters = parameters.clone();
                let (csv, json) = write_grid(&self.dir, stem, grid, &meta)?;
                self.written.push(csv);
                self.written.push(json);
            }
            Format::Json => {
                let mut meta = GridMetadata::for_grid(grid, "", kind, scheme, metric);
                meta.tolerances = tolerances;
                meta.parameters = parameters.clone();
                let (rows, _) = grid.shape();
                let doc = JsonGrid {
                    metadata: &meta,
                    row_values: &grid.rows.values,
                    col_values: &grid.cols.values,
                    values: (0..rows).map(|i| grid.row(i)).collect(),
                };
                let path = self.dir.join(format!("{stem}.json"));
                write_json(&path, &doc)?;
                self.written.push(path);
            }
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, stem: &str, value: &T) -> Result<(), CliError> {
        let path = self.dir.join(format!("{stem}.json"));
        write_json(&path, value)?;
        self.written.push(path);
        Ok(())
    }

    pub fn finish(self, command: &str, global: &GlobalArgs, params: Value) -> Result<PathBuf, CliError> {
        let manifest = RunManifest {
            command: command.into(),
            version: lambda_de::VERSION.into(),
            parameters: json!({ "global": global, "command": params }),
            outputs: self.written.iter().map(|p| p.display().to_string()).collect(),
            duration_s: self.started.elapsed().as_secs_f64(),
        };
        let path = self.dir.join(format!("{command}.manifest.json"));
        write_json(&path, &manifest)?;
        for p in &self.written {
            println!("wrote {}", p.display());
        }
        Ok(path)
    }
}
