//! CSV and workbook ingestion, type inference and schema documents.

mod csv_io;
mod infer;
mod options;
mod schema_file;
mod workbook;

pub use csv_io::{
    format_cell, load_csv, parse_boolean, parse_cell, parse_date, parse_number, read_csv, write_csv,
    write_csv_file, LoadedTable, StructuralWarning,
};
pub use infer::{coerce_cell, coerce_to_schema, infer_types, infer_types_with};
pub use options::{DateLocale, IngestOptions, ISO_DATE_PATTERNS};
pub use schema_file::{load_schema, parse_schema, render_schema};
pub use workbook::{load_workbook, Workbook, MANIFEST};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid UTF-8 on line {line}")]
    Encoding { line: u64 },
    #[error("{source_name} is empty")]
    EmptyInput { source_name: String },
    #[error("malformed CSV: {0}")]
    Csv(#[source] csv::Error),
    #[error("invalid ingest options: {0}")]
    Options(String),
    #[error("workbook has two sheets named `{0}`")]
    DuplicateSheet(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemaErrorKind {
    Io(String),
    Parse(String),
    UnknownAttribute(String),
    ConflictingRule(String),
}

/// A schema document problem with its 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct SchemaError {
    pub line: usize,
    pub column: usize,
    pub kind: SchemaErrorKind,
}

impl std::fmt::Display for SchemaErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SchemaErrorKind::Io(m) | SchemaErrorKind::Parse(m) => f.write_str(m),
            SchemaErrorKind::UnknownAttribute(a) => write!(f, "unknown attribute `{a}`"),
            SchemaErrorKind::ConflictingRule(m) => write!(f, "conflicting rule: {m}"),
        }
    }
}
