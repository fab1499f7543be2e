//! Typed cells, tables, addresses and declarative column metadata.

mod address;
mod schema;
mod table;
mod value;

pub use address::{a1_to_address, address_to_a1, column_letters, letters_to_column, CellAddress, MAX_COLUMN};
pub use schema::{
    parse_date_strict, ColumnSpec, ForeignKey, FormatPattern, RangePosition, Schema, ValueRange,
};
pub use table::{Column, Table};
pub use value::{compare_values, CellValue, DataType, DateValue, ValueOrdering};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("table `{table}`: column `{column}` has {found} cells, expected {expected}")]
    Ragged {
        table: String,
        column: String,
        expected: usize,
        found: usize,
    },
    #[error("table `{table}`: row {row} has {found} cells, expected {expected}")]
    RowWidth {
        table: String,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("table `{table}`: column name is empty")]
    EmptyColumnName { table: String },
    #[error("table `{table}` has no column `{column}`")]
    MissingColumn { table: String, column: String },
    #[error("`{0}` is not a cell address")]
    BadAddress(String),
}
