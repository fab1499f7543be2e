use super::{CellAddress, CellValue, ModelError};

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub cells: Vec<CellValue>,
}

impl Column {
    pub fn new(name: impl Into<String>, cells: Vec<CellValue>) -> Self {
        Self {
            name: name.into(),
            cells,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn non_null(&self) -> impl Iterator<Item = (usize, &CellValue)> {
        self.cells.iter().enumerate().filter(|(_, c)| !c.is_null())
    }
}

/// A named rectangular grid of columns.
///
/// Every column holds exactly `row_count` cells. Column names are not forced
/// to be unique here: duplicated headers are a data defect that the
/// ambiguity check reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    name: String,
    columns: Vec<Column>,
    row_count: usize,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Result<Self, ModelError> {
        let name = name.into();
        let row_count = columns.first().map_or(0, Column::len);
        for col in &columns {
            if col.name.trim().is_empty() {
                return Err(ModelError::EmptyColumnName { table: name });
            }
            if col.len() != row_count {
                return Err(ModelError::Ragged {
                    table: name,
                    column: col.name.clone(),
                    expected: row_count,
                    found: col.len(),
                });
            }
        }
        Ok(Self {
            name,
            columns,
            row_count,
        })
    }

    /// Builds a table from row-major data.
    pub fn from_rows<S: Into<String>>(
        name: impl Into<String>,
        headers: impl IntoIterator<Item = S>,
        rows: Vec<Vec<CellValue>>,
    ) -> Result<Self, ModelError> {
        let mut columns: Vec<Column> = headers
            .into_iter()
            .map(|h| Column::new(h, Vec::with_capacity(rows.len())))
            .collect();
        let name = name.into();
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != columns.len() {
                return Err(ModelError::RowWidth {
                    table: name,
                    row: i + 1,
                    expected: columns.len(),
                    found: row.len(),
                });
            }
            for (col, cell) in columns.iter_mut().zip(row) {
                col.cells.push(cell);
            }
        }
        Self::new(name, columns)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<Column> {
        self.columns
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn cell_count(&self) -> usize {
        self.row_count * self.columns.len()
    }

    pub fn headers(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    /// Index of the first column with exactly this name.
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.column_index(name).map(|i| &self.columns[i])
    }

    pub fn cell(&self, row: usize, column: usize) -> &CellValue {
        &self.columns[column].cells[row]
    }

    pub fn row(&self, row: usize) -> Vec<&CellValue> {
        self.columns.iter().map(|c| &c.cells[row]).collect()
    }

    pub fn row_cloned(&self, row: usize) -> Vec<CellValue> {
        self.columns.iter().map(|c| c.cells[row].clone()).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = Vec<&CellValue>> + '_ {
        (0..self.row_count).map(move |r| self.row(r))
    }

    /// Replaces one cell in place; the shape cannot change.
    pub fn set_cell(&mut self, row: usize, column: usize, value: CellValue) -> CellValue {
        std::mem::replace(&mut self.columns[column].cells[row], value)
    }

    /// Address of a cell given 0-based indices.
    pub fn address(&self, row: usize, column: usize) -> CellAddress {
        CellAddress::from_index(&self.name, row, column)
    }

    /// Resolves column names to indices, reporting the first missing one.
    pub fn resolve_columns(&self, names: &[impl AsRef<str>]) -> Result<Vec<usize>, ModelError> {
        names
            .iter()
            .map(|n| {
                self.column_index(n.as_ref())
                    .ok_or_else(|| ModelError::MissingColumn {
                        table: self.name.clone(),
                        column: n.as_ref().to_string(),
                    })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_columns() {
        let cols = vec![
            Column::new("a", vec![CellValue::Null; 2]),
            Column::new("b", vec![CellValue::Null; 3]),
        ];
        assert!(matches!(Table::new("t", cols), Err(ModelError::Ragged { .. })));
    }

    #[test]
    fn rejects_blank_header() {
        let cols = vec![Column::new("  ", vec![])];
        assert!(matches!(
            Table::new("t", cols),
            Err(ModelError::EmptyColumnName { .. })
        ));
    }

    #[test]
    fn allows_duplicate_headers() {
        let t = Table::from_rows("t", ["x", "x"], vec![vec![1.into(), 2.into()]]).unwrap();
        assert_eq!(t.column_count(), 2);
        assert_eq!(t.column_index("x"), Some(0));
    }

    #[test]
    fn from_rows_checks_width() {
        let err = Table::from_rows("t", ["a", "b"], vec![vec![CellValue::Null]]).unwrap_err();
        assert!(matches!(err, ModelError::RowWidth { row: 1, .. }));
    }

    #[test]
    fn address_is_one_based() {
        let t = Table::from_rows("s", ["a"], vec![vec![1.into()]]).unwrap();
        assert_eq!(t.address(0, 0).a1(), "A1");
    }
}
