use super::csv_io::{parse_boolean, parse_date, parse_number, parse_number_lenient};
use super::IngestOptions;
use crate::model::{CellValue, Column, ColumnSpec, DataType, FormatPattern, Schema, Table, ValueRange};

fn parses_as(cell: &CellValue, ty: DataType, opts: &IngestOptions) -> bool {
    match (ty, cell) {
        (_, CellValue::Null) => true,
        (DataType::Text, _) => true,
        (DataType::Number, CellValue::Number(_)) => true,
        (DataType::Number, CellValue::Text(s)) => parse_number(s, opts.decimal_separator).is_some(),
        (DataType::Date, CellValue::Date(_)) => true,
        (DataType::Date, CellValue::Text(s)) => parse_date(s, opts).is_some(),
        (DataType::Boolean, CellValue::Boolean(_)) => true,
        (DataType::Boolean, CellValue::Text(s)) => parse_boolean(s).is_some(),
        _ => false,
    }
}

/// Infers a schema from the first `sample_size` rows with default options.
pub fn infer_types(table: &Table, sample_size: usize) -> Schema {
    infer_types_with(table, sample_size, &IngestOptions::default())
}

/// Picks, per column, the narrowest type that every non-null sampled cell
/// parses as, trying number, date, boolean, then text. Nullability and the
/// numeric range are taken over the whole column.
pub fn infer_types_with(table: &Table, sample_size: usize, opts: &IngestOptions) -> Schema {
    let sample_size = sample_size.max(1);
    let mut schema = Schema::new(table.name());
    for column in table.columns() {
        let sample: Vec<&CellValue> = column
            .cells
            .iter()
            .take(sample_size)
            .filter(|c| !c.is_null())
            .collect();
        let data_type = if sample.is_empty() {
            DataType::Text
        } else {
            [DataType::Number, DataType::Date, DataType::Boolean]
                .into_iter()
                .find(|ty| sample.iter().all(|c| parses_as(c, *ty, opts)))
                .unwrap_or(DataType::Text)
        };
        let mut spec = ColumnSpec::new(column.name.clone(), data_type);
        spec.nullable = column.cells.iter().any(CellValue::is_null);
        if data_type == DataType::Number {
            spec.range = numeric_bounds(column, opts);
        }
        schema.columns.push(spec);
    }
    schema
}

fn numeric_bounds(column: &Column, opts: &IngestOptions) -> Option<ValueRange> {
    let mut bounds: Option<(rust_decimal::Decimal, rust_decimal::Decimal)> = None;
    for cell in &column.cells {
        let v = match cell {
            CellValue::Number(d) => *d,
            CellValue::Text(s) => match parse_number(s, opts.decimal_separator) {
                Some(d) => d,
                None => continue,
            },
            _ => continue,
        };
        bounds = Some(match bounds {
            None => (v, v),
            Some((lo, hi)) => (lo.min(v), hi.max(v)),
        });
    }
    bounds.map(|(lo, hi)| ValueRange::numbers(lo, hi))
}

/// Converts cells to their declared types where the text allows it. Cells
/// that cannot convert are left as they are for the validity check to
/// report. Number columns accept leading zeros here (`007` → 7).
pub fn coerce_to_schema(table: &Table, schema: &Schema, opts: &IngestOptions) -> Table {
    let columns = table
        .columns()
        .iter()
        .map(|column| match schema.spec(&column.name) {
            None => column.clone(),
            Some(spec) => Column::new(
                column.name.clone(),
                column.cells.iter().map(|c| coerce_cell(c, spec, opts)).collect(),
            ),
        })
        .collect();
    Table::new(table.name(), columns).expect("coercion keeps the table rectangular")
}

pub fn coerce_cell(cell: &CellValue, spec: &ColumnSpec, opts: &IngestOptions) -> CellValue {
    match (spec.data_type, cell) {
        (_, CellValue::Null) => CellValue::Null,
        (DataType::Text, CellValue::Text(_)) => cell.clone(),
        (DataType::Text, other) => CellValue::Text(other.to_string()),
        (DataType::Number, CellValue::Text(s)) => {
            parse_number_lenient(s, opts.decimal_separator).map_or_else(|| cell.clone(), CellValue::Number)
        }
        (DataType::Date, CellValue::Text(s)) => {
            let parsed = match &spec.format {
                Some(FormatPattern::Date { strftime, .. }) => crate::model::parse_date_strict(s, strftime),
                _ => None,
            };
            parsed
                .or_else(|| parse_date(s, opts))
                .map_or_else(|| cell.clone(), CellValue::Date)
        }
        (DataType::Boolean, CellValue::Text(s)) => {
            parse_boolean(s).map_or_else(|| cell.clone(), CellValue::Boolean)
        }
        _ => cell.clone(),
    }
}
