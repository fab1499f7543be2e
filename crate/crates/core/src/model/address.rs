use std::fmt;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Largest column index a spreadsheet grid addresses (`XFD`).
pub const MAX_COLUMN: u32 = 16_384;

/// A cell position: table name plus 1-based row and column.
///
/// Rows count data rows only; the header line is not row 1.
/// Serializes as `sheet!A1` text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellAddress {
    pub sheet: String,
    pub row: u32,
    pub column: u32,
}

impl CellAddress {
    pub fn new(sheet: impl Into<String>, row: u32, column: u32) -> Self {
        debug_assert!(row >= 1 && column >= 1);
        Self {
            sheet: sheet.into(),
            row,
            column,
        }
    }

    /// Builds an address from 0-based indices.
    pub fn from_index(sheet: &str, row: usize, column: usize) -> Self {
        Self::new(sheet, row as u32 + 1, column as u32 + 1)
    }

    pub fn a1(&self) -> String {
        address_to_a1(self)
    }
}

impl fmt::Display for CellAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}!{}", self.sheet, self.a1())
    }
}

impl Serialize for CellAddress {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CellAddress {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        if !s.contains('!') {
            return Err(serde::de::Error::custom(format!(
                "address `{s}` lacks a sheet name"
            )));
        }
        a1_to_address("", &s).map_err(serde::de::Error::custom)
    }
}

/// Bijective base-26 column letters: 1 → `A`, 26 → `Z`, 27 → `AA`.
pub fn column_letters(mut column: u32) -> String {
    let mut out = Vec::new();
    while column > 0 {
        let rem = (column - 1) % 26;
        out.push(b'A' + rem as u8);
        column = (column - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

/// Parses column letters back to a 1-based index.
pub fn letters_to_column(letters: &str) -> Option<u32> {
    if letters.is_empty() {
        return None;
    }
    let mut col: u32 = 0;
    for b in letters.bytes() {
        let b = b.to_ascii_uppercase();
        if !b.is_ascii_uppercase() {
            return None;
        }
        col = col.checked_mul(26)?.checked_add(u32::from(b - b'A') + 1)?;
    }
    Some(col)
}

pub fn address_to_a1(addr: &CellAddress) -> String {
    format!("{}{}", column_letters(addr.column), addr.row)
}

/// Inverse of [`address_to_a1`]. Accepts `B5` or `sheet!B5`; a sheet prefix
/// in the text overrides `default_sheet`.
pub fn a1_to_address(default_sheet: &str, text: &str) -> Result<CellAddress, ModelError> {
    let bad = || ModelError::BadAddress(text.to_string());
    let (sheet, cell) = match text.rsplit_once('!') {
        Some((s, c)) => (s, c),
        None => (default_sheet, text),
    };
    let split = cell.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?;
    let (letters, digits) = cell.split_at(split);
    let column = letters_to_column(letters).ok_or_else(bad)?;
    let row: u32 = digits.parse().map_err(|_| bad())?;
    if row == 0 || digits.starts_with('0') {
        return Err(bad());
    }
    Ok(CellAddress::new(sheet, row, column))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn oracle_letters(col: u32) -> String {
        // enumerate: A..Z, AA..ZZ, AAA.. in order
        let mut n = col;
        let mut len = 1;
        let mut block = 26u64;
        while u64::from(n) > block {
            n -= block as u32;
            len += 1;
            block *= 26;
        }
        let mut idx = n - 1;
        let mut chars = vec![b'A'; len];
        for slot in chars.iter_mut().rev() {
            *slot = b'A' + (idx % 26) as u8;
            idx /= 26;
        }
        String::from_utf8(chars).unwrap()
    }

    #[test]
    fn a1_examples() {
        assert_eq!(address_to_a1(&CellAddress::new("t", 1, 1)), "A1");
        assert_eq!(address_to_a1(&CellAddress::new("t", 10, 27)), "AA10");
        assert_eq!(address_to_a1(&CellAddress::new("t", 5, 2)), "B5");
        assert_eq!(column_letters(MAX_COLUMN), "XFD");
    }

    #[test]
    fn letters_match_enumeration_oracle() {
        for col in 1..=MAX_COLUMN {
            assert_eq!(column_letters(col), oracle_letters(col), "column {col}");
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(a1_to_address("t", "A0").is_err());
        assert!(a1_to_address("t", "11").is_err());
        assert!(a1_to_address("t", "A").is_err());
        assert!(a1_to_address("t", "A01").is_err());
        let a = a1_to_address("t", "sales!C7").unwrap();
        assert_eq!(a, CellAddress::new("sales", 7, 3));
    }

    proptest! {
        #[test]
        fn a1_round_trip(row in 1u32..2_000_000, col in 1u32..=MAX_COLUMN) {
            let addr = CellAddress::new("sheet", row, col);
            prop_assert_eq!(a1_to_address("sheet", &address_to_a1(&addr)).unwrap(), addr);
        }
    }
}
