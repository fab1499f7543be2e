use std::path::{Path, PathBuf};

use super::{load_csv, IngestError, IngestOptions, StructuralWarning};
use crate::model::Table;

/// Name of the optional manifest inside a workbook directory.
pub const MANIFEST: &str = "workbook.manifest";

/// An ordered set of uniquely named tables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Workbook {
    tables: Vec<Table>,
}

impl Workbook {
    pub fn new(tables: Vec<Table>) -> Result<Self, IngestError> {
        let mut wb = Workbook::default();
        for t in tables {
            wb.push(t)?;
        }
        Ok(wb)
    }

    pub fn push(&mut self, table: Table) -> Result<(), IngestError> {
        if self.get(table.name()).is_some() {
            return Err(IngestError::DuplicateSheet(table.name().to_string()));
        }
        self.tables.push(table);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name() == name)
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }
}

/// Loads a directory of CSV files, one per sheet.
///
/// With a `workbook.manifest`, sheets come in manifest order; each line is
/// `<sheet name>: <file>` or just `<file>` (sheet named after the file
/// stem), `#` starts a comment. Without one, every `*.csv` file is loaded in
/// file-name order.
pub fn load_workbook(
    dir: impl AsRef<Path>,
    opts: &IngestOptions,
) -> Result<(Workbook, Vec<(String, StructuralWarning)>), IngestError> {
    let dir = dir.as_ref();
    let io_err = |source| IngestError::Io {
        path: dir.display().to_string(),
        source,
    };
    let manifest = dir.join(MANIFEST);
    let entries: Vec<(Option<String>, PathBuf)> = if manifest.exists() {
        let text = std::fs::read_to_string(&manifest).map_err(io_err)?;
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| match l.split_once(':') {
                Some((name, file)) => (Some(name.trim().to_string()), dir.join(file.trim())),
                None => (None, dir.join(l)),
            })
            .collect()
    } else {
        let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(io_err)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
            .collect();
        files.sort();
        files.into_iter().map(|p| (None, p)).collect()
    };
    let mut wb = Workbook::default();
    let mut warnings = Vec::new();
    for (name, path) in entries {
        let mut loaded = load_csv(&path, opts)?;
        if let Some(name) = name {
            loaded.table.set_name(name);
        }
        let sheet = loaded.table.name().to_string();
        warnings.extend(loaded.warnings.into_iter().map(|w| (sheet.clone(), w)));
        wb.push(loaded.table)?;
    }
    Ok((wb, warnings))
}
