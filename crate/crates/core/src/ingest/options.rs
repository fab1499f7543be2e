use std::collections::BTreeSet;

/// Day/month order for slash-separated dates. Without one, slash dates
/// (and every two-digit-year pattern) stay disabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DateLocale {
    /// `DD/MM/YYYY`, `DD/MM/YY`
    DayFirst,
    /// `MM/DD/YYYY`, `MM/DD/YY`
    MonthFirst,
}

impl std::str::FromStr for DateLocale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dmy" | "day-first" | "dd/mm/yy" => Ok(DateLocale::DayFirst),
            "mdy" | "month-first" | "mm/dd/yy" => Ok(DateLocale::MonthFirst),
            _ => Err(format!("unknown date locale `{s}` (expected dmy or mdy)")),
        }
    }
}

pub const ISO_DATE_PATTERNS: [&str; 3] = ["%Y-%m-%d", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestOptions {
    pub delimiter: u8,
    pub has_header: bool,
    pub decimal_separator: char,
    /// strftime patterns tried in order when a cell is not a number.
    pub date_patterns: Vec<String>,
    pub null_tokens: BTreeSet<String>,
    pub trim_whitespace: bool,
    /// Replace invalid UTF-8 instead of failing.
    pub lossy_utf8: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            has_header: true,
            decimal_separator: '.',
            date_patterns: ISO_DATE_PATTERNS.iter().map(|s| s.to_string()).collect(),
            null_tokens: ["", "NA", "NULL"].iter().map(|s| s.to_string()).collect(),
            trim_whitespace: true,
            lossy_utf8: false,
        }
    }
}

impl IngestOptions {
    /// Enables slash-separated dates in the given day/month order, after the
    /// ISO patterns.
    pub fn with_locale(mut self, locale: DateLocale) -> Self {
        let extra: [&str; 2] = match locale {
            DateLocale::DayFirst => ["%d/%m/%Y", "%d/%m/%y"],
            DateLocale::MonthFirst => ["%m/%d/%Y", "%m/%d/%y"],
        };
        for p in extra {
            if !self.date_patterns.iter().any(|q| q == p) {
                self.date_patterns.push(p.to_string());
            }
        }
        self
    }

    pub fn with_delimiter(mut self, delimiter: u8) -> Self {
        self.delimiter = delimiter;
        self
    }

    pub fn without_header(mut self) -> Self {
        self.has_header = false;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.date_patterns.is_empty() {
            return Err("at least one date pattern is required".into());
        }
        if self.delimiter == b'"' || self.delimiter == b'\n' || self.delimiter == b'\r' {
            return Err("delimiter cannot be a quote or line break".into());
        }
        if self.decimal_separator == self.delimiter as char {
            return Err("decimal separator cannot equal the delimiter".into());
        }
        Ok(())
    }

    /// Text written for a Null cell so that it reads back as Null.
    pub(crate) fn null_output(&self) -> &str {
        if self.null_tokens.contains("") {
            ""
        } else {
            self.null_tokens.iter().next().map_or("", String::as_str)
        }
    }
}
