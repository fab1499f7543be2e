//! Scorecards and report output.

mod render;
mod scorecard;

pub use render::{
    annotate, exit_status, finding_line, parse_structured, render_report, render_text, ReportFormat,
    StructuredReport, FLAGS_COLUMN, SCHEMA_VERSION,
};
pub use scorecard::{build_scorecard, error_rate, DimensionScore, Scorecard, NOT_ASSESSED};

use std::path::Path;
use std::time::{Duration, SystemTime};

use thiserror::Error;

use crate::checks::Finding;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write report: {0}")]
    Write(#[from] std::io::Error),
    #[error("malformed report: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported report schema version {0}")]
    Version(u32),
    #[error("inconsistent report: {0}")]
    Inconsistent(String),
}

/// A timeliness warning when `path` was last modified more than `max_age`
/// before `now`. File age is the only currency signal available offline.
pub fn check_timeliness(
    table: &str,
    path: &Path,
    max_age: Duration,
    now: SystemTime,
) -> std::io::Result<Option<Finding>> {
    let modified = std::fs::metadata(path)?.modified()?;
    let age = now.duration_since(modified).unwrap_or_default();
    Ok((age > max_age).then(|| {
        Finding::new(
            table,
            "timeliness",
            format!(
                "source file is {} old, older than the allowed {}",
                human_duration(age),
                human_duration(max_age)
            ),
        )
    }))
}

/// Parses `90s`, `15m`, `12h`, `30d` or a bare number of seconds.
pub fn parse_duration(text: &str) -> Result<Duration, String> {
    let text = text.trim();
    let (num, unit) = match text.char_indices().find(|(_, c)| !c.is_ascii_digit()) {
        Some((i, _)) => text.split_at(i),
        None => (text, "s"),
    };
    let n: u64 = num.parse().map_err(|_| format!("bad duration `{text}`"))?;
    let secs = match unit {
        "s" => 1,
        "m" => 60,
        "h" => 3_600,
        "d" => 86_400,
        "w" => 604_800,
        _ => return Err(format!("bad duration unit in `{text}` (use s, m, h, d or w)")),
    };
    Ok(Duration::from_secs(n * secs))
}

fn human_duration(d: Duration) -> String {
    let s = d.as_secs();
    match s {
        s if s >= 86_400 => format!("{}d", s / 86_400),
        s if s >= 3_600 => format!("{}h", s / 3_600),
        s if s >= 60 => format!("{}m", s / 60),
        s => format!("{s}s"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn durations() {
        assert_eq!(parse_duration("30d").unwrap(), Duration::from_secs(30 * 86_400));
        assert_eq!(parse_duration("45").unwrap(), Duration::from_secs(45));
        assert!(parse_duration("3y").is_err());
    }

    #[test]
    fn stale_file() {
        let f = tempfile::NamedTempFile::new().unwrap();
        let now = SystemTime::now() + Duration::from_secs(10 * 86_400);
        let hit = check_timeliness("t", f.path(), Duration::from_secs(86_400), now).unwrap();
        assert_eq!(hit.unwrap().check_id, "timeliness");
        assert!(
            check_timeliness("t", f.path(), Duration::from_secs(30 * 86_400), now)
                .unwrap()
                .is_none()
        );
    }
}
