//! Seeded test-data generation, error injection and detection scoring.
//!
//! Every random draw comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`, which yields the same stream on every platform.

mod detect;
mod fill;
mod inject;

pub use detect::{measure_detection, DetectionReport, KindDetection};
pub use fill::{generate_table, Fill};
pub use inject::{inject_errors, parse_weighted_kinds, ErrorKind, Injection, InjectionLog, InjectionTarget};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("column `{column}` cannot be generated: {reason}")]
    UnsatisfiableSpec { column: String, reason: String },
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("no cell supports any of the requested error kinds")]
    NothingEligible,
    #[error("invalid injection settings: {0}")]
    BadConfig(String),
    #[error("log entry {entry} points outside the table: {reason}")]
    LogMismatch { entry: usize, reason: String },
}

fn rng_for(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
