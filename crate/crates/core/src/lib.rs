pub mod analytics;
pub mod audit;
pub mod checks;
pub mod cli;
pub mod compare;
pub mod generate;
pub mod ingest;
pub mod model;
pub mod report;
