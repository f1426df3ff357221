//! Operator tooling: load Turtle into the persistent store, seed demo or
//! generated data, run the competency-question suite and benchmark the
//! HTTP API against response-time budgets.

pub mod bench;
pub mod cq;
pub mod ops;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Store(#[from] extrucat_core::rdf::StoreError),
    #[error(transparent)]
    Seed(#[from] extrucat_core::seed::SeedError),
    #[error(transparent)]
    Cq(#[from] cq::CqError),
    #[error("{0}")]
    Input(String),
    #[error("bench: {0}")]
    Bench(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
