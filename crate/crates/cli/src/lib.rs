//! Batch front end for the `twistcohom` library: configs in, reports out.

pub mod config;
pub mod emit;
pub mod run;

use serde_json::{json, Value};

pub use config::{Backend, RunConfig};
pub use emit::{emit, output_dir, spectrum_csv, Format, OUT_DIR_ENV};
pub use run::{run, verify_suite, Verb};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error(transparent)]
    Model(#[from] twistcohom::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Model(_) => "model",
            CliError::Io(_) => "io",
        }
    }

    /// The single-line JSON record printed when a run cannot start or finish.
    pub fn record(&self) -> Value {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}
