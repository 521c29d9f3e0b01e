//! Subcommand pipeline around the `ontorel` libraries. Each stage reads
//! the files written by earlier stages from the output directory and
//! writes only its own.

pub mod error;
pub mod manifest;
pub mod stages;

pub use error::{CliError, CliResult};
pub use manifest::RunManifest;
pub use stages::RunContext;
