//! File formats, caching and pipelines around `iwasawa-core`.

pub mod app;
pub mod cache;
pub mod curve_io;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod table_io;

pub use error::{CliError, CliResult};
pub use pipeline::{run_pipeline, run_until, Format, Run, RunConfig, Stage, TableMode};
pub use report::Report;
