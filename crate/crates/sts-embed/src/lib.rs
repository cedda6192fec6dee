//! IO, file formats, experiments, and the command line for `sts-embed-core`.

pub mod budget;
pub mod cli;
pub mod experiment;
pub mod formats;
pub mod manifest;
