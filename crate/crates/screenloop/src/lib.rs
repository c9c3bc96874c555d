//! Host-side companion to `screenloop-core`: file formats, dataset
//! preparation, campaign execution with per-seed output directories,
//! statistical self-checks, and the command-line interface.

pub mod cli;
pub mod config_file;
pub mod data;
pub mod error;
pub mod logio;
pub mod report;
pub mod runner;
pub mod synth;
pub mod validate;
