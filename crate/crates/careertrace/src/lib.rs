//! File formats, parallel pipeline, caching and reporting around
//! [`careertrace_core`], plus the `careertrace` command-line tool.

pub mod cache;
pub mod config;
pub mod io;
pub mod manifest;
pub mod pipeline;
pub mod report;
pub mod tables;

pub use careertrace_core as core;
