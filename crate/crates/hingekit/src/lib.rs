//! File formats, reports, seeded sweeps and the command-line interface for
//! [`hingekit_core`].

pub mod cli;
pub mod json;
pub mod report;
pub mod sweep;

pub use cli::run;
