//! Command-line front end: ring-definition files, expression and element
//! syntax, and report formatting.

pub mod commands;
pub mod error;
pub mod report;
pub mod ringfile;
pub mod syntax;

pub use commands::run;
pub use error::{CliError, ParseError};
pub use ringfile::{emit_ring, parse_ring};
