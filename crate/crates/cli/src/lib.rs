//! Command-line front end for SimpleLang symbolic testing.

pub mod driver;
pub mod parse;
pub mod report;

pub use driver::{run_file, run_source, DriverError, RunConfig, RunOutcome};
pub use parse::{parse_program, ParseError};
pub use report::{Format, Report};
