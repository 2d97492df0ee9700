//! Command-line front end: session configuration, the expression language
//! and the subcommands.

pub mod commands;
pub mod config;
pub mod parse;

pub use commands::{CliError, Report, VerifyOptions};
pub use config::{Format, Overrides, Session, SessionConfig};
pub use parse::{parse_expression, parse_words, ParseError};
