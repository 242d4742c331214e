//! Command-line front end for the `proxfence` engine: file formats, the rule
//! language and the subcommands.

pub mod catalog;
pub mod commands;
pub mod dsl;
pub mod error;
pub mod lexer;
pub mod trace;
pub mod world;
