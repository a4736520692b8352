//! File formats, a rayon executor and the `portmix` command-line front end
//! for `portmix-core`.

pub mod cli;
pub mod data;
pub mod error;
pub mod exec;
pub mod output;

pub use error::{CliError, Result};
