//! File IO, JSON documents and the `haltkit` command line on top of
//! `haltkit-core`.

pub mod cli;
pub mod io;
pub mod json;

pub use io::{load_corpus, save_corpus, IoError};
