//! Library surface of the `wva-lab` binary, exposed for integration tests.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod grid;
pub mod output;
