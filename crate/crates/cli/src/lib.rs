//! Configuration loading and subcommands of the `symqite` binary.

pub mod commands;
pub mod config;
