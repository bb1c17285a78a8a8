//! Std companion to [`homsim_core`]: strict JSON configs, parameter sweeps,
//! CSV / JSON-lines output and the `homsim` command-line front end.

pub mod commands;
pub mod config;
pub mod error;
pub mod sweep;

pub use config::{load, parse_str, Overrides, Setup};
pub use error::AppError;
