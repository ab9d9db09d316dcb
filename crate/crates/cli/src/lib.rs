//! Command-line front end: JSON configs with flag overrides, and CSV, JSON
//! and SVG exports.

pub mod commands;
pub mod config;
pub mod format;
