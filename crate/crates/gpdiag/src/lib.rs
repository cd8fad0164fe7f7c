//! Parameter sweeps, figure recipes and CSV output for the driven cascade.

pub mod config;
pub mod recipes;
pub mod sweep;
