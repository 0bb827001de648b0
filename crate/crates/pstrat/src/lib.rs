//! Std companion to `pstrat-core`: JSON experiment plans, built-in presets,
//! parallel replication, and CSV/JSON output.

pub mod config;
pub mod io;
pub mod presets;
pub mod run;
