#![cfg_attr(not(test), no_std)]
//! Sampling designs spanning the spectrum from simple random sampling to
//! Latin hypercube sampling, with partially and fully latinized stratified
//! designs in between, plus the analysis tools (variance formulas, Sobol
//! indices, replication studies) used to compare them.
//!
//! The crate is `no_std` with `alloc`; IO, file formats, and parallel
//! execution live in the companion `pstrat` crate.

extern crate alloc;

pub mod analysis;
pub mod design_spec;
pub mod designs;
pub mod distributions;
mod error;
pub mod matrix;
pub mod rng;
pub mod strata;
pub mod testbed;

pub use error::{Error, Result};
