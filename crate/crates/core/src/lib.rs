//! Exact q-series engine for the Donaldson-invariant generating functions of
//! CP2, its one-point blowup, and CP1 x CP1.

pub mod chambers;
pub mod cli;
pub mod engine;
pub mod error;
pub mod forms;
pub mod maass;
pub mod qseries;

pub use error::{Error, Result};
