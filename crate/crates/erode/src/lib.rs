//! Informational system for non-conventional debiting: stores machining
//! experiment records, fits polynomial models of processing time versus
//! electrical power, and computes optimal working regimes from the models.
//!
//! The typical pipeline is `store` (ingest and filter measurements) ->
//! `polyfit` (fit candidate polynomials, pick the best) -> `optimizer`
//! (minimize the chosen model over the admissible power range). `reference`
//! carries the bundled OL37 measurement series and previously circulated
//! models for it; `report` renders comparison tables, plots, and the
//! discrepancy analysis between refits and the reference models.

pub mod cli;
pub mod error;
pub mod optimizer;
pub mod polyfit;
pub mod reference;
pub mod report;
pub mod store;

pub use error::{Error, Result};
