//! Learning compact LTLf formulas from labeled finite traces.
//!
//! The crate is organised around the learning pipeline:
//!
//! * [`ltl`] holds the formula syntax, finite-trace semantics, rewriting and
//!   random generation.
//! * [`data`] builds labeled trace datasets and reads/writes them as JSON lines.
//! * [`automata`] compiles formulas to minimal DFAs, decides equivalence and
//!   produces characteristic samples.
//! * [`neural`] is the recurrent temporal-filter network: forward pass,
//!   backpropagation through time, Adam training with activation annealing.
//! * [`extract`] discretizes trained filters into temporal truth tables and
//!   turns them back into formulas.
//! * [`logicmin`] is the two-level minimizer used during extraction.
//! * [`baseline`] contains enumerative exact and max-accuracy learners.
//! * [`pipeline`] orchestrates learning runs, experiments and reports.

pub mod automata;
pub mod baseline;
pub mod data;
pub mod extract;
pub mod logicmin;
pub mod ltl;
pub mod neural;
pub mod pipeline;
pub mod seed;

mod error;

pub use error::{Error, Result};
