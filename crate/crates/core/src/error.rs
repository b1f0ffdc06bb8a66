use thiserror::Error;

use crate::automata::DfaError;
use crate::baseline::BaselineError;
use crate::data::DataError;
use crate::extract::ExtractError;
use crate::logicmin::MinimizeError;
use crate::ltl::{FormulaError, ParseError};
use crate::neural::NeuralError;

/// Crate-level error, wrapping the per-module errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Dfa(#[from] DfaError),
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Minimize(#[from] MinimizeError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
