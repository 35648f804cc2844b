//! Weather forecasting tasks from numeric time series: ingestion,
//! discretization, windowing into examples, synthetic planted-rule data and
//! cross-validated evaluation.

mod eval;
mod series;
mod synth;
mod window;

use thiserror::Error;

pub use eval::{
    baseline_compare, crossval, day_blocks, fold_train_blocks, predict, CrossvalConfig, CrossvalReport,
    FoldReport, Stump,
};
pub use series::{discretize, ingest, ColumnSpec, DiscreteColumn, DiscretizationSpec, LevelTable, SeriesTable};
pub use synth::{synthesize, SyntheticConfig};
pub use window::{build_task, TaskTemplate, WindowSpec, WindowedTask, TIME_TYPE};

use crate::ground::GroundError;
use crate::learn::LearnError;
use crate::solve::SolveError;

#[derive(Debug, Error)]
pub enum WeatherError {
    #[error("csv: {0}")]
    Csv(String),
    #[error("missing column: {0}")]
    MissingColumn(String),
    #[error("line {line}: timestamp {timestamp} does not increase")]
    NonMonotonic { line: usize, timestamp: i64 },
    #[error("line {line}: column {column}: {value:?} is not a finite number")]
    NonNumeric { line: usize, column: String, value: String },
    #[error("line {line}: column {column}: {value} lies below the lowest range")]
    BelowRange { line: usize, column: String, value: f64 },
    #[error("timestamp {0} does not fit a 32-bit integer")]
    TimestampRange(i64),
    #[error("discretization spec: {0}")]
    Spec(String),
    #[error("{0}")]
    Window(String),
    #[error("{rows} rows, need at least {needed}")]
    TooFewRows { rows: usize, needed: usize },
    #[error("{blocks} day-blocks cannot be split into {folds} folds")]
    InsufficientBlocks { blocks: usize, folds: usize },
    #[error("planted rule: {0}")]
    Planted(String),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Learn(#[from] LearnError),
}
