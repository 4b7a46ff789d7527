//! Experiment runner, EMD sweeps, and the invariant verification suite.

pub mod corpus;
pub mod report;
pub mod sweep;
pub mod verify;

pub mod calibration;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("verification corpus is empty")]
    EmptyCorpus,
    #[error("sweep target {target} unreachable within the support bound")]
    TargetUnreachable { target: f64 },
    #[error("sweep targets must be nonnegative and strictly increasing")]
    BadTargets,
    #[error(transparent)]
    Predictor(#[from] crate::predictors::PredictorError),
    #[error(transparent)]
    Dist(#[from] crate::dist::DistError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub use corpus::{builtin_corpus, Corpus, CorpusInstance, DEFAULT_SEED};
pub use report::{emit_reports, run_instance, ExperimentReport, ReportFormat, CSV_HEADER};
pub use sweep::{sweep_emd, SweepSpec};
pub use verify::{registered_checks, verify_suite, InvariantCheck, VerifySummary, Violation};
