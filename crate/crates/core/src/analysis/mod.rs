//! Estimators over coincidence records.
//!
//! Every estimator has a count-level entry point taking `f64` counts, so noise-free
//! expected counts can be analyzed with the same code as sampled data.

mod bootstrap;
mod chsh;
mod classify;
mod fringe;

pub use bootstrap::{bootstrap_counts, bootstrap_error, DEFAULT_RESAMPLES};
pub use chsh::{
    chsh_counts, chsh_from_counts, chsh_s, chsh_signs, correlation_e, deterministic_chsh,
    ChshAngles, ChshResult, CorrelationTerm,
};
pub use classify::{
    basic_counts, bell_pattern, classify_bell, classify_counts, ClassificationResult,
    CONFIDENCE_MARGIN,
};
pub use fringe::{fit_fringe, sweep_points, visibility_from_points, visibility_from_records, FringeFit};
