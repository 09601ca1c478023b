//! Probabilistic rank fusion with a TREC-style evaluation harness.
//!
//! The crate merges ranked result lists from multiple retrieval systems
//! over the same collection. The main fuser learns, per system, how likely
//! a document at each rank is to be relevant (from training queries with
//! judgments) and smooths those estimates with a sliding window clamped to
//! the result-set boundaries; a document's fused score is the sum of its
//! window probabilities across the systems that returned it. Three
//! reference fusers ship alongside it:
//!
//! | Fuser | Training | Scoring |
//! |-------|----------|---------|
//! | SlideFuse | per-rank probabilities | windowed probability sum |
//! | CombMNZ | none | normalized score sum x overlap count |
//! | ProbFuse | equal-length segments | segment probability / segment index |
//! | SegFuse | exponential segments | segment probability x (1 + normalized score) |
//!
//! Evaluation covers MAP, bpref, and P10 under trec_eval conventions, and
//! the [`experiments`] module drives the full protocol: seeded query
//! shuffles, training/test splits, per-group averaging, vs.-best deltas
//! with paired t-tests, and a coefficient-of-variation sweep over training
//! sizes. All of it is deterministic for a fixed seed.

pub mod baselines;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod profiles;
pub mod slidefuse;
pub mod synthetic;
pub mod trec;

pub use error::{Error, Result};

pub use baselines::{
    combmnz, normalize_scores, probfuse_fuse, probfuse_train, segfuse_fuse, segfuse_train,
    SegmentProfile, Segmentation,
};
pub use experiments::{
    coefficient_of_variation, paired_t_test, run_experiment, run_experiment_on, split_queries,
    training_size_sweep, training_size_sweep_on, Algorithm, ExperimentConfig, ExperimentParams,
    ExperimentReport, RunGroup, Significance, SweepReport, TTestOutcome,
};
pub use metrics::{
    average_precision, bpref, evaluate_run, p10, MetricKind, MetricScores, Ranking, RunEvaluation,
};
pub use profiles::{build_profile, emit_probability_curve, render_curve, CurvePoint, RelevanceProfile};
pub use slidefuse::{
    window_bounds, window_probability, FusedList, FusionEnsemble, ScoredDoc, Window,
};
pub use trec::{
    load_qrels, load_run_file, parse_qrels, parse_run_file, render_qrels, render_run_file,
    render_system_run, write_run_file, Judgment, Qrels, RankedEntry, ResultList, SystemRun,
};
