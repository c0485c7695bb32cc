//! Experiment plumbing: data files, splits, configuration, fixtures, the
//! end-to-end run and the self-test.

mod config;
mod dataset;
mod run;
mod selftest;
mod split;
mod synth;

pub use config::{
    AnsatzSettings, AqgdSettings, CobylaSettings, FeatureMapSettings, FeatureSettings, RunConfig, SplitSettings,
    TrainSettings,
};
pub use dataset::{load_dataset, parse_dataset, sha256_hex, write_tsv, Dataset, Provenance, Review};
pub use run::{
    evaluate, fit, preprocess, run_experiment, score, write_report, LexiconRef, ModelArtifact, Preprocessed,
    ResultRecord, RunOutcome, RunPaths, Staging, TrainSummary, MODEL_FILE, MODEL_FORMAT, RECORD_FILE, RECORD_FORMAT,
    REPORT_CSV, REPORT_MD,
};
pub use selftest::{
    check_gradient, check_inverse, check_norm, check_published, fscore_from_rounded, selftest, Check, METRIC_TOL,
};
pub use split::{shuffled_indices, split, split_indices, SplitIndices, SplitMix64, SplitSpec};
pub use synth::{synthetic_review, synthetic_reviews, toy_dataset, ReviewStyle};
