//! Experiment driver: scheme wrappers, per-word length and 1-bit statistics,
//! normalisation of signal interval and molecule count across schemes,
//! error-rate evaluation over the simulated channel, and curves.

mod config;
mod experiment;
mod scheme;
mod stats;

pub use config::{CalibrationTable, ExperimentConfig};
pub use experiment::{
    calibrate_codec, calibration_setup, default_spacings, evaluate, grid_csv, normalized_channel, point_seed, random_words,
    receive, run_grid, score, stats_pair, symbol_error_rate, transmit, ErrorReport, GridRow, Transmission,
};
pub use scheme::{Codec, Scheme};
pub use stats::{
    codebook_stats, curve, normalize, scheme_stats, word_seed, Analysis, CurveTable, Normalization, NormalizedConfig,
    SchemeStats,
};
