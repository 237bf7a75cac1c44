//! Experiment configuration, Monte-Carlo execution and CSV output.

pub mod config;
pub mod experiment;
pub mod output;
pub mod sinr;

pub use config::{AlgorithmConfig, AlgorithmKind, BoundConfig, ExperimentConfig, ScenarioConfig};
pub use experiment::{run_experiment, AlgorithmResults, ExperimentResults, RunResult};
pub use output::{plot_script, write_csv, LONG_CSV, SUMMARY_CSV};
pub use sinr::{output_sinr, SinrMeter};
