//! Experiment harness: phantom, noise, PSNR and scripted runs.

pub mod experiment;
pub mod metrics;
mod noise;
mod phantom;

pub use experiment::{
    load_experiment, run_experiment, Db, DriverSpec, ExperimentConfig, ExperimentOutcome,
    InputSpec, OutputSpec, RunReport,
};
pub use metrics::{best_in_trace, calls_to_reach, mse, psnr, psnr_signals};
pub use noise::{add_noise, NoiseSpec};
pub use phantom::{phantom, Ellipse, MODIFIED_SHEPP_LOGAN};
