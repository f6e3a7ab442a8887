//! Scenario runner: configuration files, the bench experiments, parameter
//! calibration, and CSV emission.

mod calibrate;
mod config;
mod output;
mod scenarios;

pub use calibrate::{calibrate, evaluate, CalibrationReport, FittedTarget};
pub use config::{
    CalibrationConfig, CalibrationTarget, ExperimentConfig, Observable, Parameter, RunConfig,
    CALIBRATED_PRESET, IDEAL_PRESET,
};
pub use output::*;
pub use scenarios::{
    fringe_observables, ghz_basis_ratio, herald_ratio, noise_row, qubit_detection_prob,
    run_basis_states, run_fringe, run_ghz, run_noise_tradeoff, BasisReport, ErrorPath,
    FringeReport, GhzReport, NoiseReport, NoiseRow, Sampling,
};
