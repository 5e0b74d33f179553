//! Emulation of the photon-counting experiment: seeded multinomial sampling,
//! phase estimators, the repeated-acquisition variance protocol, noise sweeps
//! and convergence studies.

mod estimators;
mod experiment;
mod rng;
mod sampling;

pub use estimators::{
    golden_section_max, inversion_estimator, mle_estimator, Estimator, MLE_TOLERANCE,
};
pub use experiment::{
    convergence_study, run_experiment, run_experiment_at, sample_variance, sweep_noise,
    with_threads, ConvergencePoint, ConvergenceStudy, ExperimentConfig, ExperimentResult, SweepRow,
};
pub use rng::{derive_seed, SeededRng};
pub use sampling::{binomial, sample_counts, Counts};
