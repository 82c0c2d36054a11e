//! Ensemble sweeps over interaction strength and disorder realizations.

mod config;
mod output;
mod run;

pub use config::{
    ExperimentConfig, InitialKind, InitialStateConfig, Observable, SeedConfig, DEFAULT_BASE_SEED, DEFAULT_REALIZATIONS,
    DEFAULT_U_GRID,
};
pub use output::{designs, emit_outputs, fmt_num, prepare_output_dir, run_experiment, write_designs};
pub use run::{
    compute_ensemble, params_hash, CellResult, EnsembleResult, FailureRecord, RealizationRecord, GAMMA_SUM_TOL, NORM_TOL,
    PROBE_TOL,
};
