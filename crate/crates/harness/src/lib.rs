//! Monte-Carlo experiments for AMP and OAMP: configuration, presets,
//! seeded trial execution, state-evolution predictions and result files.

// `!(x >= 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod emit;
pub mod presets;
pub mod ptc;
pub mod runner;

pub use config::{Algorithm, ConfigFile, DenoiserSpec, ExperimentConfig, PtcConfig, SeSpectrum};
pub use emit::{Format, ResultRow};
pub use ptc::{phase_transition, PtcPoint, PtcResult};
pub use runner::{run_experiment, state_evolution, CurveResult, ExperimentResult};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Numeric(#[from] oamp_core::OampError),
    #[error("output error: {0}")]
    Output(String),
}
