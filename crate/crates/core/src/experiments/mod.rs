//! Configured experiments: quantization, robustness, stacking and
//! base-point independence, plus the plain generate / spectrum / index runs.

pub mod config;
mod report;
mod runs;

pub use config::{Format, Kind, RunConfig};
pub use report::{
    judge, ExperimentReport, RecordStatus, TrialRecord, Verdict, KITAEV_TOL, SPECTRUM_TOL, STACK_KERNEL_TOL,
};
pub use runs::{build_lattice, derive_seed, run, Artifacts, RunOptions, RunOutput, LOCALIZER_SPECTRUM_LIMIT};
