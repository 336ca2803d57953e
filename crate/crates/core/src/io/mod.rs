//! Configuration files, spectral-state snapshots and CSV reports.

pub mod config;
pub mod report;
pub mod state;

pub use config::{parse_config, RunConfig};
pub use report::{
    counting_report, emit_report, estimate_report, omega_report, trajectory_report, triad_report, uniqueness_report, Cell,
    Report, TRAJECTORY_COLUMNS, TRIAD_COLUMNS,
};
pub use state::{decode_state, encode_state, load_state, save_state, BASIS_TAG, FORMAT_VERSION};
