//! Seeded experiments over the principal-agent simulators: configuration,
//! parallel seed fan-out, CSV output and SVG regret plots.

pub mod config;
pub mod error;
pub mod experiment;
pub mod oracle;
pub mod plot;
pub mod summary;

pub use config::{Algorithm, ExperimentConfig, InstanceSpec, Setting};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, simulate, worker_count, ExperimentOutput, RunCurves};
pub use oracle::oracle_ucb_run;
pub use plot::{emit_plot, plot_file};
pub use summary::{summarize, Summary};
