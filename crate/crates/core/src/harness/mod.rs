//! Strategy runner over a sequence of systems.
//!
//! [`run_sequence`] walks a [`SequenceSpec`](crate::problems::SequenceSpec)
//! in order, decides per system whether to refactor, map onto the current
//! reference, or reuse the last preconditioner, solves with GMRES, and
//! records one [`ReportRow`] per system.

mod config;
mod report;
mod run;
mod strategy;

pub use config::{parse_config, parse_config_str, RunConfig, DEFAULT_MAX_ITERS, DEFAULT_TALBOT_T};
pub use report::{
    parse_report_csv, render_report, PrecEvent, ReportFormat, ReportRow, SequenceReport,
    CSV_COLUMNS,
};
pub use run::{run_sequence, FactorFailurePolicy, PatternChoice, RunOptions};
pub use strategy::{Action, Strategy};
