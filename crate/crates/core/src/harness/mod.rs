//! Experiment harness: configuration, runners, conformance checks and CSV
//! output.
//!
//! * [`spec`]: [`ExperimentSpec`] and its `key = value` config format.
//! * [`run`]: problem instances, single traced runs, Table-1 style tables and
//!   the adaptive-vs-fixed comparison.
//! * [`check`]: finite-difference and oracle conformance checks.
//! * [`csvio`]: CSV layouts and atomic file writes.

pub mod check;
pub mod csvio;
pub mod run;
pub mod spec;

pub use check::{check_family, conformance_suite, finite_diff_check, CheckReport};
pub use csvio::{
    atomic_write, read_table_csv, read_trace_csv, write_cells_csv, write_compare_csv, write_factors_csv,
    write_table_csv, write_trace_csv,
};
pub use run::{
    compare_adaptive_nonadaptive, paired_run, run_experiment, run_experiment_with, run_single, Cell, CompareTable,
    Instance, PairedRun, ResultRow, ResultTable, RunOutcome, Snapshot, TraceRow,
};
pub use spec::{
    parse_config, parse_config_str, parse_grid, set_field, write_config, EstimateKind, ExperimentSpec, NoiseKind,
    SolverKind, Task,
};
