//! Experiment sweeps, verification suites and their reports.
//!
//! Per-run seeds come from the master seed through [`derive_seed`], so a
//! sweep is reproducible regardless of thread count or scheduling.

pub mod config;
pub mod experiment;
pub mod verify;

pub use config::{ClassicalConfig, CodeConfig, DecodeMode, ExperimentConfig, Fault, OutputConfig, SigmaCatalogue};
pub use experiment::{
    build_message, build_sigma, cmd_experiment, derive_seed, run_experiment, splitmix64, write_csv, write_report,
    BranchRecord, RunRecord, SigmaKind, Summary, SweepReport, Timing,
};
pub use verify::{
    base_certificate, cmd_verify_classical, cmd_verify_quantum, BaseCertificate, CheckSummary, ClassicalReport,
    Counterexample, QuantumReport,
};
