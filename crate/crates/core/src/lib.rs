//! Simulation and verification workbench for decoding a single quantum
//! insertion followed by a single quantum deletion on embedded qudit
//! deletion-correcting codes.
//!
//! The crate is split bottom-up:
//!
//! * [`seqcore`]: classical words, deletions, insertions and balls.
//! * [`editgraph`]: the indel-distance table, its typed-arc digraph and the
//!   two extremal backtracking routines that locate insertion candidates.
//! * [`qsim`]: qudit pure states and weighted ensembles, partial trace,
//!   insertion channels and projective measurement.
//! * [`basecode`]: the erasure-correcting base code as an explicit isometry.
//! * [`mhcode`]: the residue-embedded deletion code built on a base code.
//! * [`decoder`]: the end-to-end insertion-plus-deletion decoder.
//! * [`harness`]: experiment sweeps, exhaustive verifiers and reports.
//! * [`io`]: sequence text files, state dumps and code files.

pub mod basecode;
pub mod decoder;
pub mod editgraph;
pub mod error;
pub mod harness;
pub mod io;
pub mod mhcode;
pub mod qsim;
pub mod seqcore;

pub use error::{Error, Result};
