//! Simulator and analysis toolkit for beam-splitter quantum random number
//! generation.
//!
//! * [`qcore`]: states, bases, Born-rule sampling, seeded substreams.
//! * [`protocols`]: single-particle conjugate-mismatch trials, singlet EPR
//!   trials (fixed and adaptive), detector imperfections, correlation and
//!   CHSH estimators.
//! * [`extract`]: downgrading n-ary streams, XOR combination, von Neumann
//!   debiasing, MSB-first bit packing.
//! * [`statkit`]: finite-sample statistical battery.
//! * [`cli`]: run configuration, generation/analysis pipelines, reports.
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example` lists them.

pub mod cli;
pub mod error;
pub mod extract;
pub mod protocols;
pub mod qcore;
pub mod statkit;

pub use error::{Error, Result};
