//! Simulation core for the K4-free random graph process.
//!
//! The process starts from the empty graph on `n` vertices and repeatedly adds
//! a uniformly random pair whose insertion does not complete a copy of `K4`.
//! This crate keeps the exact edge/open/closed partition of all vertex pairs
//! up to date, and layers instrumentation on top of it: configuration-attached
//! triple ledgers, trajectory envelopes, density monitors, a
//! differential-equation-method harness and terminal-graph analytics.
//!
//! The crate is `no_std` (with `alloc`); IO, timing and parallel sweeps live in
//! the companion `k4free-lab` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bitset;
pub mod dem;
pub mod density;
pub mod error;
pub mod graph;
pub mod interval;
mod math;
pub mod oracle;
pub mod pair;
pub mod params;
pub mod process;
pub mod rng;
pub mod sigma_star;
pub mod stats;
pub mod trajectory;
pub mod triples;

pub use error::Error;
pub use graph::AdjMatrix;
pub use pair::Pair;
pub use params::{Mode, ParamSet};
pub use process::{
    ClosureWitness, PairClass, ProcessState, RunSummary, StepEvent, StepObserver, StopRule,
};

pub type Result<T, E = Error> = core::result::Result<T, E>;
