//! Core algorithms for the semi-random graph process laboratory.
//!
//! The crate is `no_std` (with `alloc`) so the process engine, strategies,
//! oracles, optimizer and ODE integrators can be embedded anywhere; file
//! formats, the CLI and parallel drivers live in `semirandom-lab`.
//!
//! Vertices are 0-based `u32` ids throughout. The 1-based convention of the
//! mathematical literature only appears in I/O.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod engine;
pub mod error;
pub mod graph;
pub mod lower_bound;
pub mod property_p;
pub mod rng;
pub mod strategy;
pub mod twomatching;

pub use error::{Error, Result};
pub use graph::{EdgeColor, EdgeRecord, ProcessState, Vertex};
