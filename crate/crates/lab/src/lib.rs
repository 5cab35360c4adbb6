//! Experiment harness for the semi-random graph process: file formats,
//! parallel drivers and the `semirandom` command line.

pub mod cli;
pub mod edgelist;
pub mod experiments;
pub mod output;
pub mod seeds;
pub mod trace;
