//! Simulator for graphical reconfigurable circuits: a synchronous model in
//! which nodes wire the pins of their incident edges into circuits and
//! communicate by beeping on them.

pub mod cutsim;
pub mod dsu;
pub mod engine;
pub mod graph;
pub mod harness;
pub mod mst;
pub mod primitives;
pub mod spanner;
pub mod verification;
