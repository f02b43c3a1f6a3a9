//! File formats, world generators, the benchmark harness and SVG export
//! around `dualworld-core`.

pub mod gen;
pub mod harness;
pub mod io;
pub mod memo;
pub mod svg;

pub use dualworld_core as core;
