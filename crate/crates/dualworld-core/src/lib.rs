//! Dual-world constrained shortest paths for redirected walking.
#![no_std]

extern crate alloc;

pub mod geom;
pub mod grid;
pub mod math;
pub mod orient;
pub mod state;
pub mod world;
pub mod kinematics;
pub mod mil;
pub mod paths;
pub mod space;
pub mod table;
pub mod kinematic;
pub mod exact;
pub mod dewn;
pub mod baselines;
pub mod spatial;
pub mod fixtures;
