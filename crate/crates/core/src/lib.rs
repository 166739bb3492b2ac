//! Coined quantum walk search on a two-dimensional torus.
//!
//! The crate has three layers:
//!
//! - a dense state-vector simulator of the discrete-time walk with a Grover
//!   coin, a flip-flop shift, and marked sites whose coin is replaced by -I
//!   ([`grid`], [`walk`]);
//! - the search pipeline built on it: stopping-time selection, distance
//!   profiles of the measurement distribution, sampled measurements, and the
//!   classical neighborhood check that locates a marked site from a
//!   measurement outcome ([`search`]);
//! - the analysis machinery that predicts what the simulator measures:
//!   momentum-space eigenpairs of the unmarked step operator and the
//!   reconstructed pre-measurement state ([`spectral`]), and the lattice
//!   Green-function sums whose differences approximate the final amplitude
//!   profile ([`analytic`]).
//!
//! Everything is double precision, deterministic for a fixed seed, and
//! independent of the worker-thread count.

pub mod analytic;
pub mod error;
pub mod grid;
pub mod search;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use grid::{wrap, Direction, GridGeometry, MarkedSet, Site, WalkState};
