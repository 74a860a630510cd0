//! Constructive two-dimensional continued fractions built from regular
//! (unimodular) cones and Farey-mediant starrings.
//!
//! The pipeline is exact end to end: coordinates are rationals or elements
//! of Q(√5), and every geometric predicate is decided on squared quantities.
//!
//! * [`exactnum`]: rationals, Q(√5), rational intervals.
//! * [`lattice_geom`]: regular cones, triangles, dual cones, lines.
//! * [`starring`]: mediants and binary starrings.
//! * [`accessor`]: the stage-by-stage construction of nested regular cones
//!   whose triangles keep every angle above a threshold θ.
//! * [`metrics`]: identity checks, ratio bounds and certified distances.
//! * [`trace`], [`render`], [`cli`]: file formats and the command line.

pub mod accessor;
pub mod cli;
pub mod error;
pub mod exactnum;
pub mod lattice_geom;
pub mod metrics;
pub mod render;
pub mod starring;
pub mod trace;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
