//! Combinatorics of generalized Serre conditions.
//!
//! The crate implements exact arithmetic on the lattice of eventually-linear
//! staircase functions, standard numerical perversities and their duality,
//! finite depth-poset models of equidimensional schemes, the strictly-`S_rho`
//! example family, and certificate checking for `S_rho`-extension and finite
//! `S_rho`-ification criteria.

pub mod engine;
pub mod griffith;
pub mod model;
pub mod perversity;
pub mod suites;
pub mod tailed;
