//! Deterministic approximate counting for the ferromagnetic Ising model in
//! the Lee-Yang zero-free region, together with the verification machinery
//! around it: exact enumeration oracles, truncated-series arithmetic,
//! self-avoiding-walk trees, divisibility checkers for several model
//! families, a spatial-mixing decay harness, and random-cluster dynamics.
//!
//! The main entry point for approximation is [`fptas::approx_z`], which
//! telescopes the partition function over edge deletions and approximates
//! each edge-deletion ratio by a truncated Taylor series computed on
//! self-avoiding-walk trees. Everything it produces can be checked against
//! the brute-force oracles in [`exact`].
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `zfc` binary for a batch command-line frontend.

pub mod error;
pub mod graph;
pub mod scalar;
pub mod series;
pub mod rational;
pub mod exact;
pub mod sawtree;
pub mod fptas;
pub mod ldc;
pub mod enumerate;
pub mod ssm;
pub mod rc;
pub mod ext;
pub mod io;
pub mod cli;

pub use error::{Error, Result};
