//! Spectral analysis on Sierpinski fractafolds and their cell and edge graphs.
//!
//! Modules follow the computational pipeline: the one-dimensional dynamics of
//! [`decimation`], finite graphs in [`graph`], closed forms on the 3-regular
//! tree in [`tree`], periodic examples in [`lattice`], fractafold assembly in
//! [`fractafold`], and the check suites driven by the command line in [`verify`].

pub mod decimation;
pub mod error;
pub mod fractafold;
pub mod graph;
pub mod lattice;
pub mod quad;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
