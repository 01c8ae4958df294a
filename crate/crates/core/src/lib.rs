//! Numerical core for ψ-Hilfer fractional evolution control systems on the
//! Dirichlet heat spectrum of L²(0, π).
//!
//! Everything here is pure and allocation-only (`no_std` + `alloc`); file
//! formats, configuration and the command line live in the companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod quad;
pub mod inclusion;
pub mod linctl;
pub mod probctl;
pub mod psicalc;
pub mod spectral;
pub mod specfn;

pub use error::{Error, Result};
