//! Exact-diagonalization toolkit for defect active spaces with C3v
//! symmetry: integral file I/O, determinant CI, spin and point-group
//! analysis, and spin-orbit / spin-spin fine structure.

pub mod ci;
pub mod coupling;
pub mod determinant;
pub mod error;
pub mod integrals;
pub mod nv;
pub mod report;
pub mod symmetry;

pub use error::{Error, Result};
