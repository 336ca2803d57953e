//! Helical Galerkin truncations of the rotating Navier-Stokes equations on the
//! unit torus, with exact resonance detection, resonant and full bilinear
//! operators, time integration and numerical checks of the associated
//! estimates.

pub mod analysis;
pub mod error;
pub mod field;
pub mod io;
pub mod lattice;
pub mod operators;
pub mod resonance;
pub mod solver;

pub use error::{Error, Result};
pub use field::SpectralField;
pub use lattice::{Basis, BasisDefects, DyadicShellIndex, Helicity, LatticeVector};
