//! Semiclassical Wigner functions for the harmonic oscillator.
//!
//! The crate provides exact phase-space oracles (Hermite states, Laguerre
//! Wigner eigenfunctions, brute-force Wigner quadrature), the uniform Airy
//! approximations of the Wigner eigenfunctions, stationary-phase formulas,
//! expansion coefficients for oscillatory initial data and the eigenfunction
//! series solution of the Wigner equation.

pub mod airy_eigen;
pub mod asymptotics;
pub mod coefficients;
pub mod error;
pub mod io;
pub mod moyal;
pub mod quadrature;
pub mod schrodinger;
pub mod series;
pub mod specialfn;
pub mod validation;
pub mod wigner;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use quadrature::{Field2D, Grid2D, QuadratureResult};
