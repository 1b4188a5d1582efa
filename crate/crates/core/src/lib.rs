//! Finite-size spectral gap certification for frustration-free spin systems.
//!
//! The crate builds frustration-free Hamiltonians on chains, boxes and
//! rhomboidal patches, computes finite-size gaps by exact diagonalization,
//! and turns local gaps into uniform lower bounds via Knabe-type criteria.
//!
//! ```
//! use ffgap::coefficients::{threshold_1d, ThresholdMode};
//!
//! let g4 = threshold_1d(4, ThresholdMode::Exact).unwrap();
//! assert!((g4 - 0.3246).abs() < 1e-4);
//! ```

// Link-only dependency: provides the BLAS/LAPACK symbols used by ndarray-linalg.
extern crate openblas_src;

pub mod cli;
pub mod coarse_grain;
pub mod coefficients;
pub mod criteria;
pub mod error;
pub mod lattice;
pub mod models;
pub mod operators;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
