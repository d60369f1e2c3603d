//! Simulator and analysis toolkit for a single-step discrete-time quantum
//! walk with position-dependent polarization coins.
//!
//! * [`walk`]: real-space evolution `U = S · C(φ_x)`, coin profiles, frames.
//! * [`bloch`]: Floquet-Bloch bands, symmetry checks, partner factorization,
//!   torus-angle winding numbers.
//! * [`midgap`]: interface rings, dense spectra, midgap states and their
//!   anomalous polarization.
//! * [`experiment`]: waveplates, three-basis intensity measurement, Stokes
//!   tomography, and the input-polarization trapping scan.

pub mod bloch;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod midgap;
pub mod walk;

pub use error::{Error, Result};
pub use linalg::C64;
