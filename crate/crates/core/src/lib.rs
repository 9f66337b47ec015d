//! Radial Dirac spectra for hydrogen-like ions confined to a spherical cavity,
//! computed in Bernstein-polynomial or B-spline bases at configurable
//! precision, and relativistic two-photon decay rates built from the
//! resulting pseudospectrum.

pub mod basis;
pub mod dirac;
pub mod error;
pub mod preset;
pub mod specfun;
pub mod twophoton;
pub mod units;

pub use error::{Error, Result};
pub use specfun::{BigReal, PrecisionCtx};
