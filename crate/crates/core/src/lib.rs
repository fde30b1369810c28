//! Deep scattering spectrum for audio.
//!
//! Constant-Q Morlet banks, the wavelet-modulus cascade with per-path
//! decimation, normalization by the parent order, scattering along
//! log-frequency, and approximate inversion. `synth` holds the synthetic
//! signals and closed-form predictions the tests check against.

pub mod bench;
pub mod cli;
pub mod error;
pub mod filterbank;
pub mod freq;
pub mod inversion;
pub mod io;
pub mod normalization;
pub mod scattering;
pub mod signal;
pub mod synth;

pub use error::{Error, Result};
