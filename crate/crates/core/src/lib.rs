//! Frequency-domain model of a triple-resonant electro-optomechanical transducer.
//!
//! A microwave resonator (`e`), an optical cavity (`o`) and a mechanical mode (`m`)
//! are coupled through parametrically enhanced interactions. The crate evaluates the
//! linearized quantum Langevin equations in the Fourier domain and derives conversion
//! efficiency, gain, added noise, bandwidth and classical modulator figures of merit.
//! The `calib` module synthesizes measurement spectra from the same model and fits
//! device parameters back out of them.
//!
//! Angular quantities are rad/s throughout. Conversion to Hz happens at the I/O
//! boundary (see [`config`]).

pub mod calib;
pub mod config;
pub mod error;
pub mod fom;
pub mod network;
pub mod noise;
pub mod params;
pub mod transduction;

pub use error::{Error, Result};
pub use params::{DerivedDrive, DeviceParams, DriveConfig, HeatingModel, Mode};
