//! Synthetic calibration spectra and the parameter-extraction fits run on them.
//!
//! Each generator evaluates the forward model for known parameters; each fit
//! recovers one parameter (plus a nuisance offset where the measurement has
//! one) with a damped least-squares solver seeded by a coarse grid scan.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub mod lm;
mod mechanics;
mod microwave;
mod optical;
mod setup;
mod spectrum;

pub use mechanics::{
    dc_du_for_g0e, fit_bath_temperature, fit_gamma_m, g0e_from_geometry, synth_transduction_curve, GeometryCoupling,
    NoiseSpectrumPair,
};
pub use microwave::{
    fit_g0e, fit_g0e_set, mw_thermal_grid, mw_thermal_psd, synth_mw_thermal_spectrum, THERMALIZATION_THRESHOLD_K,
};
pub use optical::{fit_g0o, fit_g0o_set, synth_opt_thermal_spectrum, ThermalTrend};
pub use setup::{
    added_noise_from_background, added_noise_from_efficiency, attenuation_from_photons, background_absolute,
    background_normalized, device_power, efficiency_from_added_noise, extract_setup_mw, gain_from_background,
    synthesize_mw_background, MwBackground, MwSetup, SetupModel,
};
pub use spectrum::{linear_grid, NoiseSpec, SyntheticSpectrum};

/// Outcome of one calibration fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub parameter: String,
    pub unit: String,
    pub estimate: f64,
    pub std_error: f64,
    /// Weighted residual norm at the estimate.
    pub residual_norm: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Diagnostic labels such as `below_thermalization`.
    pub flags: Vec<String>,
    /// Secondary fitted or derived quantities.
    pub extra: BTreeMap<String, f64>,
}

impl FitResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit result serializes")
    }
}

pub(crate) fn require_spectrum(s: &SyntheticSpectrum, min_points: usize) -> crate::Result<()> {
    s.validate()?;
    if s.len() < min_points {
        return Err(crate::Error::InsufficientData(format!(
            "{} points, need at least {min_points}",
            s.len()
        )));
    }
    Ok(())
}
