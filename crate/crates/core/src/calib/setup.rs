//! Detection-chain calibration: microwave background level in its normalized
//! and absolute forms, input-line attenuation, and the optical detection
//! efficiency model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{intracavity_photons, DeviceParams, DriveConfig, Mode, HBAR};

/// Gains and added noise of both detection chains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetupModel {
    /// Effective microwave output gain, dB.
    pub gain_setup_e: f64,
    pub n_add_setup_e: f64,
    /// Effective optical heterodyne gain, dB.
    pub gain_setup_o: f64,
    pub n_add_setup_o: f64,
    pub eta_qe: f64,
    /// Microwave input-line attenuation, dB.
    pub attenuation_in_e: f64,
}

impl Default for SetupModel {
    fn default() -> Self {
        SetupModel {
            gain_setup_e: 64.1,
            n_add_setup_e: 9.9,
            gain_setup_o: 17.9,
            n_add_setup_o: added_noise_from_efficiency(0.102).expect("valid efficiency"),
            eta_qe: 0.102,
            attenuation_in_e: 76.8,
        }
    }
}

impl SetupModel {
    /// Checks ranges and that the optical added noise follows from η_qe.
    pub fn validate(&self) -> Result<()> {
        if !(self.n_add_setup_e >= 0.0 && self.n_add_setup_o >= 0.0) {
            return Err(Error::invalid("n_add_setup", "must be >= 0"));
        }
        for (name, v) in [
            ("gain_setup_e", self.gain_setup_e),
            ("gain_setup_o", self.gain_setup_o),
            ("attenuation_in_e", self.attenuation_in_e),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        let expect = added_noise_from_efficiency(self.eta_qe)?;
        if (expect - self.n_add_setup_o).abs() > 1e-9 * expect.max(1.0) {
            return Err(Error::invalid(
                "n_add_setup_o",
                format!(
                    "{} inconsistent with eta_qe = {} (expects {expect})",
                    self.n_add_setup_o, self.eta_qe
                ),
            ));
        }
        Ok(())
    }

    pub fn noise(&self) -> crate::noise::SetupNoise {
        crate::noise::SetupNoise {
            n_add_setup_e: self.n_add_setup_e,
            n_add_setup_o: self.n_add_setup_o,
        }
    }
}

/// Added photons of the optical detection for quantum efficiency η_qe, with a
/// unit-occupancy reference state: (1 − η_qe)/η_qe.
pub fn added_noise_from_efficiency(eta_qe: f64) -> Result<f64> {
    if !(eta_qe > 0.0 && eta_qe <= 1.0) {
        return Err(Error::Domain(format!("eta_qe = {eta_qe} outside (0, 1]")));
    }
    Ok((1.0 - eta_qe) / eta_qe)
}

/// Inverse of [`added_noise_from_efficiency`].
pub fn efficiency_from_added_noise(n_add: f64) -> Result<f64> {
    if !(n_add.is_finite() && n_add >= 0.0) {
        return Err(Error::Domain(format!("n_add = {n_add} must be >= 0")));
    }
    Ok(1.0 / (1.0 + n_add))
}

/// Normalized microwave background (pump-referred), per rad/s:
/// (1 + n_add)·4κ_ex / (n_d(4Δ² + (κ − 2κ_ex)²)).
pub fn background_normalized(params: &DeviceParams, delta_e: f64, n_d_e: f64, n_add_setup_e: f64) -> Result<f64> {
    if !(n_d_e > 0.0) {
        return Err(Error::Domain("background needs n_d,e > 0".into()));
    }
    Ok((1.0 + n_add_setup_e) * 4.0 * params.kappa_ex_e / (n_d_e * reflection_denominator(params, delta_e)))
}

fn reflection_denominator(params: &DeviceParams, delta_e: f64) -> f64 {
    let k = params.kappa(Mode::Microwave);
    4.0 * delta_e * delta_e + (k - 2.0 * params.kappa_ex_e).powi(2)
}

/// Absolute microwave background ħω·10^(G/10)·(1 + n_add), J.
pub fn background_absolute(omega: f64, gain_db: f64, n_add_setup_e: f64) -> f64 {
    HBAR * omega * 10f64.powf(gain_db / 10.0) * (1.0 + n_add_setup_e)
}

/// Inverts [`background_normalized`] for the added noise.
pub fn added_noise_from_background(params: &DeviceParams, delta_e: f64, n_d_e: f64, o_e: f64) -> Result<f64> {
    if !(n_d_e > 0.0) {
        return Err(Error::Domain("setup extraction needs n_d,e > 0".into()));
    }
    Ok(o_e * n_d_e * reflection_denominator(params, delta_e) / (4.0 * params.kappa_ex_e) - 1.0)
}

/// Inverts [`background_absolute`] for the gain in dB.
pub fn gain_from_background(omega: f64, background: f64, n_add_setup_e: f64) -> Result<f64> {
    let lin = background / (HBAR * omega * (1.0 + n_add_setup_e));
    if !(lin > 0.0 && lin.is_finite()) {
        return Err(Error::Domain(format!("background {background} gives no positive gain")));
    }
    Ok(10.0 * lin.log10())
}

/// What the microwave analyzer sees far from the mechanical peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MwBackground {
    /// Absolute background spectral density, J.
    pub background: f64,
    /// Reflected pump power at the analyzer, W.
    pub reflected_pump: f64,
    pub n_d_e: f64,
}

/// Background and reflected pump for a device, drive and detection chain. The
/// absolute background is quoted at the pump frequency ω_e − Δ_e.
pub fn synthesize_mw_background(params: &DeviceParams, drive: &DriveConfig, setup: &SetupModel) -> MwBackground {
    let n_d_e = intracavity_photons(params, drive, Mode::Microwave);
    let k = params.kappa(Mode::Microwave);
    let d2 = 4.0 * drive.delta_e * drive.delta_e;
    let reflectance = (d2 + (k - 2.0 * params.kappa_ex_e).powi(2)) / (d2 + k * k);
    let g = 10f64.powf(setup.gain_setup_e / 10.0);
    MwBackground {
        background: background_absolute(params.omega_e - drive.delta_e, setup.gain_setup_e, setup.n_add_setup_e),
        reflected_pump: g * reflectance * drive.p_e,
        n_d_e,
    }
}

/// Extracted microwave chain parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MwSetup {
    pub n_add_setup_e: f64,
    /// dB.
    pub gain_setup_e: f64,
}

/// Added noise from the pump-normalized background, then the output gain from
/// the absolute background.
pub fn extract_setup_mw(params: &DeviceParams, delta_e: f64, m: &MwBackground) -> Result<MwSetup> {
    if !(m.reflected_pump > 0.0) {
        return Err(Error::Domain("setup extraction needs a reflected pump".into()));
    }
    let n_add = added_noise_from_background(params, delta_e, m.n_d_e, m.background / m.reflected_pump)?;
    let gain = gain_from_background(params.omega_e - delta_e, m.background, n_add)?;
    Ok(MwSetup {
        n_add_setup_e: n_add,
        gain_setup_e: gain,
    })
}

/// Power at the device for a source power and line attenuation in dB.
pub fn device_power(p_source: f64, attenuation_db: f64) -> f64 {
    p_source * 10f64.powf(-attenuation_db / 10.0)
}

/// Attenuation in dB between a source power and the power that produces
/// `n_d_e` intracavity photons at detuning `delta_e`.
pub fn attenuation_from_photons(params: &DeviceParams, delta_e: f64, p_source: f64, n_d_e: f64) -> Result<f64> {
    if !(n_d_e > 0.0 && p_source > 0.0) {
        return Err(Error::Domain(
            "attenuation needs positive source power and photon number".into(),
        ));
    }
    let p_dev = crate::params::power_for_photons(params, delta_e, Mode::Microwave, n_d_e);
    Ok(10.0 * (p_source / p_dev).log10())
}
