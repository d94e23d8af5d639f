//! Classical phase-modulator figures of merit: microwave-to-phonon transfer
//! Θ₃,₁, generated phonon number, half-wave voltage V_π and energy per bit.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Response;
use crate::params::{damping_rate, DerivedDrive, DeviceParams, DriveConfig, HeatingModel, Mode, HBAR, TWO_PI};
use crate::transduction::{bandwidth, shifted_mechanical_frequency};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Θ₃,₁(ω) = −i√(κ_eη_e) G_e χ_e χ_m / den, the response of b to the external microwave input.
pub fn theta31(params: &DeviceParams, drive: &DriveConfig, omega: f64) -> Complex64 {
    let r = Response::new(params, drive, omega);
    -I * params.kappa_ex_e.sqrt() * r.g_e * r.chi_e * r.chi_m / r.den
}

/// Phonons generated by a microwave signal of power `p_signal`: |Θ₃,₁|²P/(ħω_e).
pub fn phonon_number(params: &DeviceParams, drive: &DriveConfig, p_signal: f64, omega: f64) -> Result<f64> {
    if !(p_signal.is_finite() && p_signal >= 0.0) {
        return Err(Error::invalid("p_signal", format!("{p_signal} must be >= 0")));
    }
    Ok(theta31(params, drive, omega).norm_sqr() * p_signal / (HBAR * params.omega_e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VPiForm {
    /// From the full Θ₃,₁(ω).
    Full,
    /// Both sides sideband resolved, Γ_j = 𝒞_jγ_m. Evaluated at ω_m.
    Scenario1,
    /// Resolved microwave side, Γ_o → 0. Evaluated at ω_m.
    Scenario2,
}

impl std::str::FromStr for VPiForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(VPiForm::Full),
            "scenario1" => Ok(VPiForm::Scenario1),
            "scenario2" => Ok(VPiForm::Scenario2),
            _ => Err(Error::invalid("form", format!("unknown V_pi form {s:?}"))),
        }
    }
}

/// (πκ_o/g_0,o)·√(2ħω_eZ_e), the voltage for unit |Θ₃,₁|.
pub fn voltage_scale(params: &DeviceParams) -> f64 {
    std::f64::consts::PI * params.kappa(Mode::Optical) / params.g0_o * (HBAR * params.omega_e * 2.0 * params.z_e).sqrt()
}

/// Half-wave voltage. `omega` is used by [`VPiForm::Full`] only.
pub fn v_pi(params: &DeviceParams, drive: &DriveConfig, omega: f64, form: VPiForm) -> Result<f64> {
    let d = DerivedDrive::new(params, drive);
    let eta_e = params.eta(Mode::Microwave);
    let gm = params.gamma_m;
    let theta_mag = match form {
        VPiForm::Full => theta31(params, drive, omega).norm(),
        VPiForm::Scenario1 => 2.0 * (eta_e / gm).sqrt() * d.coop_e.sqrt() / (1.0 + d.coop_e + d.coop_o),
        VPiForm::Scenario2 => 2.0 * (eta_e / gm).sqrt() * d.coop_e.sqrt() / (1.0 + d.coop_e),
    };
    if !(theta_mag > 0.0) || !theta_mag.is_finite() {
        return Err(Error::Domain("zero microwave-to-phonon transfer, V_pi diverges".into()));
    }
    Ok(voltage_scale(params) / theta_mag)
}

/// Minimum of the full V_π(ω): a grid of `points` over ω_m′ ± 5Γ_conv followed by
/// golden-section refinement. Returns (ω, V_π).
pub fn v_pi_minimum(params: &DeviceParams, drive: &DriveConfig, points: usize) -> Result<(f64, f64)> {
    let center = shifted_mechanical_frequency(params, drive);
    let half = 5.0 * bandwidth(params, drive).abs().max(params.gamma_m);
    let n = points.max(3);
    let step = 2.0 * half / (n - 1) as f64;
    let mag = |w: f64| theta31(params, drive, w).norm();
    let (mut best, mut best_mag) = (center, mag(center));
    for k in 0..n {
        let w = center - half + step * k as f64;
        let m = mag(w);
        if m > best_mag {
            best = w;
            best_mag = m;
        }
    }
    let (mut a, mut b) = (best - step, best + step);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if mag(c) > mag(d) {
            b = d;
        } else {
            a = c;
        }
        if b - a < 1e-9 * step {
            break;
        }
    }
    let w = 0.5 * (a + b);
    Ok((w, v_pi(params, drive, w, VPiForm::Full)?))
}

/// Microwave power for a π phase shift, V_π²/(2Z_e).
pub fn p_pi(params: &DeviceParams, v_pi: f64) -> f64 {
    v_pi * v_pi / (2.0 * params.z_e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandwidthConvention {
    /// Γ_conv in rad/s.
    Angular,
    /// Γ_conv/2π in Hz.
    Cyclic,
}

/// E_bit = P_π/Γ_conv for a given V_π.
pub fn energy_for_voltage(
    params: &DeviceParams,
    drive: &DriveConfig,
    v_pi: f64,
    convention: BandwidthConvention,
) -> f64 {
    let bw = bandwidth(params, drive);
    let bw = match convention {
        BandwidthConvention::Angular => bw,
        BandwidthConvention::Cyclic => bw / TWO_PI,
    };
    p_pi(params, v_pi) / bw
}

/// Energy per bit at the minimum of V_π(ω). Meaningful at the matched point Γ_e = γ_m.
pub fn energy_per_bit(params: &DeviceParams, drive: &DriveConfig, convention: BandwidthConvention) -> Result<f64> {
    let (_, v) = v_pi_minimum(params, drive, 2001)?;
    Ok(energy_for_voltage(params, drive, v, convention))
}

/// Device and drive at the rate-matched point Γ_e(ω_m) = γ_m: heating applied at
/// `p_o`, η_e optionally overridden, Δ_e = ω_m, P_e solved for the match.
pub fn matched_operating_point(
    base: &DeviceParams,
    heating: &HeatingModel,
    p_o: f64,
    delta_o: f64,
    eta_e: Option<f64>,
) -> Result<(DeviceParams, DriveConfig)> {
    let probe = DriveConfig {
        p_e: 0.0,
        p_o,
        delta_e: base.omega_m,
        delta_o,
    };
    let mut params = heating.apply(&probe, base).params;
    if let Some(eta) = eta_e {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::invalid("eta_e", format!("{eta} outside (0, 1]")));
        }
        params = params.with_eta(Mode::Microwave, eta);
    }
    // Γ_e is linear in P_e.
    let unit = DriveConfig { p_e: 1e-12, ..probe };
    let d = DerivedDrive::new(&params, &unit);
    let per_pw = damping_rate(d.g_e, params.kappa(Mode::Microwave), unit.delta_e, params.omega_m);
    if !(per_pw > 0.0) {
        return Err(Error::Domain("no electromechanical damping at this detuning".into()));
    }
    let drive = DriveConfig {
        p_e: 1e-12 * params.gamma_m / per_pw,
        ..probe
    };
    drive.validate()?;
    Ok((params, drive))
}

/// Figures of merit at the V_π minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulatorReport {
    /// V.
    pub v_pi: f64,
    /// Frequency of the V_π minimum, rad/s.
    pub v_pi_freq: f64,
    /// W.
    pub p_pi: f64,
    /// J, angular bandwidth.
    pub e_bit: f64,
    /// J, cyclic bandwidth.
    pub e_bit_cyclic: f64,
    pub theta31_mag: f64,
    pub v_pi_scenario1: f64,
    pub v_pi_scenario2: f64,
    pub eta_e: f64,
    /// rad/s.
    pub gamma_m: f64,
    pub coop_e: f64,
    pub coop_o: f64,
    pub p_e: f64,
    pub p_o: f64,
}

impl ModulatorReport {
    pub fn new(params: &DeviceParams, drive: &DriveConfig) -> Result<Self> {
        let (w, v) = v_pi_minimum(params, drive, 2001)?;
        let d = DerivedDrive::new(params, drive);
        Ok(ModulatorReport {
            v_pi: v,
            v_pi_freq: w,
            p_pi: p_pi(params, v),
            e_bit: energy_for_voltage(params, drive, v, BandwidthConvention::Angular),
            e_bit_cyclic: energy_for_voltage(params, drive, v, BandwidthConvention::Cyclic),
            theta31_mag: theta31(params, drive, w).norm(),
            v_pi_scenario1: v_pi(params, drive, params.omega_m, VPiForm::Scenario1)?,
            v_pi_scenario2: v_pi(params, drive, params.omega_m, VPiForm::Scenario2)?,
            eta_e: params.eta(Mode::Microwave),
            gamma_m: params.gamma_m,
            coop_e: d.coop_e,
            coop_o: d.coop_o,
            p_e: drive.p_e,
            p_o: drive.p_o,
        })
    }

    /// One `key=value` per line, SI units.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let rows = [
            ("v_pi_V", self.v_pi),
            ("v_pi_freq_Hz", self.v_pi_freq / TWO_PI),
            ("p_pi_W", self.p_pi),
            ("e_bit_J", self.e_bit),
            ("e_bit_cyclic_J", self.e_bit_cyclic),
            ("theta31_mag", self.theta31_mag),
            ("v_pi_scenario1_V", self.v_pi_scenario1),
            ("v_pi_scenario2_V", self.v_pi_scenario2),
            ("eta_e", self.eta_e),
            ("gamma_m_Hz", self.gamma_m / TWO_PI),
            ("coop_e", self.coop_e),
            ("coop_o", self.coop_o),
            ("p_e_W", self.p_e),
            ("p_o_W", self.p_o),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{k}={v:.11e}");
        }
        s
    }
}
