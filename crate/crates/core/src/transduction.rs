//! Conversion efficiency ζ, its split into pure conversion θ and gain 𝒢,
//! the backaction phonon floor, bandwidth and spring shift, and a simulated
//! gain-independent four-power measurement of ζ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{scattering_at, Response, SystemMatrices};
use crate::params::{damping_rate, DerivedDrive, DeviceParams, DriveConfig, Mode};

/// Decomposition of ζ at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionPoint {
    /// Evaluation frequency, rad/s.
    pub omega: f64,
    /// |S_eo S_oe|.
    pub zeta: f64,
    pub theta: f64,
    pub gain_e: f64,
    pub gain_o: f64,
    pub n_min: f64,
    /// Γ_conv, rad/s.
    pub bandwidth: f64,
    /// δ_ω(ω_m), rad/s.
    pub freq_shift: f64,
}

/// ζ(ω) from the closed-form susceptibility expression.
pub fn zeta_full(params: &DeviceParams, drive: &DriveConfig, omega: f64) -> f64 {
    let r = Response::new(params, drive, omega);
    let num =
        (params.kappa_ex_e * params.kappa_ex_o).sqrt() * r.g_e * r.g_o * r.chi_e * r.chi_o * (r.chi_t_m - r.chi_m);
    (num / r.den).norm_sqr()
}

fn check_detuning(drive: &DriveConfig, mode: Mode) -> Result<f64> {
    let delta = drive.detuning(mode);
    if delta == 0.0 {
        let name = match mode {
            Mode::Microwave => "Δ_e",
            Mode::Optical => "Δ_o",
        };
        return Err(Error::Domain(format!(
            "gain contains 1/{name}, which diverges at zero detuning"
        )));
    }
    Ok(delta)
}

/// Frequency-dependent gain |χ|²[(Δ−ω)²+κ²/4][(Δ+ω)²+κ²/4]/(4Δω_m).
pub fn gain_at(params: &DeviceParams, drive: &DriveConfig, mode: Mode, omega: f64) -> Result<f64> {
    let delta = check_detuning(drive, mode)?;
    let kappa = params.kappa(mode);
    let k2 = kappa * kappa / 4.0;
    let chi2 = 1.0 / ((delta - omega).powi(2) + k2);
    Ok(chi2 * ((delta - omega).powi(2) + k2) * ((delta + omega).powi(2) + k2) / (4.0 * delta * params.omega_m))
}

/// Gain at ω = ω_m: ((Δ+ω_m)² + κ²/4)/(4Δω_m).
pub fn gain(params: &DeviceParams, drive: &DriveConfig, mode: Mode) -> Result<f64> {
    let delta = check_detuning(drive, mode)?;
    let kappa = params.kappa(mode);
    let wm = params.omega_m;
    Ok(((delta + wm).powi(2) + kappa * kappa / 4.0) / (4.0 * delta * wm))
}

/// Backaction phonon floor ((Δ_o−ω_m)² + κ_o²/4)/(4Δ_oω_m).
pub fn backaction_phonon_floor(params: &DeviceParams, drive: &DriveConfig) -> Result<f64> {
    let delta = check_detuning(drive, Mode::Optical)?;
    let kappa = params.kappa(Mode::Optical);
    let wm = params.omega_m;
    Ok(((delta - wm).powi(2) + kappa * kappa / 4.0) / (4.0 * delta * wm))
}

/// Spring shift δ_ω = Σ_j Im(G_j²(χ_j − χ̃_j)) at ω_m. Negative for red detuning.
pub fn frequency_shift(params: &DeviceParams, drive: &DriveConfig) -> f64 {
    let r = Response::new(params, drive, params.omega_m);
    (r.g_e * r.g_e * (r.chi_e - r.chi_t_e) + r.g_o * r.g_o * (r.chi_o - r.chi_t_o)).im
}

/// Mechanical frequency including the spring shift, ω_m + δ_ω, where ζ peaks.
pub fn shifted_mechanical_frequency(params: &DeviceParams, drive: &DriveConfig) -> f64 {
    params.omega_m + frequency_shift(params, drive)
}

/// Γ_conv = Γ_e(ω_m) + γ_m.
pub fn bandwidth(params: &DeviceParams, drive: &DriveConfig) -> f64 {
    DerivedDrive::new(params, drive).gamma_opt_e + params.gamma_m
}

/// Pure conversion θ(ω) with damping rates taken at ω_m.
pub fn theta(params: &DeviceParams, drive: &DriveConfig, omega: f64) -> f64 {
    let d = DerivedDrive::new(params, drive);
    let eta = params.eta(Mode::Microwave) * params.eta(Mode::Optical);
    let prod = d.gamma_opt_e * d.gamma_opt_o;
    if prod <= 0.0 {
        return 0.0;
    }
    let w_shift = shifted_mechanical_frequency(params, drive);
    let total = params.gamma_m + d.gamma_opt_e + d.gamma_opt_o;
    let den = (2.0 * (omega - w_shift)).powi(2) + total * total;
    4.0 * eta * prod / den
}

pub fn decompose(params: &DeviceParams, drive: &DriveConfig, omega: f64) -> Result<ConversionPoint> {
    let gain_e = gain(params, drive, Mode::Microwave)?;
    let gain_o = gain(params, drive, Mode::Optical)?;
    Ok(ConversionPoint {
        omega,
        zeta: zeta_full(params, drive, omega),
        theta: theta(params, drive, omega),
        gain_e,
        gain_o,
        n_min: backaction_phonon_floor(params, drive)?,
        bandwidth: bandwidth(params, drive),
        freq_shift: frequency_shift(params, drive),
    })
}

/// Doubly resolved-sideband efficiency 4η_eη_o𝒞_e𝒞_o/(1+𝒞_e+𝒞_o)².
pub fn zeta_resolved_limit(eta_e: f64, eta_o: f64, coop_e: f64, coop_o: f64) -> f64 {
    4.0 * eta_e * eta_o * coop_e * coop_o / (1.0 + coop_e + coop_o).powi(2)
}

/// ζ reduced by √2 for a detector that discards the lower optical sideband.
pub fn lower_sideband_corrected(zeta: f64) -> f64 {
    zeta / std::f64::consts::SQRT_2
}

/// Locates the ζ maximum by golden-section search within ±`half_width` of ω_m + δ_ω.
pub fn find_peak(params: &DeviceParams, drive: &DriveConfig, half_width: f64) -> (f64, f64) {
    let center = shifted_mechanical_frequency(params, drive);
    let f = |w: f64| zeta_full(params, drive, w);
    let (mut a, mut b) = (center - half_width, center + half_width);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (b - a).abs() < 1e-9 * center.abs().max(1.0) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    let w = 0.5 * (a + b);
    (w, f(w))
}

/// Full width at half maximum of ζ(ω) around its peak, rad/s.
pub fn zeta_fwhm(params: &DeviceParams, drive: &DriveConfig) -> f64 {
    let guess = bandwidth(params, drive);
    let (w0, z0) = find_peak(params, drive, 2.0 * guess);
    let half = z0 / 2.0;
    let f = |w: f64| zeta_full(params, drive, w) - half;
    let edge = |dir: f64| {
        let mut step = guess / 4.0;
        let mut far = w0 + dir * step;
        while f(far) > 0.0 {
            step *= 2.0;
            far = w0 + dir * step;
        }
        let (mut inner, mut outer) = (w0, far);
        for _ in 0..200 {
            let mid = 0.5 * (inner + outer);
            if f(mid) > 0.0 {
                inner = mid;
            } else {
                outer = mid;
            }
        }
        0.5 * (inner + outer)
    };
    edge(1.0) - edge(-1.0)
}

/// Power transmission factors of the four lines, dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineGains {
    pub input_e: f64,
    pub input_o: f64,
    pub output_e: f64,
    pub output_o: f64,
}

impl Default for LineGains {
    fn default() -> Self {
        LineGains {
            input_e: 1.0,
            input_o: 1.0,
            output_e: 1.0,
            output_o: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibratedProbe {
    pub gains: LineGains,
    /// Probe power at the source, W.
    pub probe_power: f64,
    /// Offset of the reflection reference from ω_m + δ_ω, in units of κ_j. Must be ≥ 10.
    pub off_resonance: f64,
}

impl Default for CalibratedProbe {
    fn default() -> Self {
        CalibratedProbe {
            gains: LineGains::default(),
            probe_power: 1e-15,
            off_resonance: 1000.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibratedMeasurement {
    /// Detected powers, W: reflection e→e, o→o (off resonance) and transmission o→e, e→o.
    pub p_ee: f64,
    pub p_oo: f64,
    pub p_eo: f64,
    pub p_oe: f64,
    /// √(P_eo P_oe/(P_ee P_oo)).
    pub zeta: f64,
    /// Frequency of the transmission measurement, rad/s.
    pub omega: f64,
}

/// Four-power measurement of ζ at ω_m + δ_ω through lossy/amplifying lines.
pub fn simulate_calibrated_measurement(
    params: &DeviceParams,
    drive: &DriveConfig,
    probe: &CalibratedProbe,
) -> Result<CalibratedMeasurement> {
    if probe.off_resonance < 10.0 {
        return Err(Error::Domain(format!(
            "off-resonant reflection must be taken at least 10 κ away, got {} κ",
            probe.off_resonance
        )));
    }
    let m = SystemMatrices::new(params, drive);
    let w = shifted_mechanical_frequency(params, drive);
    let on = scattering_at(&m, w)?;
    let off_e = scattering_at(&m, w + probe.off_resonance * params.kappa(Mode::Microwave))?;
    let off_o = scattering_at(&m, w + probe.off_resonance * params.kappa(Mode::Optical))?;
    let g = probe.gains;
    let p = probe.probe_power;
    let p_ee = p * g.input_e * g.output_e * off_e.reflection(Mode::Microwave);
    let p_oo = p * g.input_o * g.output_o * off_o.reflection(Mode::Optical);
    let p_eo = p * g.input_o * g.output_e * on.transmission(Mode::Optical, Mode::Microwave);
    let p_oe = p * g.input_e * g.output_o * on.transmission(Mode::Microwave, Mode::Optical);
    Ok(CalibratedMeasurement {
        p_ee,
        p_oo,
        p_eo,
        p_oe,
        zeta: (p_eo * p_oe / (p_ee * p_oo)).sqrt(),
        omega: w,
    })
}

/// Checks the damping-rate reduction Γ_j → 4G_j²/κ_j used in [`zeta_resolved_limit`].
pub fn resolved_damping(params: &DeviceParams, drive: &DriveConfig, mode: Mode) -> f64 {
    let d = DerivedDrive::new(params, drive);
    damping_rate(d.g(mode), params.kappa(mode), drive.detuning(mode), params.omega_m)
}
