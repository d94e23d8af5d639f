//! Microwave thermal noise spectra in the low-cooperativity limit and the
//! electromechanical coupling fit.

use std::collections::BTreeMap;

use super::lm::{grid_scan, levenberg_marquardt, LmOptions};
use super::setup::{background_normalized, SetupModel};
use super::spectrum::{linear_grid, NoiseSpec, SyntheticSpectrum};
use super::{require_spectrum, FitResult};
use crate::error::{Error, Result};
use crate::params::{bose_occupancy, from_hz, DerivedDrive, DeviceParams, DriveConfig, Mode};

/// Fridge temperature above which the mechanics is taken to be thermalized, K.
pub const THERMALIZATION_THRESHOLD_K: f64 = 0.150;

const MAX_COOPERATIVITY: f64 = 0.1;

/// Pump-normalized microwave noise spectral density at Fourier frequency ω:
/// O_e + 64 n_m κ_ex² γ_m g0² / ((4Δ² + (κ − 2κ_ex)²)(κ² + 4(Δ − ω)²)(γ_m² + 4(sω_m − ω)²)),
/// with s = sign(Δ_e) so the mechanical line sits on the resonant sideband.
pub fn mw_thermal_psd(params: &DeviceParams, delta_e: f64, n_m: f64, g0_e: f64, offset: f64, omega: f64) -> f64 {
    let k = params.kappa(Mode::Microwave);
    let kx = params.kappa_ex_e;
    let g = params.gamma_m;
    let s = delta_e.signum();
    let num = 64.0 * n_m * kx * kx * g * g0_e * g0_e;
    let den = (4.0 * delta_e * delta_e + (k - 2.0 * kx).powi(2))
        * (k * k + 4.0 * (delta_e - omega).powi(2))
        * (g * g + 4.0 * (s * params.omega_m - omega).powi(2));
    offset + num / den
}

/// Grid over the resonant sideband ±`half_width_hz`.
pub fn mw_thermal_grid(params: &DeviceParams, delta_e: f64, half_width_hz: f64, points: usize) -> Vec<f64> {
    linear_grid(delta_e.signum() * params.omega_m, from_hz(half_width_hz), points)
}

/// Microwave thermal spectrum for a weak pump. Refuses drives with 𝒞_e ≥ 0.1,
/// where backaction makes the closed form invalid. The optical pump is ignored.
pub fn synth_mw_thermal_spectrum(
    params: &DeviceParams,
    drive: &DriveConfig,
    n_m: f64,
    setup: &SetupModel,
    omega_grid: &[f64],
    noise: Option<&NoiseSpec>,
) -> Result<SyntheticSpectrum> {
    let d = DerivedDrive::new(params, drive);
    if d.coop_e >= MAX_COOPERATIVITY {
        return Err(Error::Domain(format!(
            "C_e = {:.3} >= {MAX_COOPERATIVITY}: low-cooperativity spectrum does not apply",
            d.coop_e
        )));
    }
    if !(n_m.is_finite() && n_m >= 0.0) {
        return Err(Error::invalid("n_m", format!("{n_m}")));
    }
    let offset = background_normalized(params, drive.delta_e, d.n_d_e, setup.n_add_setup_e)?;
    let values = omega_grid
        .iter()
        .map(|&w| mw_thermal_psd(params, drive.delta_e, n_m, params.g0_e, offset, w))
        .collect();
    let mut s = SyntheticSpectrum::new(omega_grid.to_vec(), values);
    s.truth = Some(*params);
    s.with_noise(noise)
}

/// Fits g0_e (Hz) and the background offset to one spectrum, with n_m from
/// T_fridge. Everything else in `params` is held fixed.
pub fn fit_g0e(spectrum: &SyntheticSpectrum, params: &DeviceParams, delta_e: f64, t_fridge: f64) -> Result<FitResult> {
    require_spectrum(spectrum, 3)?;
    if !(t_fridge > 0.0) {
        return Err(Error::invalid("t_fridge", format!("{t_fridge} must be > 0")));
    }
    let n_m = bose_occupancy(t_fridge, params.omega_m);
    let wts = spectrum.weights();
    let shape: Vec<f64> = spectrum
        .omega
        .iter()
        .map(|&w| mw_thermal_psd(params, delta_e, n_m, 1.0, 0.0, w))
        .collect();
    // Weighted best offset for a given g0² (the model is affine in the offset).
    let best_offset = |g2: f64| {
        let (mut num, mut den) = (0.0, 0.0);
        for ((y, s), w) in spectrum.values.iter().zip(&shape).zip(&wts) {
            num += (y - g2 * s) / (w * w);
            den += 1.0 / (w * w);
        }
        num / den
    };
    let resid = |g0_hz: f64, off: f64| -> Vec<f64> {
        let g2 = from_hz(g0_hz).powi(2);
        spectrum
            .values
            .iter()
            .zip(&shape)
            .zip(&wts)
            .map(|((y, s), w)| (off + g2 * s - y) / w)
            .collect()
    };
    let cost = |g0_hz: f64| {
        let off = best_offset(from_hz(g0_hz).powi(2));
        resid(g0_hz, off).iter().map(|r| r * r).sum::<f64>()
    };
    let g_init = grid_scan(cost, 1.0, 1e4, 401);
    let off_init = best_offset(from_hz(g_init).powi(2));
    let scale = off_init.abs().max(f64::MIN_POSITIVE);
    let out = levenberg_marquardt(|x| resid(x[0], x[1] * scale), &[g_init, 1.0], &LmOptions::default());
    let mut extra = BTreeMap::new();
    extra.insert("offset".into(), out.params[1] * scale);
    extra.insert("t_fridge_k".into(), t_fridge);
    extra.insert("n_m".into(), n_m);
    let mut flags = Vec::new();
    if t_fridge < THERMALIZATION_THRESHOLD_K {
        flags.push("below_thermalization".into());
    }
    if !out.converged {
        flags.push("not_converged".into());
    }
    Ok(FitResult {
        parameter: "g0_e".into(),
        unit: "Hz".into(),
        estimate: out.params[0].abs(),
        std_error: out.std_errors[0],
        residual_norm: out.residual_norm,
        converged: out.converged,
        iterations: out.iterations,
        flags,
        extra,
    })
}

/// Fits every spectrum (each must carry `t_fridge`) and averages the spectra
/// at or above [`THERMALIZATION_THRESHOLD_K`]. Colder spectra are fitted and
/// reported in `extra` but flagged and excluded from the mean.
pub fn fit_g0e_set(spectra: &[SyntheticSpectrum], params: &DeviceParams, delta_e: f64) -> Result<FitResult> {
    if spectra.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} spectra, need at least 2",
            spectra.len()
        )));
    }
    let mut fits = Vec::new();
    for s in spectra {
        let t = s
            .t_fridge
            .ok_or_else(|| Error::InsufficientData("spectrum without t_fridge".into()))?;
        fits.push((t, fit_g0e(s, params, delta_e, t)?));
    }
    combine("g0_e", "Hz", fits, THERMALIZATION_THRESHOLD_K)
}

pub(super) fn combine(name: &str, unit: &str, fits: Vec<(f64, FitResult)>, threshold_k: f64) -> Result<FitResult> {
    let mut extra = BTreeMap::new();
    let mut flags = Vec::new();
    let mut kept = Vec::new();
    let mut all = Vec::new();
    let mut converged = true;
    let mut iterations = 0;
    let mut rss = 0.0;
    for (t, f) in &fits {
        extra.insert(format!("{name}_at_{:.0}mK", t * 1e3), f.estimate);
        all.push(f.estimate);
        if *t < threshold_k {
            flags.push(format!("below_thermalization_{:.0}mK", t * 1e3));
        } else {
            kept.push(f.estimate);
            converged &= f.converged;
            iterations = iterations.max(f.iterations);
            rss += f.residual_norm * f.residual_norm;
        }
    }
    if kept.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no spectrum at or above {} mK",
            threshold_k * 1e3
        )));
    }
    let (mean, sd) = mean_sd(&kept);
    let (_, sd_all) = mean_sd(&all);
    extra.insert("spread_thermalized".into(), sd);
    extra.insert("spread_all".into(), sd_all);
    extra.insert("n_used".into(), kept.len() as f64);
    let std_error = if kept.len() > 1 {
        sd / (kept.len() as f64).sqrt()
    } else {
        fits.iter()
            .find(|(t, _)| *t >= threshold_k)
            .map(|(_, f)| f.std_error)
            .unwrap_or(f64::NAN)
    };
    if !converged {
        flags.push("not_converged".into());
    }
    Ok(FitResult {
        parameter: name.into(),
        unit: unit.into(),
        estimate: mean,
        std_error,
        residual_norm: rss.sqrt(),
        converged,
        iterations,
        flags,
        extra,
    })
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}
