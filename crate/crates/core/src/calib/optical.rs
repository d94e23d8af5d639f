//! Optical thermal noise spectra from the full model with the electromechanical
//! coupling off, and the optomechanical coupling fit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::lm::{grid_scan, levenberg_marquardt, LmOptions};
use super::microwave::combine;
use super::setup::SetupModel;
use super::spectrum::{NoiseSpec, SyntheticSpectrum};
use super::{require_spectrum, FitResult};
use crate::error::{Error, Result};
use crate::noise::{added_noise_full, BathOccupancies};
use crate::params::{bose_occupancy, from_hz, to_hz, DeviceParams, DriveConfig};

/// Fridge-temperature dependence of the mechanics under a weak optical pump:
/// γ_m and ω_m grow linearly with T_fridge and the mode does not cool below
/// `t_m_floor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalTrend {
    /// rad/s per K.
    pub gamma_m_per_k: f64,
    /// rad/s per K.
    pub omega_m_per_k: f64,
    /// K.
    pub t_m_floor: f64,
}

impl Default for ThermalTrend {
    fn default() -> Self {
        ThermalTrend {
            gamma_m_per_k: from_hz(300.0),
            omega_m_per_k: from_hz(2e3),
            t_m_floor: 0.3,
        }
    }
}

impl ThermalTrend {
    /// Parameters and mechanical bath temperature at `t_fridge`.
    pub fn apply(&self, params: &DeviceParams, t_fridge: f64) -> (DeviceParams, f64) {
        let p = DeviceParams {
            gamma_m: params.gamma_m + self.gamma_m_per_k * t_fridge,
            omega_m: params.omega_m + self.omega_m_per_k * t_fridge,
            ..*params
        };
        (p, t_fridge.max(self.t_m_floor))
    }
}

fn optical_quanta(params: &DeviceParams, drive: &DriveConfig, n_m: f64, offset: f64, omega: f64) -> f64 {
    offset + added_noise_full(params, drive, omega, &BathOccupancies::mechanical(n_m)).n_add_o
}

fn check_drive(drive: &DriveConfig) -> Result<()> {
    if drive.p_e != 0.0 {
        return Err(Error::invalid(
            "p_e",
            "optical thermal spectra need the microwave pump off",
        ));
    }
    drive.validate()
}

/// Optical output noise in quanta, O_o + n_o(ω), with O_o = 1 + n_add,setup,o.
/// Without a trend the mechanics sits at T_fridge.
pub fn synth_opt_thermal_spectrum(
    params: &DeviceParams,
    drive: &DriveConfig,
    t_fridge: f64,
    setup: &SetupModel,
    trend: Option<&ThermalTrend>,
    omega_grid: &[f64],
    noise: Option<&NoiseSpec>,
) -> Result<SyntheticSpectrum> {
    check_drive(drive)?;
    if !(t_fridge.is_finite() && t_fridge >= 0.0) {
        return Err(Error::invalid("t_fridge", format!("{t_fridge}")));
    }
    let (p, t_m) = match trend {
        Some(tr) => tr.apply(params, t_fridge),
        None => (*params, t_fridge),
    };
    let n_m = bose_occupancy(t_m, p.omega_m);
    let offset = 1.0 + setup.n_add_setup_o;
    let values = omega_grid
        .iter()
        .map(|&w| optical_quanta(&p, drive, n_m, offset, w))
        .collect();
    let mut s = SyntheticSpectrum::new(omega_grid.to_vec(), values);
    s.truth = Some(p);
    s.t_fridge = Some(t_fridge);
    s.with_noise(noise)
}

/// Fits g0_o (Hz) and the offset O_o assuming T_m = T_fridge, with γ_m and ω_m
/// at that temperature taken from `trend`.
pub fn fit_g0o(
    spectrum: &SyntheticSpectrum,
    params: &DeviceParams,
    drive: &DriveConfig,
    t_fridge: f64,
    trend: Option<&ThermalTrend>,
) -> Result<FitResult> {
    require_spectrum(spectrum, 3)?;
    check_drive(drive)?;
    if !(t_fridge > 0.0) {
        return Err(Error::invalid("t_fridge", format!("{t_fridge} must be > 0")));
    }
    let p0 = match trend {
        Some(tr) => tr.apply(params, t_fridge).0,
        None => *params,
    };
    let n_m = bose_occupancy(t_fridge, p0.omega_m);
    let wts = spectrum.weights();
    let shape = |g0_hz: f64| -> Vec<f64> {
        let p = DeviceParams {
            g0_o: from_hz(g0_hz),
            ..p0
        };
        spectrum
            .omega
            .iter()
            .map(|&w| optical_quanta(&p, drive, n_m, 0.0, w))
            .collect()
    };
    let best_offset = |s: &[f64]| {
        let (mut num, mut den) = (0.0, 0.0);
        for ((y, m), w) in spectrum.values.iter().zip(s).zip(&wts) {
            num += (y - m) / (w * w);
            den += 1.0 / (w * w);
        }
        num / den
    };
    let resid = |g0_hz: f64, off: f64| -> Vec<f64> {
        let s = shape(g0_hz);
        spectrum
            .values
            .iter()
            .zip(&s)
            .zip(&wts)
            .map(|((y, m), w)| (off + m - y) / w)
            .collect()
    };
    let cost = |g0_hz: f64| {
        let s = shape(g0_hz);
        let off = best_offset(&s);
        spectrum
            .values
            .iter()
            .zip(&s)
            .zip(&wts)
            .map(|((y, m), w)| ((off + m - y) / w).powi(2))
            .sum::<f64>()
    };
    let g_init = grid_scan(cost, 1e3, 1e8, 201);
    let off_init = best_offset(&shape(g_init));
    let out = levenberg_marquardt(|x| resid(x[0], x[1]), &[g_init, off_init], &LmOptions::default());
    let mut extra = BTreeMap::new();
    extra.insert("offset".into(), out.params[1]);
    extra.insert("n_add_setup_o".into(), out.params[1] - 1.0);
    extra.insert("t_fridge_k".into(), t_fridge);
    extra.insert("gamma_m_hz".into(), to_hz(p0.gamma_m));
    let mut flags = Vec::new();
    if !out.converged {
        flags.push("not_converged".into());
    }
    Ok(FitResult {
        parameter: "g0_o".into(),
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

/// Fits each spectrum and averages those with T_fridge ≥ `threshold_k`.
pub fn fit_g0o_set(
    spectra: &[SyntheticSpectrum],
    params: &DeviceParams,
    drive: &DriveConfig,
    trend: Option<&ThermalTrend>,
    threshold_k: f64,
) -> Result<FitResult> {
    if spectra.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} spectra, need at least 2",
            spectra.len()
        )));
    }
    let mut fits = Vec::new();
    let mut offsets = Vec::new();
    for s in spectra {
        let t = s
            .t_fridge
            .ok_or_else(|| Error::InsufficientData("spectrum without t_fridge".into()))?;
        let f = fit_g0o(s, params, drive, t, trend)?;
        if t >= threshold_k {
            offsets.push(f.extra["n_add_setup_o"]);
        }
        fits.push((t, f));
    }
    let mut r = combine("g0_o", "Hz", fits, threshold_k)?;
    r.extra.insert(
        "n_add_setup_o".into(),
        offsets.iter().sum::<f64>() / offsets.len() as f64,
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::super::spectrum::linear_grid;
    use super::*;
    use crate::transduction::bandwidth;

    fn weak() -> (DeviceParams, DriveConfig) {
        let p = DeviceParams::default();
        (
            p,
            DriveConfig {
                p_e: 0.0,
                p_o: 30e-12,
                delta_e: p.omega_m,
                delta_o: from_hz(126e6),
            },
        )
    }

    fn grid(p: &DeviceParams) -> Vec<f64> {
        linear_grid(p.omega_m + from_hz(300.0), from_hz(1500.0), 301)
    }

    #[test]
    fn zero_temperature_is_background() {
        // Only the backaction floor remains above the detection background,
        // small against the thermal peak at the lowest calibration temperature.
        let (p, d) = weak();
        let setup = SetupModel::default();
        let bg = 1.0 + setup.n_add_setup_o;
        let cold = synth_opt_thermal_spectrum(&p, &d, 0.0, &setup, None, &grid(&p), None).unwrap();
        let warm = synth_opt_thermal_spectrum(&p, &d, 0.051, &setup, None, &grid(&p), None).unwrap();
        let mut floor: f64 = 0.0;
        for (v, &w) in cold.values.iter().zip(&cold.omega) {
            let (_, vac) = crate::noise::added_noise_vacuum(&p, &d, w);
            assert!((v - (bg + vac)).abs() < 1e-12, "{v}");
            floor = floor.max(vac);
        }
        let peak = warm.values.iter().fold(0.0f64, |m, &v| m.max(v - bg));
        assert!(floor < 0.05 * peak, "{floor} vs {peak}");
    }

    #[test]
    fn microwave_pump_must_be_off() {
        let (p, d) = weak();
        let d = DriveConfig { p_e: 1e-12, ..d };
        assert!(synth_opt_thermal_spectrum(&p, &d, 0.3, &SetupModel::default(), None, &grid(&p), None).is_err());
    }

    #[test]
    fn fridge_trends() {
        let (p, d) = weak();
        let tr = ThermalTrend::default();
        let setup = SetupModel::default();
        let g = linear_grid(p.omega_m + from_hz(1e3), from_hz(4e3), 4001);
        let features = |t: f64| {
            let s = synth_opt_thermal_spectrum(&p, &d, t, &setup, Some(&tr), &g, None).unwrap();
            let bg = 1.0 + setup.n_add_setup_o;
            let i = (0..s.len())
                .max_by(|&a, &b| s.values[a].total_cmp(&s.values[b]))
                .unwrap();
            let peak = s.values[i] - bg;
            let above = s.values.iter().filter(|&&v| v - bg > peak / 2.0).count() as f64;
            (peak, above * (g[1] - g[0]), g[i])
        };
        let (a0, w0, c0) = features(0.051);
        let (a1, w1, c1) = features(0.325);
        let (a2, w2, c2) = features(0.621);
        assert!(a0 > 2.0 * a1, "{a0} {a1}");
        assert!((a2 / a1 - 1.0).abs() < 0.25, "{a1} {a2}");
        assert!(w0 < w1 && w1 < w2);
        assert!(c0 < c1 && c1 < c2);
        let (pt, _) = tr.apply(&p, 0.621);
        assert!((w2 / bandwidth(&pt, &d) - 1.0).abs() < 0.05);
    }

    #[test]
    fn g0o_recovery() {
        let (p, d) = weak();
        let tr = ThermalTrend::default();
        let setup = SetupModel::default();
        let temps = [0.051, 0.325, 0.469, 0.565, 0.621];
        let spectra: Vec<_> = temps
            .iter()
            .map(|&t| synth_opt_thermal_spectrum(&p, &d, t, &setup, Some(&tr), &grid(&p), None).unwrap())
            .collect();
        let f = fit_g0o_set(&spectra, &p, &d, Some(&tr), 0.45).unwrap();
        assert!((f.estimate / 662e3 - 1.0).abs() < 1e-5, "{f:?}");
        assert!((f.extra["n_add_setup_o"] - setup.n_add_setup_o).abs() < 1e-6);
        // Unthermalized coldest spectrum overestimates the coupling.
        assert!(f.extra["g0_o_at_51mK"] > 1.5 * 662e3);
        let noisy: Vec<_> = temps[2..]
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                synth_opt_thermal_spectrum(
                    &p,
                    &d,
                    t,
                    &setup,
                    Some(&tr),
                    &grid(&p),
                    Some(&NoiseSpec {
                        sigma: 0.01,
                        seed: k as u64,
                    }),
                )
                .unwrap()
            })
            .collect();
        let f = fit_g0o_set(&noisy, &p, &d, Some(&tr), 0.45).unwrap();
        assert!((f.estimate / 662e3 - 1.0).abs() < 0.02, "{f:?}");
    }
}
