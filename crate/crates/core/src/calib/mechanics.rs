//! Mechanical parameter fits: γ_m from transduction curves, the shared bath
//! occupancy from output noise at both ports, and g0_e from device geometry.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::lm::{grid_scan, levenberg_marquardt, LmOptions};
use super::spectrum::{NoiseSpec, SyntheticSpectrum};
use super::{require_spectrum, FitResult};
use crate::error::{Error, Result};
use crate::noise::{output_spectrum, BathOccupancies, ResonatorNoise, SetupNoise};
use crate::params::{bose_temperature, from_hz, DeviceParams, DriveConfig, Mode, HBAR};
use crate::transduction::zeta_full;

/// ζ(ω) on a grid, optionally with multiplicative noise.
pub fn synth_transduction_curve(
    params: &DeviceParams,
    drive: &DriveConfig,
    omega_grid: &[f64],
    noise: Option<&NoiseSpec>,
) -> Result<SyntheticSpectrum> {
    crate::network::SystemMatrices::new(params, drive).check_stable()?;
    let values = omega_grid.iter().map(|&w| zeta_full(params, drive, w)).collect();
    let mut s = SyntheticSpectrum::new(omega_grid.to_vec(), values);
    s.truth = Some(*params);
    s.with_noise(noise)
}

/// Fits one γ_m (Hz) shared by all curves; everything else in `params` is fixed.
pub fn fit_gamma_m(curves: &[(SyntheticSpectrum, DriveConfig)], params: &DeviceParams) -> Result<FitResult> {
    if curves.is_empty() {
        return Err(Error::InsufficientData("no transduction curves".into()));
    }
    for (s, _) in curves {
        require_spectrum(s, 3)?;
    }
    let weights: Vec<Vec<f64>> = curves.iter().map(|(s, _)| s.weights()).collect();
    let resid = |gm_hz: f64| -> Vec<f64> {
        let p = DeviceParams {
            gamma_m: from_hz(gm_hz.abs()),
            ..*params
        };
        let mut r = Vec::new();
        for ((s, d), w) in curves.iter().zip(&weights) {
            for ((&om, &y), &wt) in s.omega.iter().zip(&s.values).zip(w) {
                r.push((zeta_full(&p, d, om) - y) / wt);
            }
        }
        r
    };
    let cost = |g: f64| resid(g).iter().map(|v| v * v).sum::<f64>();
    let init = grid_scan(cost, 1.0, 1e4, 401);
    let out = levenberg_marquardt(|x| resid(x[0]), &[init], &LmOptions::default());
    let mut flags = Vec::new();
    if !out.converged {
        flags.push("not_converged".into());
    }
    Ok(FitResult {
        parameter: "gamma_m".into(),
        unit: "Hz".into(),
        estimate: out.params[0].abs(),
        std_error: out.std_errors[0],
        residual_norm: out.residual_norm,
        converged: out.converged,
        iterations: out.iterations,
        flags,
        extra: BTreeMap::new(),
    })
}

/// Output noise spectra (total quanta including the detection background) at both ports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpectrumPair {
    pub e: SyntheticSpectrum,
    pub o: SyntheticSpectrum,
}

impl NoiseSpectrumPair {
    /// Totals from [`output_spectrum`] at the given bath occupancies.
    pub fn synthesize(
        params: &DeviceParams,
        drive: &DriveConfig,
        omega_grid: &[f64],
        baths: &BathOccupancies,
        setup: &SetupNoise,
        resonator: Option<&ResonatorNoise>,
        noise: Option<&NoiseSpec>,
    ) -> Result<Self> {
        crate::network::SystemMatrices::new(params, drive).check_stable()?;
        let pts = output_spectrum(params, drive, omega_grid, baths, setup, resonator);
        let mk = |vals: Vec<f64>, seed_shift: u64| {
            let mut s = SyntheticSpectrum::new(omega_grid.to_vec(), vals);
            s.truth = Some(*params);
            let ns = noise.map(|n| NoiseSpec {
                seed: n.seed.wrapping_add(seed_shift),
                ..*n
            });
            s.with_noise(ns.as_ref())
        };
        Ok(NoiseSpectrumPair {
            e: mk(pts.iter().map(|p| p.e.total).collect(), 0)?,
            o: mk(pts.iter().map(|p| p.o.total).collect(), 1)?,
        })
    }
}

/// Fits one mechanical occupancy n̄_m shared by the given port spectra. The
/// other baths, detection background and resonator term are held fixed. The
/// bath temperature is reported in `extra["t_m_k"]`.
pub fn fit_bath_occupancy(
    spectra: &[(Mode, &SyntheticSpectrum)],
    params: &DeviceParams,
    drive: &DriveConfig,
    baths: &BathOccupancies,
    setup: &SetupNoise,
    resonator: Option<&ResonatorNoise>,
) -> Result<FitResult> {
    if spectra.is_empty() {
        return Err(Error::InsufficientData("no noise spectra".into()));
    }
    // The totals are affine in n̄_m: y = a + n̄_m b.
    let mut cols = Vec::new();
    for (mode, s) in spectra {
        require_spectrum(s, 3)?;
        let zero = BathOccupancies { n_m: 0.0, ..*baths };
        let one = BathOccupancies { n_m: 1.0, ..*baths };
        let pick = |pts: Vec<crate::noise::SpectrumPoint>| -> Vec<f64> {
            pts.iter()
                .map(|p| if *mode == Mode::Microwave { p.e.total } else { p.o.total })
                .collect()
        };
        let a = pick(output_spectrum(params, drive, &s.omega, &zero, setup, resonator));
        let b1 = pick(output_spectrum(params, drive, &s.omega, &one, setup, resonator));
        let b: Vec<f64> = b1.iter().zip(&a).map(|(x, y)| x - y).collect();
        cols.push((a, b, s.values.clone(), s.weights()));
    }
    let resid = |n: f64| -> Vec<f64> {
        let mut r = Vec::new();
        for (a, b, y, w) in &cols {
            for i in 0..y.len() {
                r.push((a[i] + n * b[i] - y[i]) / w[i]);
            }
        }
        r
    };
    let cost = |n: f64| resid(n).iter().map(|v| v * v).sum::<f64>();
    let init = grid_scan(cost, 1e-2, 1e6, 801);
    let out = levenberg_marquardt(|x| resid(x[0]), &[init], &LmOptions::default());
    let n_m = out.params[0];
    let t_m = bose_temperature(n_m, params.omega_m);
    // dT/dn from the Bose relation: T = ħω/(k ln(1 + 1/n)).
    let dtdn = t_m * t_m * crate::params::K_B / (HBAR * params.omega_m) / (n_m * (n_m + 1.0));
    let mut extra = BTreeMap::new();
    extra.insert("t_m_k".into(), t_m);
    extra.insert("t_m_std_k".into(), out.std_errors[0] * dtdn);
    let mut flags = Vec::new();
    if !out.converged {
        flags.push("not_converged".into());
    }
    Ok(FitResult {
        parameter: "n_m".into(),
        unit: "quanta".into(),
        estimate: n_m,
        std_error: out.std_errors[0],
        residual_norm: out.residual_norm,
        converged: out.converged,
        iterations: out.iterations,
        flags,
        extra,
    })
}

/// Joint fit over both ports with one shared n̄_m.
pub fn fit_bath_temperature(
    pair: &NoiseSpectrumPair,
    params: &DeviceParams,
    drive: &DriveConfig,
    baths: &BathOccupancies,
    setup: &SetupNoise,
    resonator: Option<&ResonatorNoise>,
) -> Result<FitResult> {
    fit_bath_occupancy(
        &[(Mode::Microwave, &pair.e), (Mode::Optical, &pair.o)],
        params,
        drive,
        baths,
        setup,
        resonator,
    )
}

/// Electromechanical coupling from capacitor geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryCoupling {
    /// Motional participation 2C_m/(2C_m + C_s).
    pub participation: f64,
    /// Zero-point amplitude √(ħ/(2m_eff ω_m)), m.
    pub x_zpf: f64,
    /// Frequency shift per displacement −η(ω_e/2)(1/2C_m)∂C/∂u, rad/s/m.
    pub g_em: f64,
    /// 2 x_zpf g_em, rad/s. Carries the sign of g_em.
    pub g0_e: f64,
}

/// `c_m` is one mechanically compliant capacitor (two in parallel), `c_s` the
/// stray capacitance, `dc_du` the capacitance change per modal displacement.
pub fn g0e_from_geometry(c_m: f64, c_s: f64, omega_e: f64, dc_du: f64, m_eff: f64, omega_m: f64) -> GeometryCoupling {
    let participation = 2.0 * c_m / (2.0 * c_m + c_s);
    let x_zpf = (HBAR / (2.0 * m_eff * omega_m)).sqrt();
    let g_em = -participation * omega_e / 2.0 / (2.0 * c_m) * dc_du;
    GeometryCoupling {
        participation,
        x_zpf,
        g_em,
        g0_e: 2.0 * x_zpf * g_em,
    }
}

/// ∂C/∂u that gives |g0_e| = `g0_e` for the stated geometry.
pub fn dc_du_for_g0e(c_m: f64, c_s: f64, omega_e: f64, g0_e: f64, m_eff: f64, omega_m: f64) -> f64 {
    let unit = g0e_from_geometry(c_m, c_s, omega_e, 1.0, m_eff, omega_m);
    (g0_e / unit.g0_e).abs()
}
