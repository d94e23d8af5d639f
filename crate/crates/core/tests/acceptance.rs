//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
//! Exits nonzero when any criterion fails.

use std::process::ExitCode;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use transducer::calib::{
    added_noise_from_efficiency, efficiency_from_added_noise, extract_setup_mw, fit_bath_temperature, fit_g0e_set,
    fit_g0o_set, fit_gamma_m, linear_grid, mw_thermal_grid, synth_mw_thermal_spectrum, synth_opt_thermal_spectrum,
    synth_transduction_curve, synthesize_mw_background, NoiseSpec, NoiseSpectrumPair, SetupModel, SyntheticSpectrum,
    ThermalTrend,
};
use transducer::config::Config;
use transducer::fom::{matched_operating_point, ModulatorReport};
use transducer::network::{analytic_coefficients, scattering_at, OutputCoefficients, SystemMatrices};
use transducer::noise::{added_noise_full, added_noise_vacuum, BathOccupancies};
use transducer::params::{
    bose_occupancy, from_hz, intracavity_photons, power_for_photons, to_hz, DerivedDrive, DeviceParams, DriveConfig,
    HeatingModel, Mode,
};
use transducer::transduction::{
    backaction_phonon_floor, decompose, find_peak, gain, shifted_mechanical_frequency, simulate_calibrated_measurement,
    zeta_full, zeta_resolved_limit, CalibratedProbe, LineGains,
};

// Tolerances.
const TOL_GAIN: f64 = 0.05;
const TOL_N_MIN: f64 = 0.03;
const ZETA_RANGE: (f64, f64) = (0.008, 0.015);
const INTERNAL_RANGE: (f64, f64) = (0.70, 1.40);
const N_DO_TARGET: (f64, f64) = (0.21, 0.02);
const TOL_VPI: f64 = 0.20;
const TOL_EBIT: f64 = 0.20;
const TOL_NOISE: f64 = 0.30;
const MAX_VACUUM_SHARE: f64 = 0.005;
const TOL_ORACLE: f64 = 1e-9;
const TOL_COMMUTATOR: f64 = 1e-9;
const TOL_LIMIT: f64 = 1e-5;
const MAX_RESOLVED_VACUUM: f64 = 1e-4;
const TOL_DECOMPOSITION: f64 = 1e-6;
const TOL_CALIBRATED: f64 = 1e-6;
const TOL_FIT_CLEAN: f64 = 0.01;
const TOL_FIT_NOISY: f64 = 0.05;
const NOISE_SIGMA: f64 = 0.01;
const TOL_ANCHOR_EXACT: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, o: Outcome) -> bool {
    println!(
        "{} criterion {id:>2} [{name}]: {}",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail
    );
    o.pass
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    let s = a.norm().max(b.norm());
    if s < 1e-12 {
        (a - b).norm()
    } else {
        (a - b).norm() / s
    }
}

fn reference_point() -> (DeviceParams, DriveConfig) {
    let mut c = Config::default();
    c.heating.gamma_conv_target_hz = Some(370.0);
    let op = c.operating_point().expect("reference operating point");
    (op.params, op.drive)
}

fn c1_gain() -> Outcome {
    let p = DeviceParams::default();
    let d = DriveConfig::default();
    let g_o = gain(&p, &d, Mode::Optical).unwrap();
    let half = DriveConfig {
        delta_o: p.kappa(Mode::Optical) / 2.0,
        ..d
    };
    let n_min = backaction_phonon_floor(&p, &half).unwrap();
    let target = p.kappa(Mode::Optical) / (4.0 * p.omega_m);
    let pass = rel(g_o, 110.0) <= TOL_GAIN && rel(n_min, target) <= TOL_N_MIN;
    Outcome {
        pass,
        detail: format!(
            "G_o = {g_o:.2} (110 ± {:.0}%); n_min(Δ_o = κ_o/2) = {n_min:.2} vs κ_o/4ω_m = {target:.2} (± {:.0}%)",
            TOL_GAIN * 100.0,
            TOL_N_MIN * 100.0
        ),
    }
}

fn c2_efficiency() -> Outcome {
    let (p, d) = reference_point();
    let (_, z) = find_peak(&p, &d, 5.0 * transducer::transduction::bandwidth(&p, &d));
    let internal = z / (p.eta(Mode::Microwave) * p.eta(Mode::Optical));
    let pass = (ZETA_RANGE.0..=ZETA_RANGE.1).contains(&z) && (INTERNAL_RANGE.0..=INTERNAL_RANGE.1).contains(&internal);
    Outcome {
        pass,
        detail: format!(
            "gamma_m/2pi = {:.1} Hz, peak zeta = {:.3}% in [{:.1}, {:.1}]%, internal = {:.1}% in [{:.0}, {:.0}]%",
            to_hz(p.gamma_m),
            z * 100.0,
            ZETA_RANGE.0 * 100.0,
            ZETA_RANGE.1 * 100.0,
            internal * 100.0,
            INTERNAL_RANGE.0 * 100.0,
            INTERNAL_RANGE.1 * 100.0
        ),
    }
}

fn c3_photons() -> Outcome {
    let (p, d) = reference_point();
    let n = intracavity_photons(&p, &d, Mode::Optical);
    let n_e = intracavity_photons(&p, &d, Mode::Microwave);
    Outcome {
        pass: (n - N_DO_TARGET.0).abs() <= N_DO_TARGET.1,
        detail: format!("n_d,o = {n:.4} (0.21 ± 0.02); n_d,e = {n_e:.3e} (informational)"),
    }
}

fn c4_fom() -> Outcome {
    let (p, d) = matched_operating_point(
        &DeviceParams::default(),
        &HeatingModel::default(),
        92e-12,
        from_hz(126e6),
        Some(0.15),
    )
    .unwrap();
    let r = ModulatorReport::new(&p, &d).unwrap();
    let pass = rel(r.v_pi, 16e-6) <= TOL_VPI && rel(r.e_bit, 1.3e-15) <= TOL_EBIT;
    Outcome {
        pass,
        detail: format!(
            "V_pi = {:.2} uV (16 ± {:.0}%), E_bit = {:.3} fJ (1.3 ± {:.0}%, angular); cyclic E_bit = {:.2} fJ; \
             P_e = {:.1} pW, gamma_m/2pi = {:.0} Hz, eta_e = {:.2}, C_e = {:.3}",
            r.v_pi * 1e6,
            TOL_VPI * 100.0,
            r.e_bit * 1e15,
            TOL_EBIT * 100.0,
            r.e_bit_cyclic * 1e15,
            d.p_e * 1e12,
            to_hz(r.gamma_m),
            r.eta_e,
            r.coop_e
        ),
    }
}

fn c5_noise() -> Outcome {
    let mut c = Config::default();
    c.heating.gamma_conv_target_hz = Some(370.0);
    let op = c.operating_point().unwrap();
    let mut baths = op.baths;
    if let Some(r) = c.resonator_noise() {
        baths.n_int_e += r.occupancy(op.drive.p_e);
    }
    let w = shifted_mechanical_frequency(&op.params, &op.drive);
    let b = added_noise_full(&op.params, &op.drive, w, &baths);
    let (ne, no) = (b.n_add_e, b.n_add_o);
    // Best assignment of the two computed values to the two quoted totals.
    let direct = rel(no, 224.0).max(rel(ne, 145.0));
    let swapped = rel(ne, 224.0).max(rel(no, 145.0));
    let (worst, pairing) = if direct <= swapped {
        (direct, "o<->224, e<->145")
    } else {
        (swapped, "e<->224, o<->145")
    };
    let share_e = b.e.vacuum() / ne;
    let share_o = b.o.vacuum() / no;
    let pass = worst <= TOL_NOISE && share_e <= MAX_VACUUM_SHARE && share_o <= MAX_VACUUM_SHARE;
    Outcome {
        pass,
        detail: format!(
            "T_m = {:.3} K, n_add,e = {ne:.1}, n_add,o = {no:.1}; pairing {pairing}, worst deviation {:.1}% (≤ {:.0}%); \
             vacuum share e = {:.3}%, o = {:.3}% (≤ {:.1}%)",
            op.t_m,
            worst * 100.0,
            TOL_NOISE * 100.0,
            share_e * 100.0,
            share_o * 100.0,
            MAX_VACUUM_SHARE * 100.0
        ),
    }
}

/// 100 stable random configurations around the measured device, 10 frequencies each.
fn random_set() -> Vec<(DeviceParams, DriveConfig, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_250_601);
    let base = DeviceParams::default();
    let mut out = Vec::new();
    while out.len() < 100 {
        let p = DeviceParams {
            kappa_in_e: from_hz(rng.random_range(0.5e6..15e6)),
            kappa_ex_e: from_hz(rng.random_range(0.5e6..3e6)),
            kappa_in_o: from_hz(rng.random_range(0.2e9..2e9)),
            kappa_ex_o: from_hz(rng.random_range(0.05e9..0.5e9)),
            gamma_m: from_hz(rng.random_range(15.0..500.0)),
            g0_e: base.g0_e * rng.random_range(0.5..2.0),
            g0_o: base.g0_o * rng.random_range(0.5..2.0),
            ..base
        };
        let d = DriveConfig {
            p_e: rng.random_range(1e-12..2e-9),
            p_o: rng.random_range(0.0..2e-9),
            delta_e: p.omega_m * rng.random_range(0.8..1.2),
            delta_o: from_hz(rng.random_range(10e6..1.5e9)),
        };
        if !SystemMatrices::new(&p, &d).is_stable() {
            continue;
        }
        let center = shifted_mechanical_frequency(&p, &d);
        let width = transducer::transduction::bandwidth(&p, &d).abs().max(p.gamma_m);
        let ws = (0..10).map(|_| center + width * rng.random_range(-5.0..5.0)).collect();
        out.push((p, d, ws));
    }
    out
}

fn c6_oracle(set: &[(DeviceParams, DriveConfig, Vec<f64>)]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (p, d, ws) in set {
        let m = SystemMatrices::new(p, d);
        for &w in ws {
            let sm = scattering_at(&m, w).unwrap();
            let (ee, eo) = (p.eta(Mode::Microwave), p.eta(Mode::Optical));
            let an = analytic_coefficients(p, d, w);
            let nu = OutputCoefficients::from_scattering(&sm, ee, eo);
            let pairs = [
                (an.alpha_ee, nu.alpha_ee),
                (an.alpha_oo, nu.alpha_oo),
                (an.alpha_eo, nu.alpha_eo),
                (an.alpha_oe, nu.alpha_oe),
                (an.alpha_em, nu.alpha_em),
                (an.alpha_om, nu.alpha_om),
                (an.alpha_t_ee, nu.alpha_t_ee),
                (an.alpha_t_oo, nu.alpha_t_oo),
                (an.alpha_t_eo, nu.alpha_t_eo),
                (an.alpha_t_oe, nu.alpha_t_oe),
                (an.alpha_t_em, nu.alpha_t_em),
                (an.alpha_t_om, nu.alpha_t_om),
            ];
            for (a, b) in pairs {
                worst = worst.max(crel(a, b));
            }
            count += 1;
        }
    }
    Outcome {
        pass: worst <= TOL_ORACLE,
        detail: format!("{} configs x 10 frequencies ({count} points), 12 coefficients: max relative deviation {worst:.2e} (≤ {TOL_ORACLE:.0e})", set.len()),
    }
}

fn c7_commutators(set: &[(DeviceParams, DriveConfig, Vec<f64>)]) -> Outcome {
    let mut worst_num: f64 = 0.0;
    let mut worst_an: f64 = 0.0;
    for (p, d, ws) in set {
        let m = SystemMatrices::new(p, d);
        let (ee, eo) = (p.eta(Mode::Microwave), p.eta(Mode::Optical));
        for &w in ws {
            let sm = scattering_at(&m, w).unwrap();
            for r in OutputCoefficients::from_scattering(&sm, ee, eo).commutator_residuals(ee, eo) {
                worst_num = worst_num.max(r.abs());
            }
            for r in analytic_coefficients(p, d, w).commutator_residuals(ee, eo) {
                worst_an = worst_an.max(r.abs());
            }
        }
    }
    Outcome {
        pass: worst_num <= TOL_COMMUTATOR && worst_an <= TOL_COMMUTATOR,
        detail: format!(
            "max |sum rule - 1|: matrix {worst_num:.2e}, closed form {worst_an:.2e} (≤ {TOL_COMMUTATOR:.0e})"
        ),
    }
}

fn c8_limit() -> Outcome {
    let base = DeviceParams::default();
    let wm = base.omega_m;
    let p = DeviceParams {
        kappa_in_e: 0.5e-3 * wm,
        kappa_ex_e: 0.5e-3 * wm,
        kappa_in_o: 0.4e-3 * wm,
        kappa_ex_o: 0.6e-3 * wm,
        gamma_m: from_hz(20.0),
        ..base
    };
    let photons = |mode: Mode, coop: f64| {
        let g2 = coop * p.kappa(mode) * p.gamma_m / 4.0;
        power_for_photons(&p, wm, mode, g2 / p.g0(mode).powi(2))
    };
    let mut worst: f64 = 0.0;
    let mut worst_vac: f64 = 0.0;
    for (ce, co) in [(1.0, 1.0), (2.0, 0.5), (5.0, 5.0)] {
        let d = DriveConfig {
            p_e: photons(Mode::Microwave, ce),
            p_o: photons(Mode::Optical, co),
            delta_e: wm,
            delta_o: wm,
        };
        let dd = DerivedDrive::new(&p, &d);
        let sbr = zeta_resolved_limit(p.eta(Mode::Microwave), p.eta(Mode::Optical), dd.coop_e, dd.coop_o);
        worst = worst.max(rel(zeta_full(&p, &d, wm), sbr));
        let (ve, vo) = added_noise_vacuum(&p, &d, wm);
        worst_vac = worst_vac.max(ve).max(vo);
    }
    Outcome {
        pass: worst <= TOL_LIMIT && worst_vac < MAX_RESOLVED_VACUUM,
        detail: format!(
            "kappa/omega_m = 1e-3, C in {{(1,1),(2,0.5),(5,5)}}: max |zeta/zeta_sbr - 1| = {worst:.2e} (≤ {TOL_LIMIT:.0e}); \
             max vacuum noise {worst_vac:.2e} (< {MAX_RESOLVED_VACUUM:.0e})"
        ),
    }
}

/// Detuning sweep at fixed n_d,o = 0.185.
fn detuning_sweep() -> Vec<(DeviceParams, DriveConfig)> {
    let (p, d) = reference_point();
    [15e6, 30e6, 60e6, 126e6, 300e6, 600e6, 800e6, 1200e6]
        .iter()
        .map(|&hz| {
            let delta_o = from_hz(hz);
            let p_o = power_for_photons(&p, delta_o, Mode::Optical, 0.185);
            (p, DriveConfig { p_o, delta_o, ..d })
        })
        .collect()
}

fn c9_decomposition() -> (Outcome, String) {
    let mut worst_shift: f64 = 0.0;
    let mut worst_bare: f64 = 0.0;
    let mut worst_expected: f64 = 0.0;
    for (p, d) in detuning_sweep() {
        let w = shifted_mechanical_frequency(&p, &d);
        let c = decompose(&p, &d, w).unwrap();
        worst_shift = worst_shift.max(rel(c.zeta, c.theta * c.gain_e * c.gain_o));
        let c0 = decompose(&p, &d, p.omega_m).unwrap();
        let r0 = rel(c0.zeta, c0.theta * c0.gain_e * c0.gain_o);
        worst_bare = worst_bare.max(r0);
        // At ω_m the only difference is γ_m²/(4ω_m) added to the 2δ_ω offset.
        let dd = DerivedDrive::new(&p, &d);
        let re = p.gamma_m + dd.gamma_opt_e + dd.gamma_opt_o;
        let im_theta = 2.0 * c0.freq_shift;
        let im_full = im_theta + p.gamma_m * p.gamma_m / (4.0 * p.omega_m);
        let expected = ((re * re + im_theta * im_theta) / (re * re + im_full * im_full) - 1.0).abs();
        worst_expected = worst_expected.max(expected);
    }
    let o = Outcome {
        pass: worst_shift <= TOL_DECOMPOSITION,
        detail: format!(
            "8 detunings 15 MHz-1.2 GHz at n_d,o = 0.185: max |zeta/(theta G_e G_o) - 1| at omega_m' = {worst_shift:.2e} (≤ {TOL_DECOMPOSITION:.0e})"
        ),
    };
    let info = format!(
        "INFO criterion  9: same sweep at omega_m: max residual {worst_bare:.2e}, analytic floor from the mechanical \
         counter-rotating term {worst_expected:.2e}; the factorization is not exact away from omega_m"
    );
    (o, info)
}

fn c10_calibrated() -> Outcome {
    let (p, d) = reference_point();
    let truth = zeta_full(&p, &d, shifted_mechanical_frequency(&p, &d));
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_truth: f64 = 0.0;
    let mut zs = Vec::new();
    for k in 0..50 {
        let g = |rng: &mut ChaCha8Rng| 10f64.powf(rng.random_range(-6.0..3.0));
        let gains = if k == 0 {
            LineGains {
                input_e: 1e-6,
                input_o: 1e3,
                output_e: 1e3,
                output_o: 1e-6,
            }
        } else {
            LineGains {
                input_e: g(&mut rng),
                input_o: g(&mut rng),
                output_e: g(&mut rng),
                output_o: g(&mut rng),
            }
        };
        let m = simulate_calibrated_measurement(
            &p,
            &d,
            &CalibratedProbe {
                gains,
                ..CalibratedProbe::default()
            },
        )
        .unwrap();
        worst_truth = worst_truth.max(rel(m.zeta, truth));
        zs.push(m.zeta);
    }
    let spread = zs.iter().map(|z| rel(*z, zs[0])).fold(0.0, f64::max);
    Outcome {
        pass: spread <= TOL_CALIBRATED && worst_truth <= TOL_CALIBRATED,
        detail: format!(
            "50 gain sets in [1e-6, 1e3]: spread {spread:.2e}, max deviation from zeta_full {worst_truth:.2e} (≤ {TOL_CALIBRATED:.0e})"
        ),
    }
}

fn c11_fits() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    let mut check = |name: &str, clean: f64, noisy: f64, truth: f64| {
        let (rc, rn) = (rel(clean, truth), rel(noisy, truth));
        pass &= rc <= TOL_FIT_CLEAN && rn <= TOL_FIT_NOISY;
        lines.push(format!("{name}: clean {:.2e}, noisy {:.2e}", rc, rn));
    };

    // g0_e from microwave thermal spectra at 150-400 mK.
    let p = DeviceParams::default();
    let weak = DriveConfig {
        p_e: 0.5e-12,
        p_o: 0.0,
        delta_e: p.omega_m,
        delta_o: 0.0,
    };
    let setup = SetupModel::default();
    let grid = mw_thermal_grid(&p, weak.delta_e, 150.0, 301);
    let mw = |noise: bool| -> Vec<SyntheticSpectrum> {
        [0.15, 0.2, 0.25, 0.3, 0.4]
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let ns = NoiseSpec {
                    sigma: NOISE_SIGMA,
                    seed: 1100 + k as u64,
                };
                let mut s = synth_mw_thermal_spectrum(
                    &p,
                    &weak,
                    bose_occupancy(t, p.omega_m),
                    &setup,
                    &grid,
                    noise.then_some(&ns),
                )
                .unwrap();
                s.t_fridge = Some(t);
                s
            })
            .collect()
    };
    let g0e = |noise| fit_g0e_set(&mw(noise), &p, weak.delta_e).unwrap().estimate;
    check("g0_e 67 Hz", g0e(false), g0e(true), 67.0);

    // g0_o from optical thermal spectra at the three warmest temperatures.
    let tr = ThermalTrend::default();
    let weak_o = DriveConfig {
        p_e: 0.0,
        p_o: 30e-12,
        delta_e: p.omega_m,
        delta_o: from_hz(126e6),
    };
    let og = linear_grid(p.omega_m + from_hz(300.0), from_hz(1500.0), 301);
    let opt = |noise: bool| -> Vec<SyntheticSpectrum> {
        [0.469, 0.565, 0.621]
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let ns = NoiseSpec {
                    sigma: NOISE_SIGMA,
                    seed: 1200 + k as u64,
                };
                synth_opt_thermal_spectrum(&p, &weak_o, t, &setup, Some(&tr), &og, noise.then_some(&ns)).unwrap()
            })
            .collect()
    };
    let g0o = |noise| fit_g0o_set(&opt(noise), &p, &weak_o, Some(&tr), 0.45).unwrap().estimate;
    check("g0_o 662 kHz", g0o(false), g0o(true), 662e3);

    // T_m from a joint two-port noise fit at the reference point.
    let mut c = Config::default();
    c.heating.gamma_conv_target_hz = Some(370.0);
    let op = c.operating_point().unwrap();
    let sn = c.setup_noise();
    let rn = c.resonator_noise();
    let ng = linear_grid(shifted_mechanical_frequency(&op.params, &op.drive), from_hz(1.5e3), 201);
    let others = BathOccupancies { n_m: 0.0, ..op.baths };
    let tm = |noise: bool| {
        let ns = NoiseSpec {
            sigma: NOISE_SIGMA,
            seed: 1300,
        };
        let pair = NoiseSpectrumPair::synthesize(
            &op.params,
            &op.drive,
            &ng,
            &op.baths,
            &sn,
            rn.as_ref(),
            noise.then_some(&ns),
        )
        .unwrap();
        fit_bath_temperature(&pair, &op.params, &op.drive, &others, &sn, rn.as_ref())
            .unwrap()
            .extra["t_m_k"]
    };
    check(&format!("T_m {:.3} K", op.t_m), tm(false), tm(true), op.t_m);

    // γ_m from a transduction curve.
    let (fp, fd) = reference_point();
    let tg = linear_grid(shifted_mechanical_frequency(&fp, &fd), from_hz(1.5e3), 201);
    let gm = |noise: bool| {
        let ns = NoiseSpec {
            sigma: NOISE_SIGMA,
            seed: 1400,
        };
        let curve = synth_transduction_curve(&fp, &fd, &tg, noise.then_some(&ns)).unwrap();
        let start = DeviceParams {
            gamma_m: from_hz(50.0),
            ..fp
        };
        fit_gamma_m(&[(curve, fd)], &start).unwrap().estimate
    };
    check(
        &format!("gamma_m {:.1} Hz", to_hz(fp.gamma_m)),
        gm(false),
        gm(true),
        to_hz(fp.gamma_m),
    );

    Outcome {
        pass,
        detail: format!(
            "{} (clean ≤ {:.0}%, {:.0}% noise ≤ {:.0}%)",
            lines.join("; "),
            TOL_FIT_CLEAN * 100.0,
            NOISE_SIGMA * 100.0,
            TOL_FIT_NOISY * 100.0
        ),
    }
}

fn c12_anchors() -> Outcome {
    let p = DeviceParams::default();
    let d = DriveConfig {
        p_e: 50e-12,
        p_o: 0.0,
        ..DriveConfig::default()
    };
    let setup = SetupModel::default();
    let got = extract_setup_mw(&p, d.delta_e, &synthesize_mw_background(&p, &d, &setup)).unwrap();
    let n_o = added_noise_from_efficiency(0.102).unwrap();
    let eta = efficiency_from_added_noise(8.8).unwrap();
    // The printed optical pair is quoted to 1 and 3 decimals.
    let pass = (got.n_add_setup_e - 9.9).abs() <= TOL_ANCHOR_EXACT
        && (got.gain_setup_e - 64.1).abs() <= TOL_ANCHOR_EXACT
        && (n_o - 8.8).abs() < 0.05
        && (eta - 0.102).abs() < 0.0005;
    Outcome {
        pass,
        detail: format!(
            "extracted n_add,setup,e = {:.10}, G_setup,e = {:.10} dB (± {TOL_ANCHOR_EXACT:.0e}); eta_qe 0.102 -> {n_o:.4} \
             (8.8 at printed precision), 8.8 -> eta_qe {eta:.5}",
            got.n_add_setup_e, got.gain_setup_e
        ),
    }
}

fn main() -> ExitCode {
    let set = random_set();
    let (c9, c9_info) = c9_decomposition();
    let results = [
        report(1, "backaction gain", c1_gain()),
        report(2, "operating-point efficiency", c2_efficiency()),
        report(3, "intracavity photons", c3_photons()),
        report(4, "figures of merit", c4_fom()),
        report(5, "noise totals", c5_noise()),
        report(6, "oracle equivalence", c6_oracle(&set)),
        report(7, "commutator constraints", c7_commutators(&set)),
        report(8, "limit reduction", c8_limit()),
        report(9, "decomposition identity", c9),
        report(10, "calibrated measurement", c10_calibrated()),
        report(11, "fit round-trips", c11_fits()),
        report(12, "calibration anchors", c12_anchors()),
    ];
    println!("{c9_info}");
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
