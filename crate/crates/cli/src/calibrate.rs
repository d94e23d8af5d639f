use std::collections::BTreeMap;
use std::fs::File;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Subcommand;
use transducer::calib::{
    extract_setup_mw, fit_bath_temperature, fit_g0e_set, fit_g0o_set, fit_gamma_m, linear_grid, mw_thermal_grid,
    synth_mw_thermal_spectrum, synth_opt_thermal_spectrum, synth_transduction_curve, synthesize_mw_background,
    FitResult, MwBackground, NoiseSpec, NoiseSpectrumPair, SetupModel, SyntheticSpectrum, ThermalTrend,
};
use transducer::network::SystemMatrices;
use transducer::noise::BathOccupancies;
use transducer::params::{bose_occupancy, from_hz, intracavity_photons, to_hz};
use transducer::transduction::shifted_mechanical_frequency;
use transducer::{DriveConfig, Error, Mode};

use crate::output::write_text;
use crate::Ctx;

#[derive(Debug, Subcommand)]
pub enum Fit {
    /// Electromechanical g0 from weak-pump microwave thermal spectra.
    G0e {
        /// Spectrum CSVs (omega_hz,value,sigma); synthesized when omitted.
        #[arg(long = "input")]
        inputs: Vec<PathBuf>,
        /// Fridge temperature per spectrum, K.
        #[arg(long = "t-fridge", default_values_t = [0.15, 0.2, 0.25, 0.3, 0.4])]
        t_fridge: Vec<f64>,
        /// Microwave pump for synthesis, W.
        #[arg(long, default_value_t = 0.5e-12)]
        p_e: f64,
        /// Relative noise per bin for synthesis.
        #[arg(long, default_value_t = 0.01)]
        noise_sigma: f64,
    },
    /// Optomechanical g0 from optical thermal spectra.
    G0o {
        #[arg(long = "input")]
        inputs: Vec<PathBuf>,
        #[arg(long = "t-fridge", default_values_t = [0.469, 0.565, 0.621])]
        t_fridge: Vec<f64>,
        /// Optical pump, W.
        #[arg(long, default_value_t = 30e-12)]
        p_o: f64,
        /// Only spectra at or above this temperature enter the average, K.
        #[arg(long, default_value_t = 0.45)]
        threshold_k: f64,
        #[arg(long, default_value_t = 0.01)]
        noise_sigma: f64,
    },
    /// Intrinsic mechanical linewidth from a transduction curve at the configured drive.
    GammaM {
        #[arg(long = "input")]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        noise_sigma: f64,
    },
    /// Mechanical bath temperature from both output noise spectra.
    Bath {
        #[arg(long, requires = "input_o")]
        input_e: Option<PathBuf>,
        #[arg(long, requires = "input_e")]
        input_o: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        noise_sigma: f64,
    },
    /// Microwave chain added noise and gain from the measured background.
    Setup {
        /// Absolute background spectral density, J.
        #[arg(long, requires_all = ["reflected_pump", "n_d_e"])]
        background: Option<f64>,
        /// Reflected pump power at the analyzer, W.
        #[arg(long)]
        reflected_pump: Option<f64>,
        /// Microwave intracavity photons.
        #[arg(long)]
        n_d_e: Option<f64>,
    },
}

fn load(paths: &[PathBuf]) -> Result<Vec<SyntheticSpectrum>> {
    paths
        .iter()
        .map(|p| {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            SyntheticSpectrum::read_csv(f).with_context(|| format!("reading {}", p.display()))
        })
        .collect()
}

fn noise(sigma: f64, seed: u64) -> Option<NoiseSpec> {
    (sigma > 0.0).then_some(NoiseSpec { sigma, seed })
}

fn save(ctx: &Ctx, name: &str, s: &SyntheticSpectrum, files: &mut Vec<String>) -> Result<()> {
    let mut buf = Vec::new();
    s.write_csv(&mut buf)?;
    files.push(write_text(ctx.dir(), name, std::str::from_utf8(&buf)?)?);
    Ok(())
}

fn with_temperatures(mut spectra: Vec<SyntheticSpectrum>, t: &[f64]) -> Result<Vec<SyntheticSpectrum>> {
    if spectra.len() != t.len() {
        bail!(Error::Config(format!(
            "{} spectra but {} --t-fridge values",
            spectra.len(),
            t.len()
        )));
    }
    for (s, &t) in spectra.iter_mut().zip(t) {
        s.t_fridge = Some(t);
    }
    Ok(spectra)
}

pub fn run(ctx: &Ctx, fit: &Fit) -> Result<PathBuf> {
    let c = &ctx.config;
    let base = c.base_params();
    let mut files = Vec::new();
    let (name, result, truth) = match fit {
        Fit::G0e {
            inputs,
            t_fridge,
            p_e,
            noise_sigma,
        } => {
            let drive = DriveConfig {
                p_e: *p_e,
                p_o: 0.0,
                ..c.drive()
            };
            let spectra = if inputs.is_empty() {
                let setup = SetupModel::default();
                let grid = mw_thermal_grid(&base, drive.delta_e, 150.0, 301);
                let mut out = Vec::new();
                for (k, &t) in t_fridge.iter().enumerate() {
                    let ns = noise(*noise_sigma, ctx.seed.wrapping_add(k as u64));
                    let n_m = bose_occupancy(t, base.omega_m);
                    let s = synth_mw_thermal_spectrum(&base, &drive, n_m, &setup, &grid, ns.as_ref())?;
                    save(ctx, &format!("g0e_input_{k}.csv"), &s, &mut files)?;
                    out.push(s);
                }
                with_temperatures(out, t_fridge)?
            } else {
                with_temperatures(load(inputs)?, t_fridge)?
            };
            let truth = inputs.is_empty().then_some(to_hz(base.g0_e));
            ("g0e", fit_g0e_set(&spectra, &base, drive.delta_e)?, truth)
        }
        Fit::G0o {
            inputs,
            t_fridge,
            p_o,
            threshold_k,
            noise_sigma,
        } => {
            let drive = DriveConfig {
                p_e: 0.0,
                p_o: *p_o,
                ..c.drive()
            };
            let trend = ThermalTrend::default();
            let spectra = if inputs.is_empty() {
                let setup = SetupModel::default();
                let grid = linear_grid(base.omega_m + from_hz(300.0), from_hz(1500.0), 301);
                let mut out = Vec::new();
                for (k, &t) in t_fridge.iter().enumerate() {
                    let ns = noise(*noise_sigma, ctx.seed.wrapping_add(k as u64));
                    let s = synth_opt_thermal_spectrum(&base, &drive, t, &setup, Some(&trend), &grid, ns.as_ref())?;
                    save(ctx, &format!("g0o_input_{k}.csv"), &s, &mut files)?;
                    out.push(s);
                }
                with_temperatures(out, t_fridge)?
            } else {
                with_temperatures(load(inputs)?, t_fridge)?
            };
            let truth = inputs.is_empty().then_some(to_hz(base.g0_o));
            (
                "g0o",
                fit_g0o_set(&spectra, &base, &drive, Some(&trend), *threshold_k)?,
                truth,
            )
        }
        Fit::GammaM { inputs, noise_sigma } => {
            let op = c.operating_point()?;
            SystemMatrices::new(&op.params, &op.drive).check_stable()?;
            let curves = if inputs.is_empty() {
                let w0 = shifted_mechanical_frequency(&op.params, &op.drive);
                let grid = linear_grid(w0, from_hz(1.5e3), 201);
                let ns = noise(*noise_sigma, ctx.seed);
                let s = synth_transduction_curve(&op.params, &op.drive, &grid, ns.as_ref())?;
                save(ctx, "gamma_m_input.csv", &s, &mut files)?;
                vec![s]
            } else {
                load(inputs)?
            };
            let curves: Vec<_> = curves.into_iter().map(|s| (s, op.drive)).collect();
            let truth = inputs.is_empty().then_some(to_hz(op.params.gamma_m));
            ("gamma_m", fit_gamma_m(&curves, &op.params)?, truth)
        }
        Fit::Bath {
            input_e,
            input_o,
            noise_sigma,
        } => {
            let op = c.operating_point()?;
            SystemMatrices::new(&op.params, &op.drive).check_stable()?;
            let setup = c.setup_noise();
            let resonator = c.resonator_noise();
            let pair = match (input_e, input_o) {
                (Some(e), Some(o)) => {
                    let mut v = load(&[e.clone(), o.clone()])?;
                    let o = v.pop().expect("two spectra");
                    NoiseSpectrumPair {
                        e: v.pop().expect("two spectra"),
                        o,
                    }
                }
                _ => {
                    let w0 = shifted_mechanical_frequency(&op.params, &op.drive);
                    let grid = linear_grid(w0, from_hz(1.5e3), 201);
                    let ns = noise(*noise_sigma, ctx.seed);
                    let pair = NoiseSpectrumPair::synthesize(
                        &op.params,
                        &op.drive,
                        &grid,
                        &op.baths,
                        &setup,
                        resonator.as_ref(),
                        ns.as_ref(),
                    )?;
                    save(ctx, "bath_input_e.csv", &pair.e, &mut files)?;
                    save(ctx, "bath_input_o.csv", &pair.o, &mut files)?;
                    pair
                }
            };
            let others = BathOccupancies { n_m: 0.0, ..op.baths };
            let truth = input_e.is_none().then_some(op.baths.n_m);
            (
                "bath",
                fit_bath_temperature(&pair, &op.params, &op.drive, &others, &setup, resonator.as_ref())?,
                truth,
            )
        }
        Fit::Setup {
            background,
            reflected_pump,
            n_d_e,
        } => {
            let drive = c.drive();
            let (m, truth) = match (background, reflected_pump, n_d_e) {
                (Some(b), Some(r), Some(n)) => (
                    MwBackground {
                        background: *b,
                        reflected_pump: *r,
                        n_d_e: *n,
                    },
                    None,
                ),
                _ => {
                    let setup = SetupModel {
                        n_add_setup_e: c.setup.n_add_setup_e,
                        ..SetupModel::default()
                    };
                    (
                        synthesize_mw_background(&base, &drive, &setup),
                        Some(setup.n_add_setup_e),
                    )
                }
            };
            let s = extract_setup_mw(&base, drive.delta_e, &m)?;
            let mut extra = BTreeMap::new();
            extra.insert("gain_setup_e_db".to_string(), s.gain_setup_e);
            extra.insert("n_d_e".to_string(), m.n_d_e);
            extra.insert(
                "n_d_e_model".to_string(),
                intracavity_photons(&base, &drive, Mode::Microwave),
            );
            let r = FitResult {
                parameter: "n_add_setup_e".into(),
                unit: "quanta".into(),
                estimate: s.n_add_setup_e,
                std_error: 0.0,
                residual_norm: 0.0,
                converged: true,
                iterations: 0,
                flags: Vec::new(),
                extra,
            };
            ("setup", r, truth)
        }
    };
    files.push(write_text(
        ctx.dir(),
        &format!("fit_{name}.json"),
        &(result.to_json() + "\n"),
    )?);
    let mut rec = ctx.record(&format!("calibrate {name}"));
    rec.note("parameter", result.parameter.clone());
    rec.note("estimate", result.estimate);
    rec.note("unit", result.unit.clone());
    rec.note("converged", result.converged);
    if let Some(t) = truth {
        rec.note("synthetic_truth", t);
    }
    let manifest = rec.finish(ctx.dir(), files)?;
    println!("{}", result.to_json());
    if !result.converged {
        return Err(Error::FitNonConvergence {
            parameter: result.parameter,
            iterations: result.iterations,
        }
        .into());
    }
    Ok(manifest)
}
