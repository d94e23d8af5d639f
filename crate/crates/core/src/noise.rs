//! Added-noise quanta at both output ports: the full bath-resolved expression,
//! the vacuum-only form, the gain/phonon-floor approximations, and layered
//! output spectra including the detection-chain background.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{analytic_coefficients, Bath, InPort};
use crate::params::{DerivedDrive, DeviceParams, DriveConfig, Mode};
use crate::transduction::{backaction_phonon_floor, gain, shifted_mechanical_frequency, theta};

/// Thermal occupancies of the five baths.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BathOccupancies {
    pub n_ext_e: f64,
    pub n_int_e: f64,
    pub n_ext_o: f64,
    pub n_int_o: f64,
    pub n_m: f64,
}

impl BathOccupancies {
    /// Electromagnetic baths empty, mechanical bath at `n_m`.
    pub fn mechanical(n_m: f64) -> Self {
        BathOccupancies {
            n_m,
            ..Default::default()
        }
    }

    pub fn of(&self, bath: Bath) -> f64 {
        match bath {
            Bath::ExtE => self.n_ext_e,
            Bath::IntE => self.n_int_e,
            Bath::ExtO => self.n_ext_o,
            Bath::IntO => self.n_int_o,
            Bath::Mech => self.n_m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for b in [Bath::ExtE, Bath::IntE, Bath::ExtO, Bath::IntO, Bath::Mech] {
            let n = self.of(b);
            if !(n.is_finite() && n >= 0.0) {
                return Err(Error::invalid("bath occupancy", format!("{b:?} = {n}")));
            }
        }
        Ok(())
    }
}

/// One input channel's share of a port's added noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseTerm {
    pub input: InPort,
    /// |Υ(port, input)|² written in terms of α, α̃ and η.
    pub weight: f64,
    /// n̄ for annihilation-operator inputs, n̄ + 1 for creation-operator inputs.
    pub occupancy: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortNoise {
    /// Sum of `terms[..].value`.
    pub total: f64,
    pub terms: [NoiseTerm; 10],
}

impl PortNoise {
    /// Zero-point part carried by the creation-operator inputs.
    pub fn vacuum(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.input.is_dagger())
            .map(|t| t.weight)
            .sum()
    }

    /// Part proportional to the occupancy of one bath.
    pub fn thermal(&self, bath: Bath, baths: &BathOccupancies) -> f64 {
        let n = baths.of(bath);
        self.terms
            .iter()
            .filter(|t| t.input.bath() == bath)
            .map(|t| t.weight * n)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    pub omega: f64,
    pub n_add_e: f64,
    pub n_add_o: f64,
    pub e: PortNoise,
    pub o: PortNoise,
    pub baths: BathOccupancies,
}

impl NoiseBudget {
    pub fn port(&self, mode: Mode) -> &PortNoise {
        match mode {
            Mode::Microwave => &self.e,
            Mode::Optical => &self.o,
        }
    }
}

fn port_noise(weights: [f64; 10], baths: &BathOccupancies) -> PortNoise {
    let mut total = 0.0;
    let terms = InPort::ALL.map(|input| {
        let w = weights[input.index()];
        let n = baths.of(input.bath());
        let occupancy = if input.is_dagger() { n + 1.0 } else { n };
        let value = w * occupancy;
        total += value;
        NoiseTerm {
            input,
            weight: w,
            occupancy,
            value,
        }
    });
    PortNoise { total, terms }
}

/// Added noise at both outputs, evaluated term by term from the closed-form coefficients.
pub fn added_noise_full(
    params: &DeviceParams,
    drive: &DriveConfig,
    omega: f64,
    baths: &BathOccupancies,
) -> NoiseBudget {
    let a = analytic_coefficients(params, drive, omega);
    let (ee, eo) = (params.eta(Mode::Microwave), params.eta(Mode::Optical));
    let weights = |mode| a.upsilon_row(mode, ee, eo).map(|z| z.norm_sqr());
    let e = port_noise(weights(Mode::Microwave), baths);
    let o = port_noise(weights(Mode::Optical), baths);
    NoiseBudget {
        omega,
        n_add_e: e.total,
        n_add_o: o.total,
        e,
        o,
        baths: *baths,
    }
}

/// Added noise with every bath empty: η_j(|α̃_jj|² + |α̃_jk|² + |α̃_jm|²).
pub fn added_noise_vacuum(params: &DeviceParams, drive: &DriveConfig, omega: f64) -> (f64, f64) {
    let a = analytic_coefficients(params, drive, omega);
    let e = params.eta(Mode::Microwave) * (a.alpha_t_ee.norm_sqr() + a.alpha_t_eo.norm_sqr() + a.alpha_t_em.norm_sqr());
    let o = params.eta(Mode::Optical) * (a.alpha_t_oo.norm_sqr() + a.alpha_t_oe.norm_sqr() + a.alpha_t_om.norm_sqr());
    (e, o)
}

/// Vacuum added noise through the backaction floor, valid for Δ_e = ω_m with
/// 𝒢_e ≃ 1: n_e ≃ θ⟨n⟩_min/η_o, n_o ≃ θ⟨n⟩_min(⟨n⟩_min+1)(Γ_o/Γ_e)/η_e,
/// with θ at ω_m + δ_ω.
pub fn added_noise_simplified(params: &DeviceParams, drive: &DriveConfig) -> Result<(f64, f64)> {
    let n_min = backaction_phonon_floor(params, drive)?;
    let th = theta(params, drive, shifted_mechanical_frequency(params, drive));
    let d = DerivedDrive::new(params, drive);
    let e = th / params.eta(Mode::Optical) * n_min;
    let o = if d.gamma_opt_e == 0.0 {
        0.0
    } else {
        th / params.eta(Mode::Microwave) * n_min * (n_min + 1.0) * (d.gamma_opt_o / d.gamma_opt_e)
    };
    Ok((e, o))
}

/// Quantum-limited amplifier noise (𝒢_o − 1, 𝒢_e − 1) referred to each output.
pub fn amplifier_referred_noise(params: &DeviceParams, drive: &DriveConfig) -> Result<(f64, f64)> {
    Ok((
        gain(params, drive, Mode::Optical)? - 1.0,
        gain(params, drive, Mode::Microwave)? - 1.0,
    ))
}

/// Broadband microwave resonator noise injected through the intrinsic port,
/// with occupancy linear in the microwave pump power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorNoise {
    /// Quanta per picowatt of microwave pump.
    pub occupancy_per_pw: f64,
}

impl Default for ResonatorNoise {
    fn default() -> Self {
        ResonatorNoise {
            occupancy_per_pw: 2.8e-3,
        }
    }
}

impl ResonatorNoise {
    pub fn occupancy(&self, p_e: f64) -> f64 {
        self.occupancy_per_pw * p_e / 1e-12
    }
}

/// Added noise of the detection chains, quanta.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SetupNoise {
    pub n_add_setup_e: f64,
    pub n_add_setup_o: f64,
}

/// Noise at one port split into the layers of a measured spectrum, quanta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayeredNoise {
    /// 1 + n_add,setup.
    pub background: f64,
    /// Thermal part from the intrinsic microwave bath.
    pub resonator: f64,
    /// Thermal part from the mechanical bath.
    pub mechanical: f64,
    pub vacuum: f64,
    /// Remaining thermal parts (waveguide baths, intrinsic optical bath).
    pub other: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub e: LayeredNoise,
    pub o: LayeredNoise,
}

fn layered(port: &PortNoise, baths: &BathOccupancies, n_add_setup: f64) -> LayeredNoise {
    let resonator = port.thermal(Bath::IntE, baths);
    let mechanical = port.thermal(Bath::Mech, baths);
    let vacuum = port.vacuum();
    let background = 1.0 + n_add_setup;
    LayeredNoise {
        background,
        resonator,
        mechanical,
        vacuum,
        other: port.total - resonator - mechanical - vacuum,
        total: background + port.total,
    }
}

/// Output noise spectra in quanta on the caller's grid. With `resonator`, its
/// occupancy is added to the intrinsic microwave bath.
pub fn output_spectrum(
    params: &DeviceParams,
    drive: &DriveConfig,
    omega_grid: &[f64],
    baths: &BathOccupancies,
    setup: &SetupNoise,
    resonator: Option<&ResonatorNoise>,
) -> Vec<SpectrumPoint> {
    let mut b = *baths;
    if let Some(r) = resonator {
        b.n_int_e += r.occupancy(drive.p_e);
    }
    omega_grid
        .iter()
        .map(|&w| {
            let budget = added_noise_full(params, drive, w, &b);
            SpectrumPoint {
                omega: w,
                e: layered(&budget.e, &b, setup.n_add_setup_e),
                o: layered(&budget.o, &b, setup.n_add_setup_o),
            }
        })
        .collect()
}
