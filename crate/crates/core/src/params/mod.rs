//! Device constants, pump configuration and the derived drive quantities
//! (intracavity photons, enhanced couplings, cooperativities, damping rates).
//!
//! All rates and frequencies are angular (rad/s). Powers are in watts.

mod heating;

pub use heating::{apply_heating, HeatedParams, HeatingModel, PowerLaw};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Cyclic frequency (Hz) to angular frequency (rad/s).
pub fn from_hz(nu: f64) -> f64 {
    TWO_PI * nu
}

/// Angular frequency (rad/s) to cyclic frequency (Hz).
pub fn to_hz(omega: f64) -> f64 {
    omega / TWO_PI
}

/// One of the two electromagnetic modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Microwave,
    Optical,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::Microwave, Mode::Optical];

    pub fn other(self) -> Mode {
        match self {
            Mode::Microwave => Mode::Optical,
            Mode::Optical => Mode::Microwave,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::Microwave => "e",
            Mode::Optical => "o",
        }
    }
}

/// Which susceptibility to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Microwave,
    Optical,
    Mechanical,
}

impl From<Mode> for Kind {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Microwave => Kind::Microwave,
            Mode::Optical => Kind::Optical,
        }
    }
}

/// Static resonator and mechanics constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    /// Microwave resonance, rad/s.
    pub omega_e: f64,
    /// Optical resonance, rad/s.
    pub omega_o: f64,
    /// Mechanical resonance, rad/s.
    pub omega_m: f64,
    pub kappa_in_e: f64,
    pub kappa_ex_e: f64,
    pub kappa_in_o: f64,
    pub kappa_ex_o: f64,
    /// Mechanical decoherence rate, rad/s. The zero-pump value unless replaced
    /// by [`HeatingModel::apply`].
    pub gamma_m: f64,
    /// Vacuum electromechanical coupling, rad/s.
    pub g0_e: f64,
    /// Vacuum optomechanical coupling, rad/s.
    pub g0_o: f64,
    /// Microwave waveguide impedance, ohm.
    pub z_e: f64,
}

impl Default for DeviceParams {
    /// Measured device values with the optical pump off.
    fn default() -> Self {
        DeviceParams {
            omega_e: from_hz(10.497e9),
            omega_o: from_hz(198.081e12),
            omega_m: from_hz(11.843e6),
            kappa_in_e: from_hz(1.6e6),
            kappa_ex_e: from_hz(1.15e6),
            kappa_in_o: from_hz(1.42e9),
            kappa_ex_o: from_hz(0.18e9),
            gamma_m: from_hz(15.0),
            g0_e: from_hz(67.0),
            g0_o: from_hz(662e3),
            z_e: 50.0,
        }
    }
}

impl DeviceParams {
    pub fn kappa(&self, mode: Mode) -> f64 {
        self.kappa_in(mode) + self.kappa_ex(mode)
    }

    pub fn kappa_in(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Microwave => self.kappa_in_e,
            Mode::Optical => self.kappa_in_o,
        }
    }

    pub fn kappa_ex(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Microwave => self.kappa_ex_e,
            Mode::Optical => self.kappa_ex_o,
        }
    }

    /// Coupling ratio κ_ex/κ.
    pub fn eta(&self, mode: Mode) -> f64 {
        self.kappa_ex(mode) / self.kappa(mode)
    }

    pub fn omega(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Microwave => self.omega_e,
            Mode::Optical => self.omega_o,
        }
    }

    pub fn g0(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Microwave => self.g0_e,
            Mode::Optical => self.g0_o,
        }
    }

    /// Sets κ_in so that the coupling ratio equals `eta` at fixed κ_ex.
    pub fn with_eta(mut self, mode: Mode, eta: f64) -> Self {
        let kin = self.kappa_ex(mode) * (1.0 / eta - 1.0);
        match mode {
            Mode::Microwave => self.kappa_in_e = kin,
            Mode::Optical => self.kappa_in_o = kin,
        }
        self
    }

    /// Rejects non-finite or non-positive rates. Intrinsic losses may be zero.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_e", self.omega_e),
            ("omega_o", self.omega_o),
            ("omega_m", self.omega_m),
            ("kappa_ex_e", self.kappa_ex_e),
            ("kappa_ex_o", self.kappa_ex_o),
            ("gamma_m", self.gamma_m),
            ("z_e", self.z_e),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        let nonneg = [
            ("kappa_in_e", self.kappa_in_e),
            ("kappa_in_o", self.kappa_in_o),
            ("g0_e", self.g0_e),
            ("g0_o", self.g0_o),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Soft checks on the expected frequency ordering ω_m ≪ ω_e ≪ ω_o.
    pub fn sanity_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.omega_m >= self.omega_e {
            w.push(format!(
                "mechanical frequency {:.4e} Hz is not below the microwave frequency {:.4e} Hz",
                to_hz(self.omega_m),
                to_hz(self.omega_e)
            ));
        }
        if self.omega_e >= self.omega_o {
            w.push(format!(
                "microwave frequency {:.4e} Hz is not below the optical frequency {:.4e} Hz",
                to_hz(self.omega_e),
                to_hz(self.omega_o)
            ));
        }
        w
    }
}

/// Pump powers and detunings Δ_j = ω_j − ω_d,j.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    /// Microwave pump power at the device, W.
    pub p_e: f64,
    /// Optical pump power at the device, W.
    pub p_o: f64,
    pub delta_e: f64,
    pub delta_o: f64,
}

impl Default for DriveConfig {
    fn default() -> Self {
        DriveConfig {
            p_e: 601e-12,
            p_o: 625e-12,
            delta_e: from_hz(11.843e6),
            delta_o: from_hz(126e6),
        }
    }
}

impl DriveConfig {
    pub fn power(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Microwave => self.p_e,
            Mode::Optical => self.p_o,
        }
    }

    pub fn detuning(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Microwave => self.delta_e,
            Mode::Optical => self.delta_o,
        }
    }

    pub fn with_power(mut self, mode: Mode, p: f64) -> Self {
        match mode {
            Mode::Microwave => self.p_e = p,
            Mode::Optical => self.p_o = p,
        }
        self
    }

    pub fn with_detuning(mut self, mode: Mode, delta: f64) -> Self {
        match mode {
            Mode::Microwave => self.delta_e = delta,
            Mode::Optical => self.delta_o = delta,
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_e", self.p_e), ("p_o", self.p_o)] {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {p}")));
            }
        }
        for (name, d) in [("delta_e", self.delta_e), ("delta_o", self.delta_o)] {
            if !d.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        Ok(())
    }
}

/// Mean intracavity pump photons n_d = |E|²/(κ²/4 + Δ²) with |E|² = κ_ex P/(ħω_d)
/// and pump frequency ω_d = ω − Δ.
pub fn intracavity_photons(params: &DeviceParams, drive: &DriveConfig, mode: Mode) -> f64 {
    photons_per_watt(params, drive.detuning(mode), mode) * drive.power(mode)
}

fn photons_per_watt(params: &DeviceParams, delta: f64, mode: Mode) -> f64 {
    let kappa = params.kappa(mode);
    let omega_d = params.omega(mode) - delta;
    params.kappa_ex(mode) / (HBAR * omega_d) / (kappa * kappa / 4.0 + delta * delta)
}

/// Pump power that produces `n_d` intracavity photons at detuning `delta`.
pub fn power_for_photons(params: &DeviceParams, delta: f64, mode: Mode, n_d: f64) -> f64 {
    n_d / photons_per_watt(params, delta, mode)
}

/// Cooperativity 4G²/(κγ_m).
pub fn cooperativity(params: &DeviceParams, g: f64, mode: Mode) -> f64 {
    4.0 * g * g / (params.kappa(mode) * params.gamma_m)
}

/// Two-sideband damping rate
/// Γ = G²[κ/((Δ−ω)²+κ²/4) − κ/((Δ+ω)²+κ²/4)].
pub fn damping_rate(g: f64, kappa: f64, delta: f64, omega: f64) -> f64 {
    let k2 = kappa * kappa / 4.0;
    g * g * (kappa / ((delta - omega).powi(2) + k2) - kappa / ((delta + omega).powi(2) + k2))
}

/// Pump-enhanced quantities for a given device and drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedDrive {
    pub n_d_e: f64,
    pub n_d_o: f64,
    /// Enhanced couplings G_j = g_{0,j}√n_{d,j}, rad/s.
    pub g_e: f64,
    pub g_o: f64,
    pub coop_e: f64,
    pub coop_o: f64,
    /// Damping rates at `omega`, rad/s. Negative for blue detuning.
    pub gamma_opt_e: f64,
    pub gamma_opt_o: f64,
    /// Frequency at which the damping rates were evaluated, rad/s.
    pub omega: f64,
}

impl DerivedDrive {
    /// Derived quantities with damping rates evaluated at the bare mechanical frequency.
    pub fn new(params: &DeviceParams, drive: &DriveConfig) -> Self {
        Self::at(params, drive, params.omega_m)
    }

    pub fn at(params: &DeviceParams, drive: &DriveConfig, omega: f64) -> Self {
        let n_d_e = intracavity_photons(params, drive, Mode::Microwave);
        let n_d_o = intracavity_photons(params, drive, Mode::Optical);
        let g_e = params.g0_e * n_d_e.sqrt();
        let g_o = params.g0_o * n_d_o.sqrt();
        DerivedDrive {
            n_d_e,
            n_d_o,
            g_e,
            g_o,
            coop_e: cooperativity(params, g_e, Mode::Microwave),
            coop_o: cooperativity(params, g_o, Mode::Optical),
            gamma_opt_e: damping_rate(g_e, params.kappa(Mode::Microwave), drive.delta_e, omega),
            gamma_opt_o: damping_rate(g_o, params.kappa(Mode::Optical), drive.delta_o, omega),
            omega,
        }
    }

    pub fn n_d(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Microwave => self.n_d_e,
            Mode::Optical => self.n_d_o,
        }
    }

    pub fn g(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Microwave => self.g_e,
            Mode::Optical => self.g_o,
        }
    }

    pub fn coop(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Microwave => self.coop_e,
            Mode::Optical => self.coop_o,
        }
    }

    pub fn gamma_opt(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Microwave => self.gamma_opt_e,
            Mode::Optical => self.gamma_opt_o,
        }
    }
}

/// Damping rate Γ_j(ω) for the configured drive.
pub fn optomechanical_damping(params: &DeviceParams, drive: &DriveConfig, mode: Mode, omega: f64) -> f64 {
    let g = params.g0(mode) * intracavity_photons(params, drive, mode).sqrt();
    damping_rate(g, params.kappa(mode), drive.detuning(mode), omega)
}

/// Cavity susceptibility χ(ω) = 1/(i(Δ−ω) + κ/2).
pub fn cavity_susceptibility(delta: f64, kappa: f64, omega: f64) -> Complex64 {
    Complex64::new(kappa / 2.0, delta - omega).inv()
}

/// Mirrored susceptibility χ̃(ω) = χ(−ω)* = 1/(−i(Δ+ω) + κ/2).
pub fn mirrored_susceptibility(delta: f64, kappa: f64, omega: f64) -> Complex64 {
    cavity_susceptibility(delta, kappa, -omega).conj()
}

/// χ_j(ω) for the electromagnetic modes or χ_m(ω) = 1/(i(ω_m−ω) + γ_m/2); with
/// `mirrored` the χ(−ω)* counterpart.
pub fn susceptibility(params: &DeviceParams, drive: &DriveConfig, kind: Kind, omega: f64, mirrored: bool) -> Complex64 {
    let (center, width) = match kind {
        Kind::Microwave => (drive.delta_e, params.kappa(Mode::Microwave)),
        Kind::Optical => (drive.delta_o, params.kappa(Mode::Optical)),
        Kind::Mechanical => (params.omega_m, params.gamma_m),
    };
    if mirrored {
        mirrored_susceptibility(center, width, omega)
    } else {
        cavity_susceptibility(center, width, omega)
    }
}

/// Bose–Einstein occupancy 1/(exp(ħω/k_BT) − 1); zero at T = 0.
pub fn bose_occupancy(temperature: f64, omega: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega / (K_B * temperature)).exp_m1()
}

/// Temperature whose Bose occupancy at `omega` equals `n`.
pub fn bose_temperature(n: f64, omega: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    HBAR * omega / (K_B * (1.0 / n).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn optical_photons_at_operating_point() {
        let p = DeviceParams::default();
        let d = DriveConfig::default();
        let n = intracavity_photons(&p, &d, Mode::Optical);
        // Independent evaluation: κ_ex P/(ħω_d) / (κ²/4 + Δ²).
        let kex = TWO_PI * 0.18e9;
        let k = TWO_PI * 1.6e9;
        let delta = TWO_PI * 126e6;
        let wd = TWO_PI * (198.081e12 - 126e6);
        let expect = kex * 625e-12 / (1.054_571_817e-34 * wd) / (k * k / 4.0 + delta * delta);
        assert!((n - expect).abs() < 1e-12 * expect);
        assert!((n - 0.208).abs() < 0.005, "n_d,o = {n}");
        assert_eq!(
            intracavity_photons(&p, &d.with_power(Mode::Optical, 0.0), Mode::Optical),
            0.0
        );
    }

    #[test]
    fn power_inverse() {
        let p = DeviceParams::default();
        let delta = from_hz(300e6);
        let pw = power_for_photons(&p, delta, Mode::Optical, 0.185);
        let d = DriveConfig::default()
            .with_power(Mode::Optical, pw)
            .with_detuning(Mode::Optical, delta);
        assert!((intracavity_photons(&p, &d, Mode::Optical) - 0.185).abs() < 1e-12);
    }

    #[test]
    fn damping_limits() {
        assert_eq!(damping_rate(0.0, 1e6, 1e7, 1e7), 0.0);
        let wm = from_hz(11.843e6);
        let kappa = 1e-3 * wm;
        let g = 1e3;
        let gam = damping_rate(g, kappa, wm, wm);
        let rs = 4.0 * g * g / kappa;
        assert!(((gam - rs) / rs).abs() < 1e-5);

        let p = DeviceParams::default();
        let ko = p.kappa(Mode::Optical);
        let go = damping_rate(g, ko, wm, wm);
        let suppression = go / (4.0 * g * g / ko);
        // Unresolved optical cavity: both sidebands scatter almost equally.
        assert!(suppression > 0.0 && suppression < 0.1, "{suppression}");
    }

    #[test]
    fn susceptibility_values() {
        let p = DeviceParams::default();
        let d = DriveConfig::default();
        let ke = p.kappa(Mode::Microwave);
        let chi = susceptibility(&p, &d, Kind::Microwave, d.delta_e, false);
        assert!((chi - Complex64::new(2.0 / ke, 0.0)).norm() < 1e-15 * chi.norm());
        let chim = susceptibility(&p, &d, Kind::Mechanical, p.omega_m, false);
        assert!((chim.re - 2.0 / p.gamma_m).abs() < 1e-12 * chim.re && chim.im == 0.0);
        let mirrored = susceptibility(&p, &d, Kind::Microwave, p.omega_m, true);
        assert!(mirrored.norm() < 0.1 * chi.norm());
        // χ̃(ω) = χ(−ω)*
        let w = 0.37 * p.omega_m;
        let lhs = susceptibility(&p, &d, Kind::Optical, w, true);
        let rhs = susceptibility(&p, &d, Kind::Optical, -w, false).conj();
        assert!((lhs - rhs).norm() < 1e-15 * lhs.norm());
    }

    #[test]
    fn bose_values() {
        assert_eq!(bose_occupancy(0.0, 1e7), 0.0);
        let n = bose_occupancy(0.70, from_hz(11.843e6));
        assert!((n - 1231.0).abs() < 1.0, "{n}");
        let omega = 1e9;
        let t = HBAR * omega / (K_B * std::f64::consts::LN_2);
        assert!((bose_occupancy(t, omega) - 1.0).abs() < 1e-12);
        assert!((bose_temperature(n, from_hz(11.843e6)) - 0.70).abs() < 1e-12);
    }

    #[test]
    fn eta_construction() {
        let p = DeviceParams::default().with_eta(Mode::Microwave, 0.15);
        assert!((p.eta(Mode::Microwave) - 0.15).abs() < 1e-15);
        assert_eq!(p.kappa(Mode::Optical), p.kappa_in_o + p.kappa_ex_o);
        assert!(p.sanity_warnings().is_empty());
        let bad = DeviceParams {
            omega_m: 2.0 * p.omega_e,
            ..p
        };
        assert_eq!(bad.sanity_warnings().len(), 1);
    }

    proptest! {
        #[test]
        fn photons_linear_in_power(p in 1e-15f64..1e-6, dhz in -1e9f64..1e9) {
            let params = DeviceParams::default();
            let d1 = DriveConfig::default().with_power(Mode::Optical, p).with_detuning(Mode::Optical, from_hz(dhz));
            let d2 = d1.with_power(Mode::Optical, 2.0 * p);
            let n1 = intracavity_photons(&params, &d1, Mode::Optical);
            let n2 = intracavity_photons(&params, &d2, Mode::Optical);
            prop_assert!((n2 - 2.0 * n1).abs() <= 1e-14 * n2);
        }

        #[test]
        fn damping_antisymmetric(g in 0.0f64..1e6, k in 1e3f64..1e10, delta in 1e3f64..1e9, w in 1e3f64..1e9) {
            let a = damping_rate(g, k, delta, w);
            let b = damping_rate(g, k, -delta, w);
            prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1e-300));
        }

        #[test]
        fn bose_monotone(t in 1e-3f64..10.0, w in 1e5f64..1e12, f in 1.001f64..3.0) {
            // Beyond ħω/kT ≈ 700 both sides underflow to zero.
            prop_assume!(HBAR * w * f / (K_B * t) < 600.0);
            prop_assert!(bose_occupancy(t * f, w) > bose_occupancy(t, w));
            prop_assert!(bose_occupancy(t, w * f) < bose_occupancy(t, w));
        }

        #[test]
        fn kappa_eta_by_construction(kin in 0.0f64..1e10, kex in 1.0f64..1e10) {
            let p = DeviceParams { kappa_in_o: kin, kappa_ex_o: kex, ..DeviceParams::default() };
            prop_assert_eq!(p.kappa(Mode::Optical), kin + kex);
            prop_assert_eq!(p.eta(Mode::Optical), kex / (kin + kex));
            prop_assert!(p.eta(Mode::Optical) > 0.0 && p.eta(Mode::Optical) <= 1.0);
        }
    }
}
