//! TOML run configuration. Keys carry unit suffixes (`_hz`, `_w`, `_k`, `_ohm`)
//! and are converted to rad/s once, here.
//!
//! ```toml
//! [device]
//! kappa_in_e_hz = 1.6e6
//! [drive]
//! p_e_w = 601e-12
//! p_o_w = 625e-12
//! delta_o_hz = 126e6
//! [heating]
//! gamma_conv_target_hz = 370.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{BathOccupancies, ResonatorNoise, SetupNoise};
use crate::params::{bose_occupancy, from_hz, to_hz, DerivedDrive, DeviceParams, DriveConfig, HeatingModel, PowerLaw};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceSection {
    pub omega_e_hz: f64,
    pub omega_o_hz: f64,
    pub omega_m_hz: f64,
    pub kappa_in_e_hz: f64,
    pub kappa_ex_e_hz: f64,
    pub kappa_in_o_hz: f64,
    pub kappa_ex_o_hz: f64,
    pub gamma_m_hz: f64,
    pub g0_e_hz: f64,
    pub g0_o_hz: f64,
    pub z_e_ohm: f64,
}

impl Default for DeviceSection {
    fn default() -> Self {
        Self::from(&DeviceParams::default())
    }
}

impl From<&DeviceParams> for DeviceSection {
    fn from(p: &DeviceParams) -> Self {
        DeviceSection {
            omega_e_hz: to_hz(p.omega_e),
            omega_o_hz: to_hz(p.omega_o),
            omega_m_hz: to_hz(p.omega_m),
            kappa_in_e_hz: to_hz(p.kappa_in_e),
            kappa_ex_e_hz: to_hz(p.kappa_ex_e),
            kappa_in_o_hz: to_hz(p.kappa_in_o),
            kappa_ex_o_hz: to_hz(p.kappa_ex_o),
            gamma_m_hz: to_hz(p.gamma_m),
            g0_e_hz: to_hz(p.g0_e),
            g0_o_hz: to_hz(p.g0_o),
            z_e_ohm: p.z_e,
        }
    }
}

impl DeviceSection {
    pub fn params(&self) -> DeviceParams {
        DeviceParams {
            omega_e: from_hz(self.omega_e_hz),
            omega_o: from_hz(self.omega_o_hz),
            omega_m: from_hz(self.omega_m_hz),
            kappa_in_e: from_hz(self.kappa_in_e_hz),
            kappa_ex_e: from_hz(self.kappa_ex_e_hz),
            kappa_in_o: from_hz(self.kappa_in_o_hz),
            kappa_ex_o: from_hz(self.kappa_ex_o_hz),
            gamma_m: from_hz(self.gamma_m_hz),
            g0_e: from_hz(self.g0_e_hz),
            g0_o: from_hz(self.g0_o_hz),
            z_e: self.z_e_ohm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveSection {
    pub p_e_w: f64,
    pub p_o_w: f64,
    pub delta_e_hz: f64,
    pub delta_o_hz: f64,
}

impl Default for DriveSection {
    fn default() -> Self {
        let d = DriveConfig::default();
        DriveSection {
            p_e_w: d.p_e,
            p_o_w: d.p_o,
            delta_e_hz: to_hz(d.delta_e),
            delta_o_hz: to_hz(d.delta_o),
        }
    }
}

impl DriveSection {
    pub fn drive(&self) -> DriveConfig {
        DriveConfig {
            p_e: self.p_e_w,
            p_o: self.p_o_w,
            delta_e: from_hz(self.delta_e_hz),
            delta_o: from_hz(self.delta_o_hz),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeatingSection {
    pub enabled: bool,
    /// `[p_o_w, gamma_m_hz]` anchors.
    pub gamma_m_anchors: Vec<[f64; 2]>,
    pub gamma_m_p_e_slope_hz_per_w: f64,
    /// `[p_o_w, kappa_in_e_hz]` anchors.
    pub kappa_in_e_anchors: Vec<[f64; 2]>,
    pub t_m_log_slope_k: f64,
    pub t_m_log_offset_k: f64,
    pub fridge_floor_k: f64,
    /// When set, γ_m is replaced by this Γ_conv minus Γ_e(ω_m).
    pub gamma_conv_target_hz: Option<f64>,
}

fn anchors_hz(law: &PowerLaw) -> Vec<[f64; 2]> {
    match law {
        PowerLaw::Tabulated(pts) => pts.iter().map(|&(p, v)| [p, to_hz(v)]).collect(),
        PowerLaw::Linear { intercept, .. } => vec![[0.0, to_hz(*intercept)]],
    }
}

impl Default for HeatingSection {
    fn default() -> Self {
        let m = HeatingModel::default();
        HeatingSection {
            enabled: true,
            gamma_m_anchors: anchors_hz(&m.gamma_m_vs_p_o),
            gamma_m_p_e_slope_hz_per_w: to_hz(m.gamma_m_p_e_slope),
            kappa_in_e_anchors: anchors_hz(&m.kappa_in_e_vs_p_o),
            t_m_log_slope_k: m.t_m_log.0,
            t_m_log_offset_k: m.t_m_log.1,
            fridge_floor_k: m.fridge_floor,
            gamma_conv_target_hz: None,
        }
    }
}

impl HeatingSection {
    pub fn model(&self) -> Result<HeatingModel> {
        let law = |a: &[[f64; 2]]| PowerLaw::Tabulated(a.iter().map(|&[p, v]| (p, from_hz(v))).collect());
        let m = HeatingModel {
            gamma_m_vs_p_o: law(&self.gamma_m_anchors),
            gamma_m_p_e_slope: from_hz(self.gamma_m_p_e_slope_hz_per_w),
            kappa_in_e_vs_p_o: law(&self.kappa_in_e_anchors),
            t_m_log: (self.t_m_log_slope_k, self.t_m_log_offset_k),
            fridge_floor: self.fridge_floor_k,
        };
        m.validate()?;
        Ok(m)
    }
}

/// Bath occupancies other than the mechanical one, plus the resonator broadband term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub n_ext_e: f64,
    pub n_int_e: f64,
    pub n_ext_o: f64,
    pub n_int_o: f64,
    /// Overrides the heating-law bath temperature.
    pub t_m_k: Option<f64>,
    pub resonator: bool,
    pub resonator_occupancy_per_pw: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection {
            n_ext_e: 0.0,
            n_int_e: 0.0,
            n_ext_o: 0.0,
            n_int_o: 0.0,
            t_m_k: None,
            resonator: true,
            resonator_occupancy_per_pw: ResonatorNoise::default().occupancy_per_pw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SetupSection {
    pub n_add_setup_e: f64,
    pub n_add_setup_o: f64,
}

impl Default for SetupSection {
    fn default() -> Self {
        SetupSection {
            n_add_setup_e: 9.9,
            n_add_setup_o: 8.804,
        }
    }
}

/// Operating point for the modulator figures of merit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FomSection {
    /// Solve P_e for Γ_e(ω_m) = γ_m instead of using `[drive] p_e_w`.
    pub rate_matched: bool,
    /// Optical power for the matched point. Defaults to `[drive] p_o_w`.
    pub p_o_w: Option<f64>,
    /// Microwave coupling ratio override at the matched point.
    pub eta_e: Option<f64>,
}

impl Default for FomSection {
    fn default() -> Self {
        FomSection {
            rate_matched: true,
            p_o_w: Some(92e-12),
            eta_e: Some(0.15),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub device: DeviceSection,
    pub drive: DriveSection,
    pub heating: HeatingSection,
    pub noise: NoiseSection,
    pub setup: SetupSection,
    pub fom: FomSection,
}

/// Device and drive after heating, with bath occupancies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub params: DeviceParams,
    pub drive: DriveConfig,
    /// Mechanical bath temperature, K.
    pub t_m: f64,
    /// True when the heating law fell below the fridge floor.
    pub clamped: bool,
    pub baths: BathOccupancies,
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let c: Config = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.base_params().validate()?;
        self.drive.drive().validate()?;
        if self.heating.enabled {
            self.heating.model()?;
        }
        let n = &self.noise;
        BathOccupancies {
            n_ext_e: n.n_ext_e,
            n_int_e: n.n_int_e,
            n_ext_o: n.n_ext_o,
            n_int_o: n.n_int_o,
            n_m: 0.0,
        }
        .validate()?;
        if let Some(t) = n.t_m_k {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::invalid("noise.t_m_k", format!("{t}")));
            }
        }
        if !(n.resonator_occupancy_per_pw.is_finite() && n.resonator_occupancy_per_pw >= 0.0) {
            return Err(Error::invalid("noise.resonator_occupancy_per_pw", "must be >= 0"));
        }
        if !(self.setup.n_add_setup_e >= 0.0 && self.setup.n_add_setup_o >= 0.0) {
            return Err(Error::invalid("setup", "added quanta must be >= 0"));
        }
        if let Some(t) = self.heating.gamma_conv_target_hz {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::invalid("heating.gamma_conv_target_hz", format!("{t}")));
            }
        }
        if let Some(eta) = self.fom.eta_e {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::invalid("fom.eta_e", format!("{eta} outside (0, 1]")));
            }
        }
        Ok(())
    }

    pub fn base_params(&self) -> DeviceParams {
        self.device.params()
    }

    pub fn drive(&self) -> DriveConfig {
        self.drive.drive()
    }

    pub fn heating_model(&self) -> Result<Option<HeatingModel>> {
        if self.heating.enabled {
            Ok(Some(self.heating.model()?))
        } else {
            Ok(None)
        }
    }

    pub fn setup_noise(&self) -> SetupNoise {
        SetupNoise {
            n_add_setup_e: self.setup.n_add_setup_e,
            n_add_setup_o: self.setup.n_add_setup_o,
        }
    }

    pub fn resonator_noise(&self) -> Option<ResonatorNoise> {
        self.noise.resonator.then_some(ResonatorNoise {
            occupancy_per_pw: self.noise.resonator_occupancy_per_pw,
        })
    }

    /// Operating point at the configured drive.
    pub fn operating_point(&self) -> Result<OperatingPoint> {
        self.operating_point_at(&self.drive())
    }

    /// Operating point at `drive`, applying heating, the Γ_conv target and bath occupancies.
    pub fn operating_point_at(&self, drive: &DriveConfig) -> Result<OperatingPoint> {
        drive.validate()?;
        let base = self.base_params();
        let (mut params, t_heat, clamped) = match self.heating_model()? {
            Some(m) => {
                let h = m.apply(drive, &base);
                (h.params, h.t_m, h.clamped)
            }
            None => (base, self.heating.fridge_floor_k, false),
        };
        if let Some(target) = self.heating.gamma_conv_target_hz {
            let gamma_e = DerivedDrive::new(&params, drive).gamma_opt_e;
            let gm = from_hz(target) - gamma_e;
            if !(gm > 0.0) {
                return Err(Error::invalid(
                    "heating.gamma_conv_target_hz",
                    format!(
                        "target {target} Hz is below the electromechanical damping {} Hz",
                        to_hz(gamma_e)
                    ),
                ));
            }
            params.gamma_m = gm;
        }
        let t_m = self.noise.t_m_k.unwrap_or(t_heat);
        let n = &self.noise;
        let baths = BathOccupancies {
            n_ext_e: n.n_ext_e,
            n_int_e: n.n_int_e,
            n_ext_o: n.n_ext_o,
            n_int_o: n.n_int_o,
            n_m: bose_occupancy(t_m, params.omega_m),
        };
        Ok(OperatingPoint {
            params,
            drive: *drive,
            t_m,
            clamped,
            baths,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Mode;

    #[test]
    fn empty_file_gives_defaults() {
        let c = Config::from_toml_str("").unwrap();
        assert_eq!(c, Config::default());
        let p = c.base_params();
        let d = DeviceParams::default();
        assert!((p.omega_m / d.omega_m - 1.0).abs() < 1e-15);
        assert!((p.g0_o / d.g0_o - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hz_converted_once() {
        let c = Config::from_toml_str("[device]\nomega_m_hz = 1.0e7\n[drive]\ndelta_o_hz = 5.0e7\n").unwrap();
        assert_eq!(c.base_params().omega_m, 2.0 * std::f64::consts::PI * 1e7);
        assert_eq!(c.drive().delta_o, 2.0 * std::f64::consts::PI * 5e7);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            Config::from_toml_str("[device]\nomega_m = 1.0\n"),
            Err(Error::Config(_))
        ));
        assert!(matches!(Config::from_toml_str("[bogus]\n"), Err(Error::Config(_))));
        assert!(Config::from_toml_str("[drive]\np_e_w = -1.0\n").is_err());
    }

    #[test]
    fn round_trip_text() {
        let mut c = Config::default();
        c.heating.gamma_conv_target_hz = Some(370.0);
        c.noise.t_m_k = Some(0.7);
        let back = Config::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn noise_operating_point() {
        let mut c = Config::default();
        c.heating.gamma_conv_target_hz = Some(370.0);
        let op = c.operating_point().unwrap();
        assert!((to_hz(op.params.kappa_in_e) / 11.38e6 - 1.0).abs() < 0.01);
        let conv = crate::transduction::bandwidth(&op.params, &op.drive);
        assert!((to_hz(conv) - 370.0).abs() < 1e-9);
        assert!((op.t_m - (0.18 * 625f64.ln() - 0.47)).abs() < 1e-12);
        assert!(op.baths.n_m > 0.0);
        assert!(op.params.eta(Mode::Microwave) < 0.1);
    }

    #[test]
    fn heating_off_keeps_base() {
        let c = Config::from_toml_str("[heating]\nenabled = false\n[noise]\nt_m_k = 0.0\n").unwrap();
        let op = c.operating_point().unwrap();
        assert_eq!(op.params, c.base_params());
        assert_eq!(op.baths.n_m, 0.0);
    }

    #[test]
    fn impossible_bandwidth_target() {
        let c = Config::from_toml_str("[heating]\ngamma_conv_target_hz = 1.0\n").unwrap();
        assert!(matches!(c.operating_point(), Err(Error::InvalidParameter { .. })));
    }
}
