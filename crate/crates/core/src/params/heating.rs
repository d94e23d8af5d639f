//! Empirical optical-absorption heating: mechanical decoherence, microwave
//! intrinsic loss and mechanical bath temperature as functions of pump power.

use serde::{Deserialize, Serialize};

use super::{from_hz, DeviceParams, DriveConfig};
use crate::error::{Error, Result};

/// A monotone map from power (W) to a rate (rad/s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PowerLaw {
    Linear {
        slope: f64,
        intercept: f64,
    },
    /// Anchors `(power_w, value)` sorted by power. Interpolation is linear in
    /// power from zero to the first positive anchor and log-linear in power
    /// between positive anchors; beyond the last anchor the last segment is
    /// extended.
    Tabulated(Vec<(f64, f64)>),
}

impl PowerLaw {
    pub fn eval(&self, p: f64) -> f64 {
        match self {
            PowerLaw::Linear { slope, intercept } => intercept + slope * p,
            PowerLaw::Tabulated(pts) => interpolate(pts, p),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        match self {
            PowerLaw::Linear { slope, intercept } => {
                if !(slope.is_finite() && intercept.is_finite() && *slope >= 0.0) {
                    return Err(Error::invalid(
                        name,
                        "linear law needs finite coefficients and slope >= 0",
                    ));
                }
            }
            PowerLaw::Tabulated(pts) => {
                if pts.is_empty() {
                    return Err(Error::invalid(name, "no anchors"));
                }
                for w in pts.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return Err(Error::invalid(name, "anchor powers must be strictly increasing"));
                    }
                    if w[1].1 < w[0].1 {
                        return Err(Error::invalid(name, "anchor values must be nondecreasing"));
                    }
                }
                if pts.iter().any(|&(p, v)| !(p.is_finite() && v.is_finite()) || p < 0.0) {
                    return Err(Error::invalid(name, "anchors must be finite with power >= 0"));
                }
            }
        }
        Ok(())
    }
}

fn interpolate(pts: &[(f64, f64)], p: f64) -> f64 {
    if pts.len() == 1 || p <= pts[0].0 {
        return pts[0].1;
    }
    let i = pts.windows(2).position(|w| p <= w[1].0).unwrap_or(pts.len() - 2);
    let (p0, v0) = pts[i];
    let (p1, v1) = pts[i + 1];
    let t = if p0 > 0.0 {
        (p / p0).ln() / (p1 / p0).ln()
    } else {
        (p - p0) / (p1 - p0)
    };
    v0 + t * (v1 - v0)
}

/// Result of [`HeatingModel::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatedParams {
    pub params: DeviceParams,
    /// Mechanical bath temperature, K.
    pub t_m: f64,
    /// True when the logarithmic law fell below the fridge floor and was clamped.
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatingModel {
    /// γ_m versus optical power.
    pub gamma_m_vs_p_o: PowerLaw,
    /// Additional γ_m per watt of microwave pump, rad/s/W.
    pub gamma_m_p_e_slope: f64,
    /// Intrinsic microwave loss versus optical power.
    pub kappa_in_e_vs_p_o: PowerLaw,
    /// T_m = a·ln(P_o / 1 pW) + b, K.
    pub t_m_log: (f64, f64),
    /// Fridge temperature floor, K.
    pub fridge_floor: f64,
}

impl Default for HeatingModel {
    fn default() -> Self {
        // Anchors at P_o = 0, 92 and 1556 pW.
        HeatingModel {
            gamma_m_vs_p_o: PowerLaw::Tabulated(vec![
                (0.0, from_hz(15.0)),
                (92e-12, from_hz(164.0)),
                (1556e-12, from_hz(355.0)),
            ]),
            gamma_m_p_e_slope: 0.0,
            kappa_in_e_vs_p_o: PowerLaw::Tabulated(vec![
                (0.0, from_hz(1.6e6)),
                (92e-12, from_hz(6.1e6)),
                (1556e-12, from_hz(13.9e6)),
            ]),
            t_m_log: (0.18, -0.47),
            fridge_floor: 0.05,
        }
    }
}

impl HeatingModel {
    pub fn validate(&self) -> Result<()> {
        self.gamma_m_vs_p_o.validate("gamma_m_vs_p_o")?;
        self.kappa_in_e_vs_p_o.validate("kappa_in_e_vs_p_o")?;
        if !(self.gamma_m_p_e_slope.is_finite() && self.gamma_m_p_e_slope >= 0.0) {
            return Err(Error::invalid("gamma_m_p_e_slope", "must be finite and >= 0"));
        }
        let (a, b) = self.t_m_log;
        if !(a.is_finite() && b.is_finite() && a >= 0.0) {
            return Err(Error::invalid("t_m_log", "needs finite coefficients with a >= 0"));
        }
        if !(self.fridge_floor.is_finite() && self.fridge_floor >= 0.0) {
            return Err(Error::invalid("fridge_floor", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Mechanical bath temperature and whether the floor was applied. Independent of P_e.
    pub fn bath_temperature(&self, p_o: f64) -> (f64, bool) {
        let (a, b) = self.t_m_log;
        if p_o <= 0.0 {
            return (self.fridge_floor, true);
        }
        let t = a * (p_o / 1e-12).ln() + b;
        if t < self.fridge_floor {
            (self.fridge_floor, true)
        } else {
            (t, false)
        }
    }

    /// Replaces γ_m and κ_in,e by their heated values. Neither drops below `base`.
    pub fn apply(&self, drive: &DriveConfig, base: &DeviceParams) -> HeatedParams {
        let gamma = self.gamma_m_vs_p_o.eval(drive.p_o) + self.gamma_m_p_e_slope * drive.p_e;
        let kin = self.kappa_in_e_vs_p_o.eval(drive.p_o);
        let (t_m, clamped) = self.bath_temperature(drive.p_o);
        HeatedParams {
            params: DeviceParams {
                gamma_m: gamma.max(base.gamma_m),
                kappa_in_e: kin.max(base.kappa_in_e),
                ..*base
            },
            t_m,
            clamped,
        }
    }
}

/// Free-function form of [`HeatingModel::apply`].
pub fn apply_heating(model: &HeatingModel, drive: &DriveConfig, base: &DeviceParams) -> HeatedParams {
    model.apply(drive, base)
}
