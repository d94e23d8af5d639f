//! Spectra on a frequency grid, seeded measurement noise and CSV I/O.

use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{from_hz, to_hz, DeviceParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpectrum {
    /// Fourier frequency relative to the pump, rad/s.
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
    /// Per-bin standard deviation; zero for noiseless data.
    pub sigma: Vec<f64>,
    /// Parameters the spectrum was generated from, when synthetic.
    pub truth: Option<DeviceParams>,
    pub noise_seed: Option<u64>,
    /// Fridge temperature the spectrum belongs to, K.
    pub t_fridge: Option<f64>,
}

/// Multiplicative Gaussian measurement noise, one draw per bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Relative standard deviation per bin.
    pub sigma: f64,
    pub seed: u64,
}

impl SyntheticSpectrum {
    pub fn new(omega: Vec<f64>, values: Vec<f64>) -> Self {
        let n = values.len();
        SyntheticSpectrum {
            omega,
            values,
            sigma: vec![0.0; n],
            truth: None,
            noise_seed: None,
            t_fridge: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Multiplies every bin by 1 + σ·N(0,1) and records σ·value as its uncertainty.
    /// Bins are clamped at zero.
    pub fn with_noise(mut self, noise: Option<&NoiseSpec>) -> Result<Self> {
        let Some(ns) = noise else { return Ok(self) };
        if !(ns.sigma.is_finite() && ns.sigma >= 0.0) {
            return Err(Error::invalid("sigma", format!("{} must be >= 0", ns.sigma)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(ns.seed);
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        for (v, s) in self.values.iter_mut().zip(self.sigma.iter_mut()) {
            *s = ns.sigma * *v;
            *v = (*v * (1.0 + ns.sigma * normal.sample(&mut rng))).max(0.0);
        }
        self.noise_seed = Some(ns.seed);
        Ok(self)
    }

    /// Weights for least squares: σ when given, otherwise |value| (relative residuals).
    pub(crate) fn weights(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.sigma)
            .map(|(&v, &s)| {
                if s > 0.0 {
                    s
                } else if v != 0.0 {
                    v.abs()
                } else {
                    1.0
                }
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InsufficientData("empty spectrum".into()));
        }
        if self.omega.len() != self.values.len() || self.sigma.len() != self.values.len() {
            return Err(Error::InsufficientData("column lengths differ".into()));
        }
        if self
            .values
            .iter()
            .chain(&self.omega)
            .chain(&self.sigma)
            .any(|v| !v.is_finite())
        {
            return Err(Error::Domain("non-finite spectrum entry".into()));
        }
        Ok(())
    }

    /// Writes `omega_hz,value,sigma` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        wr.write_record(["omega_hz", "value", "sigma"]).map_err(io)?;
        for ((&o, &v), &s) in self.omega.iter().zip(&self.values).zip(&self.sigma) {
            wr.write_record([format!("{:.11e}", to_hz(o)), format!("{v:.11e}"), format!("{s:.11e}")])
                .map_err(io)?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads `omega_hz,value[,sigma]`. Errors carry the 1-based file line.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(r);
        let headers = rd
            .headers()
            .map_err(|e| Error::Parse {
                line: 1,
                message: e.to_string(),
            })?
            .clone();
        let names: Vec<&str> = headers.iter().collect();
        if names.len() < 2 || names[0] != "omega_hz" || names[1] != "value" || (names.len() > 2 && names[2] != "sigma")
        {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header omega_hz,value[,sigma], got {names:?}"),
            });
        }
        let (mut omega, mut values, mut sigma) = (Vec::new(), Vec::new(), Vec::new());
        for rec in rd.records() {
            let rec = rec.map_err(|e| Error::Parse {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            if rec.len() < 2 || rec.len() > 3 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 2 or 3 fields, got {}", rec.len()),
                });
            }
            let field = |i: usize, name: &str| -> Result<f64> {
                let s = rec.get(i).unwrap_or("");
                let v: f64 = s.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("{name}: cannot parse {s:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        message: format!("{name}: non-finite value"),
                    });
                }
                Ok(v)
            };
            omega.push(from_hz(field(0, "omega_hz")?));
            values.push(field(1, "value")?);
            let s = if rec.len() == 3 { field(2, "sigma")? } else { 0.0 };
            if s < 0.0 {
                return Err(Error::Parse {
                    line,
                    message: "sigma: negative".into(),
                });
            }
            sigma.push(s);
        }
        if values.is_empty() {
            return Err(Error::InsufficientData("spectrum has no data rows".into()));
        }
        Ok(SyntheticSpectrum {
            omega,
            values,
            sigma,
            truth: None,
            noise_seed: None,
            t_fridge: None,
        })
    }
}

/// `points` equally spaced angular frequencies over `center ± half_width`.
pub fn linear_grid(center: f64, half_width: f64, points: usize) -> Vec<f64> {
    let n = points.max(2);
    (0..n)
        .map(|k| center - half_width + 2.0 * half_width * k as f64 / (n - 1) as f64)
        .collect()
}
