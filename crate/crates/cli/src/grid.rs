use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Lin,
    Log,
}

/// Sample grid written as `start:stop:points[:log]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridError(pub String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid grid: {}", self.0)
    }
}

impl std::error::Error for GridError {}

impl GridSpec {
    pub fn new(start: f64, stop: f64, points: usize, scale: Scale) -> Result<Self, GridError> {
        if !(start.is_finite() && stop.is_finite()) {
            return Err(GridError("bounds must be finite".into()));
        }
        if points < 2 {
            return Err(GridError(format!("{points} points, need at least 2")));
        }
        if !(start < stop) {
            return Err(GridError(format!("start {start} must be below stop {stop}")));
        }
        if scale == Scale::Log && start <= 0.0 {
            return Err(GridError("log grid needs positive bounds".into()));
        }
        Ok(GridSpec {
            start,
            stop,
            points,
            scale,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / n;
                match self.scale {
                    Scale::Lin => self.start + t * (self.stop - self.start),
                    Scale::Log => self.start * (self.stop / self.start).powf(t),
                }
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(GridError(format!("`{s}`: expected start:stop:points[:log]")));
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| GridError(format!("`{t}`: {e}")));
        let points = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|e| GridError(format!("`{}`: {e}", parts[2])))?;
        let scale = match parts.get(3).map(|t| t.trim()) {
            None | Some("lin") => Scale::Lin,
            Some("log") => Scale::Log,
            Some(other) => return Err(GridError(format!("unknown scale `{other}`"))),
        };
        GridSpec::new(num(parts[0])?, num(parts[1])?, points, scale)
    }
}

fn compact(x: f64) -> String {
    if x != 0.0 && !(1e-3..1e6).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", compact(self.start), compact(self.stop), self.points)?;
        if self.scale == Scale::Log {
            write!(f, ":log")?;
        }
        Ok(())
    }
}
