use std::fmt;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use transducer::network::SystemMatrices;
use transducer::noise::added_noise_full;
use transducer::params::{from_hz, power_for_photons, to_hz};
use transducer::transduction::{bandwidth, decompose, find_peak, shifted_mechanical_frequency};
use transducer::{DriveConfig, Mode};

use crate::commands::effective_baths;
use crate::grid::GridSpec;
use crate::output::{num, write_table};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Axis {
    /// Microwave pump power, W.
    #[value(name = "p_e")]
    PE,
    /// Optical pump power, W.
    #[value(name = "p_o")]
    PO,
    /// Optical detuning, Hz.
    DeltaO,
    /// Optical detuning, Hz, with P_o adjusted to hold n_d,o fixed.
    DeltaOConstNd,
    /// Probe offset from the shifted mechanical frequency, Hz.
    Omega,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Axis values, `start:stop:points[:log]`; W for powers, Hz otherwise.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: GridSpec,
    /// Optional second axis; rows run over the outer product, first axis outermost.
    #[arg(long, value_enum, requires = "grid2")]
    pub axis2: Option<Axis>,
    #[arg(long, allow_hyphen_values = true, requires = "axis2")]
    pub grid2: Option<GridSpec>,
    /// Optical intracavity photon number held by `delta_o_const_nd`.
    #[arg(long, default_value_t = 0.185)]
    pub n_d_o: f64,
}

/// One evaluated sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub drive: DriveConfig,
    /// Evaluation frequency, rad/s.
    pub omega: f64,
    pub zeta: f64,
    pub theta: f64,
    /// 𝒢_e𝒢_o.
    pub gain: f64,
    /// rad/s.
    pub gamma_conv: f64,
    pub n_add_e: f64,
    pub n_add_o: f64,
    pub eta_e: f64,
    /// rad/s.
    pub gamma_m: f64,
    pub t_m: f64,
    pub clamped: bool,
}

/// Applies axis values to the configured drive. Returns the drive and an
/// optional probe offset in rad/s.
pub fn drive_for(ctx: &Ctx, axes: &[(Axis, f64)], n_d_o: f64) -> Result<(DriveConfig, Option<f64>)> {
    let mut d = ctx.config.drive();
    let mut offset = None;
    let mut hold_nd = false;
    for &(axis, v) in axes {
        match axis {
            Axis::PE => d.p_e = v,
            Axis::PO => d.p_o = v,
            Axis::DeltaO => d.delta_o = from_hz(v),
            Axis::DeltaOConstNd => {
                d.delta_o = from_hz(v);
                hold_nd = true;
            }
            Axis::Omega => offset = Some(from_hz(v)),
        }
    }
    if hold_nd {
        d.p_o = power_for_photons(&ctx.config.base_params(), d.delta_o, Mode::Optical, n_d_o);
    }
    d.validate()?;
    Ok((d, offset))
}

/// Evaluates one point: at the probe offset when given, else at the ζ peak.
pub fn evaluate(ctx: &Ctx, drive: &DriveConfig, offset: Option<f64>) -> Result<SweepRow> {
    let op = ctx.config.operating_point_at(drive)?;
    let (p, d) = (op.params, op.drive);
    SystemMatrices::new(&p, &d).check_stable()?;
    let w = match offset {
        Some(o) => shifted_mechanical_frequency(&p, &d) + o,
        None => find_peak(&p, &d, 5.0 * bandwidth(&p, &d)).0,
    };
    let c = decompose(&p, &d, w)?;
    let noise = added_noise_full(&p, &d, w, &effective_baths(ctx, &op));
    Ok(SweepRow {
        drive: d,
        omega: w,
        zeta: c.zeta,
        theta: c.theta,
        gain: c.gain_e * c.gain_o,
        gamma_conv: c.bandwidth,
        n_add_e: noise.n_add_e,
        n_add_o: noise.n_add_o,
        eta_e: p.eta(Mode::Microwave),
        gamma_m: p.gamma_m,
        t_m: op.t_m,
        clamped: op.clamped,
    })
}

const HEADER: [&str; 17] = [
    "index",
    "axis1",
    "axis2",
    "p_e_w",
    "p_o_w",
    "delta_o_hz",
    "omega_hz",
    "zeta",
    "theta",
    "gain",
    "gamma_conv_hz",
    "n_add_e",
    "n_add_o",
    "eta_e",
    "gamma_m_hz",
    "t_m_k",
    "flag",
];

fn row_cells(index: usize, a1: f64, a2: Option<f64>, res: &Result<SweepRow>) -> Vec<String> {
    let mut cells = vec![index.to_string(), num(a1), a2.map(num).unwrap_or_default()];
    match res {
        Ok(r) => {
            cells.extend(
                [
                    r.drive.p_e,
                    r.drive.p_o,
                    to_hz(r.drive.delta_o),
                    to_hz(r.omega),
                    r.zeta,
                    r.theta,
                    r.gain,
                    to_hz(r.gamma_conv),
                    r.n_add_e,
                    r.n_add_o,
                    r.eta_e,
                    to_hz(r.gamma_m),
                    r.t_m,
                ]
                .map(num),
            );
            cells.push(if r.clamped { "clamped" } else { "ok" }.to_string());
        }
        Err(e) => {
            cells.extend(std::iter::repeat_n(String::new(), 13));
            cells.push(format!("error: {e:#}"));
        }
    }
    cells
}

pub fn run(ctx: &Ctx, args: &SweepArgs) -> Result<PathBuf> {
    if !(args.n_d_o > 0.0) {
        let reason = format!("{} must be > 0", args.n_d_o);
        return Err(transducer::Error::InvalidParameter {
            name: "n_d_o".into(),
            reason,
        }
        .into());
    }
    let first = args.grid.values();
    let second: Vec<Option<f64>> = match &args.grid2 {
        Some(g) => g.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let points: Vec<(f64, Option<f64>)> = first
        .iter()
        .flat_map(|&a| second.iter().map(move |&b| (a, b)))
        .collect();
    let results: Vec<Result<SweepRow>> = ctx.pool.install(|| {
        points
            .par_iter()
            .map(|&(a, b)| {
                let mut axes = vec![(args.axis, a)];
                if let (Some(ax), Some(v)) = (args.axis2, b) {
                    axes.push((ax, v));
                }
                let (d, offset) = drive_for(ctx, &axes, args.n_d_o)?;
                evaluate(ctx, &d, offset)
            })
            .collect()
    });
    let rows: Vec<Vec<String>> = points
        .iter()
        .zip(&results)
        .enumerate()
        .map(|(i, (&(a, b), r))| row_cells(i, a, b, r))
        .collect();
    let file = write_table(ctx.dir(), "sweep.csv", &HEADER, &rows)?;

    let mut rec = ctx.record("sweep");
    rec.note("axis1", format!("{} {}", args.axis, args.grid));
    if let (Some(ax), Some(g)) = (args.axis2, &args.grid2) {
        rec.note("axis2", format!("{ax} {g}"));
    }
    let failed = results.iter().filter(|r| r.is_err()).count();
    rec.note("points", points.len());
    rec.note("failed_points", failed);
    if let Some((i, best)) = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().ok().map(|r| (i, r)))
        .max_by(|a, b| a.1.zeta.total_cmp(&b.1.zeta))
    {
        rec.note("max_zeta", best.zeta);
        rec.note("max_zeta_index", i);
    }
    if failed > 0 {
        eprintln!(
            "warning: {failed} of {} sweep points failed; see the flag column",
            points.len()
        );
    }
    rec.finish(ctx.dir(), vec![file])
}
