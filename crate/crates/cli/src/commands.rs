use anyhow::Result;
use rayon::prelude::*;
use std::path::PathBuf;
use transducer::config::OperatingPoint;
use transducer::fom::{matched_operating_point, ModulatorReport};
use transducer::network::{scattering_at, SystemMatrices};
use transducer::noise::{added_noise_full, output_spectrum, BathOccupancies, LayeredNoise};
use transducer::params::{from_hz, to_hz, HeatingModel, PowerLaw};
use transducer::transduction::{bandwidth, decompose, find_peak, shifted_mechanical_frequency};
use transducer::{DeviceParams, Mode};

use crate::grid::GridSpec;
use crate::output::{num, write_table, write_text};
use crate::Ctx;

/// Operating point of the config, rejected when unstable.
pub fn stable_point(ctx: &Ctx) -> Result<OperatingPoint> {
    let op = ctx.config.operating_point()?;
    SystemMatrices::new(&op.params, &op.drive).check_stable()?;
    Ok(op)
}

/// Bath occupancies with the resonator broadband term folded into the intrinsic microwave bath.
pub fn effective_baths(ctx: &Ctx, op: &OperatingPoint) -> BathOccupancies {
    let mut b = op.baths;
    if let Some(r) = ctx.config.resonator_noise() {
        b.n_int_e += r.occupancy(op.drive.p_e);
    }
    b
}

fn note_point(rec: &mut crate::RunRecord, op: &OperatingPoint) {
    rec.note("gamma_m_hz", to_hz(op.params.gamma_m));
    rec.note("kappa_in_e_hz", to_hz(op.params.kappa_in_e));
    rec.note("eta_e", op.params.eta(Mode::Microwave));
    rec.note("t_m_k", op.t_m);
    rec.note("heating_clamped", op.clamped);
    rec.note(
        "omega_m_shifted_hz",
        to_hz(shifted_mechanical_frequency(&op.params, &op.drive)),
    );
    rec.note("gamma_conv_hz", to_hz(bandwidth(&op.params, &op.drive)));
}

pub fn sparams(ctx: &Ctx, grid: &GridSpec) -> Result<PathBuf> {
    let op = stable_point(ctx)?;
    let (p, d) = (op.params, op.drive);
    let m = SystemMatrices::new(&p, &d);
    let center = shifted_mechanical_frequency(&p, &d);
    let offsets = grid.values();
    let rows = ctx.pool.install(|| {
        offsets
            .par_iter()
            .map(|&f| -> Result<Vec<String>> {
                let w = center + from_hz(f);
                let sm = scattering_at(&m, w)?;
                let c = decompose(&p, &d, w)?;
                Ok(vec![
                    num(f),
                    num(sm.reflection(Mode::Microwave)),
                    num(sm.reflection(Mode::Optical)),
                    num(sm.zeta()),
                    num(c.theta),
                    num(c.gain_e * c.gain_o),
                ])
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let header = ["delta_hz", "s_ee_mag2", "s_oo_mag2", "zeta", "theta", "gain"];
    let file = write_table(ctx.dir(), "sparams.csv", &header, &rows)?;

    let mut rec = ctx.record("sparams");
    rec.note("grid", grid.to_string());
    note_point(&mut rec, &op);
    let (wp, zp) = find_peak(&p, &d, 5.0 * bandwidth(&p, &d));
    rec.note("peak_delta_hz", to_hz(wp - center));
    rec.note("peak_zeta", zp);
    rec.finish(ctx.dir(), vec![file])
}

fn layers(n: &LayeredNoise) -> [f64; 6] {
    [n.background, n.resonator, n.mechanical, n.vacuum, n.other, n.total]
}

pub fn noise(ctx: &Ctx, grid: &GridSpec) -> Result<PathBuf> {
    let op = stable_point(ctx)?;
    let (p, d) = (op.params, op.drive);
    let center = shifted_mechanical_frequency(&p, &d);
    let setup = ctx.config.setup_noise();
    let resonator = ctx.config.resonator_noise();
    let offsets = grid.values();
    let rows: Vec<Vec<String>> = ctx.pool.install(|| {
        offsets
            .par_iter()
            .map(|&f| {
                let pt = output_spectrum(&p, &d, &[center + from_hz(f)], &op.baths, &setup, resonator.as_ref())[0];
                std::iter::once(f)
                    .chain(layers(&pt.e))
                    .chain(layers(&pt.o))
                    .map(num)
                    .collect()
            })
            .collect()
    });
    let mut header = vec!["delta_hz".to_string()];
    for port in ["e", "o"] {
        for layer in ["background", "resonator", "mechanical", "vacuum", "other", "total"] {
            header.push(format!("{port}_{layer}"));
        }
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let file = write_table(ctx.dir(), "noise.csv", &header, &rows)?;

    let mut rec = ctx.record("noise");
    rec.note("grid", grid.to_string());
    note_point(&mut rec, &op);
    let b = added_noise_full(&p, &d, center, &effective_baths(ctx, &op));
    rec.note("n_add_e", b.n_add_e);
    rec.note("n_add_o", b.n_add_o);
    rec.note("vacuum_e", b.e.vacuum());
    rec.note("vacuum_o", b.o.vacuum());
    rec.finish(ctx.dir(), vec![file])
}

/// Heating law that leaves the device unchanged.
fn frozen(base: &DeviceParams, fridge_floor: f64) -> HeatingModel {
    HeatingModel {
        gamma_m_vs_p_o: PowerLaw::Linear {
            slope: 0.0,
            intercept: base.gamma_m,
        },
        gamma_m_p_e_slope: 0.0,
        kappa_in_e_vs_p_o: PowerLaw::Linear {
            slope: 0.0,
            intercept: base.kappa_in_e,
        },
        t_m_log: (0.0, fridge_floor),
        fridge_floor,
    }
}

pub fn fom(ctx: &Ctx) -> Result<PathBuf> {
    let c = &ctx.config;
    let (p, d) = if c.fom.rate_matched {
        let base = c.base_params();
        let heating = c
            .heating_model()?
            .unwrap_or_else(|| frozen(&base, c.heating.fridge_floor_k));
        let drive = c.drive();
        matched_operating_point(
            &base,
            &heating,
            c.fom.p_o_w.unwrap_or(drive.p_o),
            drive.delta_o,
            c.fom.eta_e,
        )?
    } else {
        let op = c.operating_point()?;
        (op.params, op.drive)
    };
    SystemMatrices::new(&p, &d).check_stable()?;
    let r = ModulatorReport::new(&p, &d)?;
    let text = write_text(ctx.dir(), "fom.txt", &r.to_text())?;
    let json = write_text(ctx.dir(), "fom.json", &(serde_json::to_string_pretty(&r)? + "\n"))?;
    print!("{}", r.to_text());

    let mut rec = ctx.record("fom");
    rec.note("v_pi_uv", r.v_pi * 1e6);
    rec.note("e_bit_fj", r.e_bit * 1e15);
    rec.note("e_bit_cyclic_fj", r.e_bit_cyclic * 1e15);
    rec.note("p_e_w", d.p_e);
    rec.finish(ctx.dir(), vec![text, json])
}
