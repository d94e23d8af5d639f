//! Linearized Langevin system matrices and the frequency-resolved scattering map
//! Υ(ω) = C(−iωI − A)⁻¹B − D, with closed-form output coefficients as an
//! independent cross-check.
//!
//! Mode basis: `[a_e, a_o, b, a_e†, a_o†, b†]`.
//! Input basis: `[e_ext, e_int, o_ext, o_int, m, e_ext†, e_int†, o_ext†, o_int†, m†]`.
//! Output basis: `[e, o, e†, o†]`.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::SMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{cavity_susceptibility, mirrored_susceptibility, DerivedDrive, DeviceParams, DriveConfig, Mode};

pub type AMatrix = SMatrix<Complex64, 6, 6>;
pub type BMatrix = SMatrix<Complex64, 6, 10>;
pub type CMatrix = SMatrix<Complex64, 4, 6>;
pub type DMatrix = SMatrix<f64, 4, 10>;
pub type Upsilon = SMatrix<Complex64, 4, 10>;
pub type Propagator = SMatrix<Complex64, 6, 10>;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutPort {
    E = 0,
    O = 1,
    EDag = 2,
    ODag = 3,
}

impl OutPort {
    pub fn of(mode: Mode) -> OutPort {
        match mode {
            Mode::Microwave => OutPort::E,
            Mode::Optical => OutPort::O,
        }
    }
}

/// Input noise/signal channels, in column order of B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InPort {
    ExtE = 0,
    IntE = 1,
    ExtO = 2,
    IntO = 3,
    Mech = 4,
    ExtEDag = 5,
    IntEDag = 6,
    ExtODag = 7,
    IntODag = 8,
    MechDag = 9,
}

/// The five physical baths behind the ten input channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bath {
    ExtE,
    IntE,
    ExtO,
    IntO,
    Mech,
}

impl InPort {
    pub const ALL: [InPort; 10] = [
        InPort::ExtE,
        InPort::IntE,
        InPort::ExtO,
        InPort::IntO,
        InPort::Mech,
        InPort::ExtEDag,
        InPort::IntEDag,
        InPort::ExtODag,
        InPort::IntODag,
        InPort::MechDag,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_dagger(self) -> bool {
        self.index() >= 5
    }

    pub fn bath(self) -> Bath {
        match self.index() % 5 {
            0 => Bath::ExtE,
            1 => Bath::IntE,
            2 => Bath::ExtO,
            3 => Bath::IntO,
            _ => Bath::Mech,
        }
    }

    pub fn ext(mode: Mode) -> InPort {
        match mode {
            Mode::Microwave => InPort::ExtE,
            Mode::Optical => InPort::ExtO,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            InPort::ExtE => "ext_e",
            InPort::IntE => "int_e",
            InPort::ExtO => "ext_o",
            InPort::IntO => "int_o",
            InPort::Mech => "m",
            InPort::ExtEDag => "ext_e_dag",
            InPort::IntEDag => "int_e_dag",
            InPort::ExtODag => "ext_o_dag",
            InPort::IntODag => "int_o_dag",
            InPort::MechDag => "m_dag",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    pub a_mat: AMatrix,
    pub b_mat: BMatrix,
    pub c_mat: CMatrix,
    pub d_mat: DMatrix,
}

/// Assembles A, B, C, D for the given device and drive.
pub fn build_matrices(params: &DeviceParams, drive: &DriveConfig, derived: &DerivedDrive) -> SystemMatrices {
    let ke = params.kappa(Mode::Microwave);
    let ko = params.kappa(Mode::Optical);
    let gm = params.gamma_m;
    let (ge, go) = (derived.g_e, derived.g_o);
    let (de, dd) = (drive.delta_e, drive.delta_o);
    let wm = params.omega_m;

    let mut a = AMatrix::zeros();
    a[(0, 0)] = -Complex64::new(ke / 2.0, de);
    a[(0, 2)] = -I * ge;
    a[(0, 5)] = -I * ge;
    a[(1, 1)] = -Complex64::new(ko / 2.0, dd);
    a[(1, 2)] = -I * go;
    a[(1, 5)] = -I * go;
    a[(2, 0)] = -I * ge;
    a[(2, 3)] = -I * ge;
    a[(2, 1)] = -I * go;
    a[(2, 4)] = -I * go;
    a[(2, 2)] = -Complex64::new(gm / 2.0, wm);
    a[(3, 3)] = -Complex64::new(ke / 2.0, -de);
    a[(3, 2)] = I * ge;
    a[(3, 5)] = I * ge;
    a[(4, 4)] = -Complex64::new(ko / 2.0, -dd);
    a[(4, 2)] = I * go;
    a[(4, 5)] = I * go;
    a[(5, 0)] = I * ge;
    a[(5, 3)] = I * ge;
    a[(5, 1)] = I * go;
    a[(5, 4)] = I * go;
    a[(5, 5)] = -Complex64::new(gm / 2.0, -wm);

    let mut b = BMatrix::zeros();
    for (row, col, mode) in [
        (0, 0, Mode::Microwave),
        (3, 5, Mode::Microwave),
        (1, 2, Mode::Optical),
        (4, 7, Mode::Optical),
    ] {
        b[(row, col)] = c(params.kappa_ex(mode).sqrt());
        b[(row, col + 1)] = c(params.kappa_in(mode).sqrt());
    }
    b[(2, 4)] = c(gm.sqrt());
    b[(5, 9)] = c(gm.sqrt());

    let mut cm = CMatrix::zeros();
    cm[(0, 0)] = c(params.kappa_ex_e.sqrt());
    cm[(2, 3)] = c(params.kappa_ex_e.sqrt());
    cm[(1, 1)] = c(params.kappa_ex_o.sqrt());
    cm[(3, 4)] = c(params.kappa_ex_o.sqrt());

    let mut d = DMatrix::zeros();
    d[(0, 0)] = 1.0;
    d[(1, 2)] = 1.0;
    d[(2, 5)] = 1.0;
    d[(3, 7)] = 1.0;

    SystemMatrices {
        a_mat: a,
        b_mat: b,
        c_mat: cm,
        d_mat: d,
    }
}

impl SystemMatrices {
    pub fn new(params: &DeviceParams, drive: &DriveConfig) -> Self {
        build_matrices(params, drive, &DerivedDrive::new(params, drive))
    }

    /// Eigenvalues of A from a complex Schur decomposition.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let t = self.a_mat.schur().unpack().1;
        (0..6).map(|i| t[(i, i)]).collect()
    }

    /// Eigenvalue of A with the largest real part.
    pub fn dominant_eigenvalue(&self) -> Complex64 {
        self.eigenvalues()
            .into_iter()
            .max_by(|a, b| a.re.total_cmp(&b.re))
            .expect("six eigenvalues")
    }

    pub fn is_stable(&self) -> bool {
        self.dominant_eigenvalue().re < 0.0
    }

    /// `Ok` when every eigenvalue of A has negative real part.
    pub fn check_stable(&self) -> Result<()> {
        let ev = self.dominant_eigenvalue();
        if ev.re < 0.0 {
            Ok(())
        } else {
            Err(Error::Unstable { re: ev.re, im: ev.im })
        }
    }

    /// Θ(ω) = (−iωI − A)⁻¹B by LU solve.
    pub fn propagator(&self, omega: f64) -> Result<Propagator> {
        let m = AMatrix::from_diagonal_element(-I * omega) - self.a_mat;
        m.lu().solve(&self.b_mat).ok_or_else(|| {
            let ev = self.dominant_eigenvalue();
            Error::Unstable { re: ev.re, im: ev.im }
        })
    }

    /// Writes `a_mat.csv`, `b_mat.csv`, `c_mat.csv`, `d_mat.csv` into `dir`.
    /// Each matrix cell becomes a `re,im` column pair.
    pub fn write_csv(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let d = self.d_mat.map(c);
        Ok(vec![
            write_matrix(dir, "a_mat.csv", self.a_mat.nrows(), self.a_mat.ncols(), |i, j| {
                self.a_mat[(i, j)]
            })?,
            write_matrix(dir, "b_mat.csv", 6, 10, |i, j| self.b_mat[(i, j)])?,
            write_matrix(dir, "c_mat.csv", 4, 6, |i, j| self.c_mat[(i, j)])?,
            write_matrix(dir, "d_mat.csv", 4, 10, |i, j| d[(i, j)])?,
        ])
    }
}

fn write_matrix(
    dir: &Path,
    name: &str,
    rows: usize,
    cols: usize,
    at: impl Fn(usize, usize) -> Complex64,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut f = File::create(&path)?;
    let header: Vec<String> = (0..cols)
        .flat_map(|j| [format!("c{j}_re"), format!("c{j}_im")])
        .collect();
    writeln!(f, "{}", header.join(","))?;
    for i in 0..rows {
        let cells: Vec<String> = (0..cols)
            .flat_map(|j| {
                let z = at(i, j);
                [format!("{:.17e}", z.re), format!("{:.17e}", z.im)]
            })
            .collect();
        writeln!(f, "{}", cells.join(","))?;
    }
    Ok(path)
}

/// Υ(ω) at one rotating-frame frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    pub omega: f64,
    pub upsilon: Upsilon,
}

impl ScatteringMatrix {
    pub fn entry(&self, out: OutPort, input: InPort) -> Complex64 {
        self.upsilon[(out as usize, input.index())]
    }

    /// Bidirectional efficiency |Υ(o, e_ext)·Υ(e, o_ext)|.
    pub fn zeta(&self) -> f64 {
        (self.entry(OutPort::O, InPort::ExtE) * self.entry(OutPort::E, InPort::ExtO)).norm()
    }

    /// Reflection |Υ(j, j_ext)|².
    pub fn reflection(&self, mode: Mode) -> f64 {
        self.entry(OutPort::of(mode), InPort::ext(mode)).norm_sqr()
    }

    /// Transmission |Υ(to, from_ext)|².
    pub fn transmission(&self, from: Mode, to: Mode) -> f64 {
        self.entry(OutPort::of(to), InPort::ext(from)).norm_sqr()
    }
}

pub fn scattering_at(matrices: &SystemMatrices, omega: f64) -> Result<ScatteringMatrix> {
    let theta = matrices.propagator(omega)?;
    let upsilon = matrices.c_mat * theta - matrices.d_mat.map(c);
    Ok(ScatteringMatrix { omega, upsilon })
}

/// Output-field coefficients α and α̃ (tilde set).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputCoefficients {
    pub alpha_ee: Complex64,
    pub alpha_oo: Complex64,
    pub alpha_eo: Complex64,
    pub alpha_oe: Complex64,
    pub alpha_em: Complex64,
    pub alpha_om: Complex64,
    pub alpha_t_ee: Complex64,
    pub alpha_t_oo: Complex64,
    pub alpha_t_eo: Complex64,
    pub alpha_t_oe: Complex64,
    pub alpha_t_em: Complex64,
    pub alpha_t_om: Complex64,
}

/// Per-row view: (α_jj, α_jk, α_jm, α̃_jj, α̃_jk, α̃_jm) for output mode j.
#[derive(Debug, Clone, Copy)]
pub struct RowCoefficients {
    pub same: Complex64,
    pub cross: Complex64,
    pub mech: Complex64,
    pub t_same: Complex64,
    pub t_cross: Complex64,
    pub t_mech: Complex64,
}

impl OutputCoefficients {
    pub fn row(&self, mode: Mode) -> RowCoefficients {
        match mode {
            Mode::Microwave => RowCoefficients {
                same: self.alpha_ee,
                cross: self.alpha_eo,
                mech: self.alpha_em,
                t_same: self.alpha_t_ee,
                t_cross: self.alpha_t_eo,
                t_mech: self.alpha_t_em,
            },
            Mode::Optical => RowCoefficients {
                same: self.alpha_oo,
                cross: self.alpha_oe,
                mech: self.alpha_om,
                t_same: self.alpha_t_oo,
                t_cross: self.alpha_t_oe,
                t_mech: self.alpha_t_om,
            },
        }
    }

    /// Υ row for output `mode` built from the coefficients and coupling ratios.
    pub fn upsilon_row(&self, mode: Mode, eta_e: f64, eta_o: f64) -> [Complex64; 10] {
        let r = self.row(mode);
        let (ej, ek) = match mode {
            Mode::Microwave => (eta_e, eta_o),
            Mode::Optical => (eta_o, eta_e),
        };
        let same = [r.same * ej - 1.0, r.same * (ej * (1.0 - ej)).sqrt()];
        let cross = [r.cross * (ej * ek).sqrt(), r.cross * (ej * (1.0 - ek)).sqrt()];
        let t_same = [r.t_same * ej, r.t_same * (ej * (1.0 - ej)).sqrt()];
        let t_cross = [r.t_cross * (ej * ek).sqrt(), r.t_cross * (ej * (1.0 - ek)).sqrt()];
        let mech = r.mech * ej.sqrt();
        let t_mech = r.t_mech * ej.sqrt();
        match mode {
            Mode::Microwave => [
                same[0], same[1], cross[0], cross[1], mech, t_same[0], t_same[1], t_cross[0], t_cross[1], t_mech,
            ],
            Mode::Optical => [
                cross[0], cross[1], same[0], same[1], mech, t_cross[0], t_cross[1], t_same[0], t_same[1], t_mech,
            ],
        }
    }

    /// Recovers the coefficients from Υ by dividing out the √η prefactors of the
    /// external-port and mechanical columns.
    pub fn from_scattering(sm: &ScatteringMatrix, eta_e: f64, eta_o: f64) -> Self {
        let u = |o, i| sm.entry(o, i);
        let seo = (eta_e * eta_o).sqrt();
        OutputCoefficients {
            alpha_ee: (u(OutPort::E, InPort::ExtE) + 1.0) / eta_e,
            alpha_oo: (u(OutPort::O, InPort::ExtO) + 1.0) / eta_o,
            alpha_eo: u(OutPort::E, InPort::ExtO) / seo,
            alpha_oe: u(OutPort::O, InPort::ExtE) / seo,
            alpha_em: u(OutPort::E, InPort::Mech) / eta_e.sqrt(),
            alpha_om: u(OutPort::O, InPort::Mech) / eta_o.sqrt(),
            alpha_t_ee: u(OutPort::E, InPort::ExtEDag) / eta_e,
            alpha_t_oo: u(OutPort::O, InPort::ExtODag) / eta_o,
            alpha_t_eo: u(OutPort::E, InPort::ExtODag) / seo,
            alpha_t_oe: u(OutPort::O, InPort::ExtEDag) / seo,
            alpha_t_em: u(OutPort::E, InPort::MechDag) / eta_e.sqrt(),
            alpha_t_om: u(OutPort::O, InPort::MechDag) / eta_o.sqrt(),
        }
    }

    /// Left-hand side minus one of the two commutator sum rules `[e, o]`.
    pub fn commutator_residuals(&self, eta_e: f64, eta_o: f64) -> [f64; 2] {
        let rule = |r: RowCoefficients, ej: f64| {
            (r.same * ej - 1.0).norm_sqr() + ej * (1.0 - ej) * r.same.norm_sqr() - ej * r.t_same.norm_sqr()
                + ej * (r.cross.norm_sqr() - r.t_cross.norm_sqr())
                + ej * (r.mech.norm_sqr() - r.t_mech.norm_sqr())
                - 1.0
        };
        [
            rule(self.row(Mode::Microwave), eta_e),
            rule(self.row(Mode::Optical), eta_o),
        ]
    }
}

/// Shared susceptibilities and denominator of the closed-form solution at ω.
#[derive(Debug, Clone, Copy)]
pub struct Response {
    pub chi_e: Complex64,
    pub chi_t_e: Complex64,
    pub chi_o: Complex64,
    pub chi_t_o: Complex64,
    pub chi_m: Complex64,
    pub chi_t_m: Complex64,
    pub g_e: f64,
    pub g_o: f64,
    pub den: Complex64,
}

impl Response {
    pub fn new(params: &DeviceParams, drive: &DriveConfig, omega: f64) -> Self {
        let derived = DerivedDrive::new(params, drive);
        Self::with_couplings(params, drive, derived.g_e, derived.g_o, omega)
    }

    pub fn with_couplings(params: &DeviceParams, drive: &DriveConfig, g_e: f64, g_o: f64, omega: f64) -> Self {
        let ke = params.kappa(Mode::Microwave);
        let ko = params.kappa(Mode::Optical);
        let chi_e = cavity_susceptibility(drive.delta_e, ke, omega);
        let chi_t_e = mirrored_susceptibility(drive.delta_e, ke, omega);
        let chi_o = cavity_susceptibility(drive.delta_o, ko, omega);
        let chi_t_o = mirrored_susceptibility(drive.delta_o, ko, omega);
        let chi_m = cavity_susceptibility(params.omega_m, params.gamma_m, omega);
        let chi_t_m = mirrored_susceptibility(params.omega_m, params.gamma_m, omega);
        let den = 1.0 + (chi_m - chi_t_m) * (g_e * g_e * (chi_e - chi_t_e) + g_o * g_o * (chi_o - chi_t_o));
        Response {
            chi_e,
            chi_t_e,
            chi_o,
            chi_t_o,
            chi_m,
            chi_t_m,
            g_e,
            g_o,
            den,
        }
    }
}

/// Closed-form α, α̃ from the susceptibilities.
pub fn analytic_coefficients(params: &DeviceParams, drive: &DriveConfig, omega: f64) -> OutputCoefficients {
    coefficients_from(params, &Response::new(params, drive, omega))
}

pub(crate) fn coefficients_from(params: &DeviceParams, r: &Response) -> OutputCoefficients {
    let ke = params.kappa(Mode::Microwave);
    let ko = params.kappa(Mode::Optical);
    let gm = params.gamma_m;
    let (ge, go) = (r.g_e, r.g_o);
    let (ge2, go2) = (ge * ge, go * go);
    let dm = r.chi_t_m - r.chi_m;
    let spring_e = r.chi_e - r.chi_t_e;
    let spring_o = r.chi_o - r.chi_t_o;
    let keo = (ke * ko).sqrt();
    let den = r.den;

    OutputCoefficients {
        alpha_ee: ke * r.chi_e * (1.0 - dm * (go2 * spring_o - ge2 * r.chi_t_e)) / den,
        alpha_oo: ko * r.chi_o * (1.0 - dm * (ge2 * spring_e - go2 * r.chi_t_o)) / den,
        alpha_eo: keo * r.chi_e * r.chi_o * ge * go * dm / den,
        alpha_oe: keo * r.chi_e * r.chi_o * ge * go * dm / den,
        alpha_em: -I * (ke * gm).sqrt() * ge * r.chi_e * r.chi_m / den,
        alpha_om: -I * (ko * gm).sqrt() * go * r.chi_o * r.chi_m / den,
        alpha_t_ee: ke * r.chi_e * r.chi_t_e * ge2 * dm / den,
        alpha_t_oo: ko * r.chi_o * r.chi_t_o * go2 * dm / den,
        alpha_t_eo: keo * r.chi_e * r.chi_t_o * ge * go * dm / den,
        alpha_t_oe: keo * r.chi_t_e * r.chi_o * ge * go * dm / den,
        alpha_t_em: -I * (ke * gm).sqrt() * ge * r.chi_e * r.chi_t_m / den,
        alpha_t_om: -I * (ko * gm).sqrt() * go * r.chi_o * r.chi_t_m / den,
    }
}

/// Commutator sum-rule residuals of a numerically evaluated Υ.
pub fn commutator_residuals(sm: &ScatteringMatrix, params: &DeviceParams, _drive: &DriveConfig) -> [f64; 2] {
    OutputCoefficients::from_scattering(sm, params.eta(Mode::Microwave), params.eta(Mode::Optical))
        .commutator_residuals(params.eta(Mode::Microwave), params.eta(Mode::Optical))
}
