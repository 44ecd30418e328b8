//! Spin density matrix of the ZZ pair from a Higgs decay.
//!
//! With `J_z = 0` along the decay axis only the basis states
//! `|1,−1⟩, |0,0⟩, |−1,1⟩` survive, so ρ is a 3×3 block (entries `a_ij`)
//! inside the 9×9 two-qutrit space. Every off-diagonal `a_ij` is an anchor,
//! so any one of them being non-zero certifies both entanglement and a CHSH
//! violation.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::chsh::{f_max_closed_form, AnchorEntry, ChshCertificate};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Complex, ZERO};
use crate::structure::{AdditiveStructure, DensityMatrix};
use crate::tolerance::Tolerances;

/// Flat indices of `|1,−1⟩`, `|0,0⟩`, `|−1,1⟩` in the `J_z` basis
/// `{|1⟩, |0⟩, |−1⟩}` for each boson.
pub const SHELL: [usize; 3] = [2, 4, 6];

pub fn zz_structure() -> AdditiveStructure {
    AdditiveStructure::new(vec![1.0, 0.0, -1.0], vec![1.0, 0.0, -1.0], 0.0)
        .expect("J_z = 0 has on-shell pairs")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HiggsZZParams {
    pub a11: f64,
    pub a22: f64,
    pub a33: f64,
    pub a12: Complex,
    pub a13: Complex,
    pub a23: Complex,
}

impl HiggsZZParams {
    /// Parameters implied by parity conservation from the two measured
    /// off-diagonal entries: `a11 = a33 = a13`, `a22 = 1 − 2a13`, `a23 = a12`.
    pub fn with_parity(a12: Complex, a13: f64) -> Self {
        Self {
            a11: a13,
            a22: 1.0 - 2.0 * a13,
            a33: a13,
            a12,
            a13: Complex::new(a13, 0.0),
            a23: a12,
        }
    }

    pub fn matrix(&self) -> CMatrix {
        let diag = [self.a11, self.a22, self.a33];
        let upper = [[ZERO, self.a12, self.a13], [ZERO, ZERO, self.a23]];
        CMatrix::from_fn(9, |i, j| {
            let (Some(r), Some(c)) = (
                SHELL.iter().position(|&k| k == i),
                SHELL.iter().position(|&k| k == j),
            ) else {
                return ZERO;
            };
            match r.cmp(&c) {
                std::cmp::Ordering::Equal => Complex::new(diag[r], 0.0),
                std::cmp::Ordering::Less => upper[r][c],
                std::cmp::Ordering::Greater => upper[c][r].conj(),
            }
        })
    }

    /// The anchor carried by `a12`, i.e. `ρ_{(1,−1)(0,0)}`.
    pub fn anchor_12(&self) -> AnchorEntry {
        AnchorEntry {
            m0: 0,
            p0: 2,
            n0: 1,
            q0: 1,
            value: self.a12,
        }
    }

    /// The anchor carried by `a13`, i.e. `ρ_{(1,−1)(−1,1)}`.
    pub fn anchor_13(&self) -> AnchorEntry {
        AnchorEntry {
            m0: 0,
            p0: 2,
            n0: 2,
            q0: 0,
            value: self.a13,
        }
    }
}

pub fn rho_from_params(
    p: &HiggsZZParams,
    tol: &Tolerances,
) -> Result<(DensityMatrix, AdditiveStructure)> {
    let values = [
        p.a11, p.a22, p.a33, p.a12.re, p.a12.im, p.a13.re, p.a13.im, p.a23.re, p.a23.im,
    ];
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(
            "density matrix entries must be finite".into(),
        ));
    }
    let rho = DensityMatrix::with_tolerances(p.matrix(), tol)?;
    Ok((rho, zz_structure()))
}

/// The three expansion coefficients that fix the `a_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HiggsCoefficients {
    pub a1_20: f64,
    pub c_21_2m1: f64,
    pub c_22_2m2: f64,
    pub parity_enforced: bool,
}

impl HiggsCoefficients {
    /// Parity fixes `C_{2,2,2,−2} = A¹_{2,0}/√2 + 1`.
    pub fn with_parity(a1_20: f64, c_21_2m1: f64) -> Self {
        Self {
            a1_20,
            c_21_2m1,
            c_22_2m2: a1_20 / SQRT_2 + 1.0,
            parity_enforced: true,
        }
    }
}

pub fn params_from_coefficients(c: &HiggsCoefficients, tol: &Tolerances) -> Result<HiggsZZParams> {
    if c.parity_enforced && (c.c_22_2m2 - (c.a1_20 / SQRT_2 + 1.0)).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "C_22_2m2 = {} breaks the parity relation",
            c.c_22_2m2
        )));
    }
    let a11 = (c.a1_20 / SQRT_2 + 1.0) / 3.0;
    let a12 = Complex::new(c.c_21_2m1 / 3.0, 0.0);
    let p = HiggsZZParams {
        a11,
        a22: 1.0 - 2.0 * a11,
        a33: a11,
        a12,
        a13: Complex::new(c.c_22_2m2 / 3.0, 0.0),
        a23: a12,
    };
    rho_from_params(&p, tol)?;
    Ok(p)
}

fn chsh_from_entry(anchor_abs: f64, oz: f64) -> f64 {
    2.0 * (1.0 + (4.0 * anchor_abs * anchor_abs + oz * oz).sqrt() - oz)
}

/// CHSH maximum on the `a12` anchor (equal to the `a23` one when
/// `a12 = a23`).
pub fn f12(p: &HiggsZZParams) -> f64 {
    chsh_from_entry(p.a12.norm(), p.a11 + p.a22)
}

pub fn f23(p: &HiggsZZParams) -> f64 {
    chsh_from_entry(p.a23.norm(), p.a22 + p.a33)
}

pub fn f13(p: &HiggsZZParams) -> f64 {
    chsh_from_entry(p.a13.norm(), p.a11 + p.a33)
}

/// `F₁₂` after parity and the coefficient relations are imposed.
pub fn f12_parity(a12_abs: f64, a13_abs: f64) -> f64 {
    2.0 * ((4.0 * a12_abs * a12_abs + (1.0 - a13_abs).powi(2)).sqrt() + a13_abs)
}

/// `F₁₃ = 2 + 4|a13|(√2 − 1)` after parity.
pub fn f13_parity(a13_abs: f64) -> f64 {
    2.0 + 4.0 * a13_abs * (SQRT_2 - 1.0)
}

/// Certificates on the `a12` and `a13` anchors through the general
/// construction.
pub fn certificates(
    p: &HiggsZZParams,
    tol: &Tolerances,
) -> Result<(ChshCertificate, ChshCertificate)> {
    let (rho, s) = rho_from_params(p, tol)?;
    Ok((
        f_max_closed_form(&rho, &s, &p.anchor_12(), tol)?,
        f_max_closed_form(&rho, &s, &p.anchor_13(), tol)?,
    ))
}

/// Angles for the `a12` anchor as printed alongside the H→ZZ result:
/// `θ = arccos((a11+a22)/√(4|a12|² + (a11+a22)²))`,
/// `φ = sgn(ℑ a12) · arccos(ℜ a12 / (2|a12|))`.
/// Kept for comparison only; `ChshCertificate` angles come from aligning
/// `b₁` with the O-expectation vector.
pub fn printed_optimal_angles(p: &HiggsZZParams) -> (f64, f64) {
    let oz = p.a11 + p.a22;
    let a = p.a12;
    let theta = (oz / (4.0 * a.norm_sqr() + oz * oz).sqrt()).acos();
    let sgn = if a.im > 0.0 {
        1.0
    } else if a.im < 0.0 {
        -1.0
    } else {
        0.0
    };
    (theta, sgn * (a.re / (2.0 * a.norm())).acos())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub central: f64,
    pub sigma: f64,
}

impl Measurement {
    pub const fn new(central: f64, sigma: f64) -> Self {
        Self { central, sigma }
    }
}

/// Number of standard deviations separating the central value from zero.
pub fn significance(m: &Measurement) -> Result<f64> {
    if m.sigma.is_nan() || m.sigma <= 0.0 {
        return Err(Error::InvalidSigma { sigma: m.sigma });
    }
    Ok(m.central.abs() / m.sigma)
}

pub const TABLES_VERSION: &str = "zz-tables-v1";

/// Half-width of the rounding interval of a 2-decimal input.
pub const INPUT_ROUNDING: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Luminosity {
    #[serde(rename = "300 fb^-1")]
    Fb300,
    #[serde(rename = "3 ab^-1")]
    Ab3,
}

impl Luminosity {
    pub fn label(&self) -> &'static str {
        match self {
            Luminosity::Fb300 => "300 fb^-1",
            Luminosity::Ab3 => "3 ab^-1",
        }
    }
}

/// Values as printed: F to 2 decimals, significances to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrintedRow {
    pub f12: f64,
    pub f12_sigma: f64,
    pub f13: f64,
    pub f13_sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableColumn {
    pub luminosity: Luminosity,
    pub cut_gev: u32,
    pub events: u32,
    pub a12: Measurement,
    pub a13: Measurement,
    pub printed: PrintedRow,
}

const fn column(
    luminosity: Luminosity,
    cut_gev: u32,
    events: u32,
    a12: (f64, f64),
    a13: (f64, f64),
    printed: [f64; 4],
) -> TableColumn {
    TableColumn {
        luminosity,
        cut_gev,
        events,
        a12: Measurement::new(a12.0, a12.1),
        a13: Measurement::new(a13.0, a13.1),
        printed: PrintedRow {
            f12: printed[0],
            f12_sigma: printed[1],
            f13: printed[2],
            f13_sigma: printed[3],
        },
    }
}

/// Pseudo-experiment results for 300 fb⁻¹ and 3 ab⁻¹ with four cuts each.
pub const TABLE_COLUMNS: [TableColumn; 8] = [
    column(
        Luminosity::Fb300,
        0,
        450,
        (-0.33, 0.10),
        (0.20, 0.12),
        [2.47, 3.2, 2.33, 1.7],
    ),
    column(
        Luminosity::Fb300,
        10,
        418,
        (-0.32, 0.11),
        (0.21, 0.13),
        [2.46, 2.9, 2.35, 1.6],
    ),
    column(
        Luminosity::Fb300,
        20,
        312,
        (-0.35, 0.13),
        (0.25, 0.14),
        [2.55, 2.7, 2.41, 1.8],
    ),
    column(
        Luminosity::Fb300,
        30,
        129,
        (-0.35, 0.20),
        (0.27, 0.21),
        [2.57, 1.7, 2.45, 1.3],
    ),
    column(
        Luminosity::Ab3,
        0,
        4500,
        (-0.32, 0.03),
        (0.20, 0.04),
        [2.44, 9.5, 2.33, 5.0],
    ),
    column(
        Luminosity::Ab3,
        10,
        4180,
        (-0.33, 0.03),
        (0.21, 0.04),
        [2.49, 10.0, 2.35, 5.3],
    ),
    column(
        Luminosity::Ab3,
        20,
        3120,
        (-0.35, 0.04),
        (0.25, 0.05),
        [2.54, 8.7, 2.41, 5.3],
    ),
    column(
        Luminosity::Ab3,
        30,
        1290,
        (-0.35, 0.06),
        (0.28, 0.07),
        [2.56, 5.5, 2.46, 4.2],
    ),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    fn hull(values: impl IntoIterator<Item = f64>) -> Self {
        values.into_iter().fold(
            Self {
                lo: f64::INFINITY,
                hi: f64::NEG_INFINITY,
            },
            |acc, v| Self {
                lo: acc.lo.min(v),
                hi: acc.hi.max(v),
            },
        )
    }

    /// Whether `[printed − half, printed + half]` meets this interval.
    pub fn admits(&self, printed: f64, half: f64) -> bool {
        self.lo <= printed + half && self.hi >= printed - half
    }
}

/// One reproduced quantity: computed value, the range reachable from
/// rounded inputs, and the verdict against the printed number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reproduced {
    pub computed: f64,
    pub printed: f64,
    pub interval: Interval,
    pub pass: bool,
    /// Computed value rounded to the printed precision differs from the
    /// printed value, although the rounding interval admits it.
    pub rounding_note: bool,
}

impl Reproduced {
    fn new(computed: f64, printed: f64, interval: Interval, decimals: i32) -> Self {
        let scale = 10f64.powi(decimals);
        let half = 0.5 / scale;
        let rounded = (computed * scale).round() / scale;
        let pass = interval.admits(printed, half);
        Self {
            computed,
            printed,
            interval,
            pass,
            rounding_note: pass && (rounded - printed).abs() > half / 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnReport {
    pub column: TableColumn,
    pub f12: Reproduced,
    pub f12_sigma: Reproduced,
    pub f13: Reproduced,
    pub f13_sigma: Reproduced,
}

impl ColumnReport {
    pub fn all_pass(&self) -> bool {
        [self.f12, self.f12_sigma, self.f13, self.f13_sigma]
            .iter()
            .all(|r| r.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablesReport {
    pub version: String,
    pub columns: Vec<ColumnReport>,
    pub all_pass: bool,
}

fn corners(x: f64) -> [f64; 2] {
    [x - INPUT_ROUNDING, x + INPUT_ROUNDING]
}

/// Every quantity below is monotone in each input over the rounding box,
/// so its range is spanned by the box corners.
pub fn reproduce_column(col: &TableColumn) -> Result<ColumnReport> {
    let a12 = col.a12.central.abs();
    let a13 = col.a13.central.abs();

    let f12_range = Interval::hull(
        corners(a12)
            .into_iter()
            .flat_map(|x| corners(a13).map(move |y| f12_parity(x, y))),
    );
    let f13_range = Interval::hull(corners(a13).map(f13_parity));
    let sigma_range = |m: &Measurement| {
        let c = m.central.abs();
        Interval::hull(
            corners(c)
                .into_iter()
                .flat_map(|x| corners(m.sigma).map(move |s| x / s)),
        )
    };

    Ok(ColumnReport {
        column: *col,
        f12: Reproduced::new(f12_parity(a12, a13), col.printed.f12, f12_range, 2),
        f12_sigma: Reproduced::new(
            significance(&col.a12)?,
            col.printed.f12_sigma,
            sigma_range(&col.a12),
            1,
        ),
        f13: Reproduced::new(f13_parity(a13), col.printed.f13, f13_range, 2),
        f13_sigma: Reproduced::new(
            significance(&col.a13)?,
            col.printed.f13_sigma,
            sigma_range(&col.a13),
            1,
        ),
    })
}

pub fn reproduce_tables() -> TablesReport {
    let columns: Vec<ColumnReport> = TABLE_COLUMNS
        .iter()
        .map(|c| reproduce_column(c).expect("embedded uncertainties are positive"))
        .collect();
    let all_pass = columns.iter().all(ColumnReport::all_pass);
    TablesReport {
        version: TABLES_VERSION.to_string(),
        columns,
        all_pass,
    }
}
