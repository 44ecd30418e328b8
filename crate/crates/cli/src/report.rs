use std::fmt::Write;

use addobs_core::chsh::{ChshCertificate, GridMax};
use addobs_core::entanglement::{BlockCheck, EntanglementVerdict, SectorKind, Witness};
use addobs_core::higgs::{ColumnReport, Reproduced, TablesReport};
use addobs_core::linalg::Complex;
use addobs_core::structure::TextureViolation;
use serde::{Deserialize, Serialize};

pub fn tool_version() -> String {
    format!("addobs {}", env!("CARGO_PKG_VERSION"))
}

/// Fixed 12-decimal rendering used for CHSH values.
pub fn fixed12(x: f64) -> String {
    format!("{x:.12}")
}

fn complex_text(z: ComplexOut) -> String {
    if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexOut {
    pub re: f64,
    pub im: f64,
}

impl From<Complex> for ComplexOut {
    fn from(z: Complex) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ViolationOut {
    pub row: usize,
    pub col: usize,
    pub value: ComplexOut,
    pub magnitude: f64,
    pub row_total: f64,
    pub col_total: f64,
}

impl From<&TextureViolation> for ViolationOut {
    fn from(v: &TextureViolation) -> Self {
        Self {
            row: v.row,
            col: v.col,
            value: v.value.into(),
            magnitude: v.value.norm(),
            row_total: v.row_total,
            col_total: v.col_total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum WitnessOut {
    #[serde(rename_all = "camelCase")]
    Crossed {
        row: usize,
        col: usize,
        alice: [usize; 2],
        bob: [usize; 2],
        value: ComplexOut,
    },
    #[serde(rename_all = "camelCase")]
    Block {
        alice_value: f64,
        bob_value: f64,
        min_eigenvalue: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlockCheckOut {
    pub alice_value: f64,
    pub bob_value: f64,
    pub deg_alice: usize,
    pub deg_bob: usize,
    pub kind: String,
    pub min_eigenvalue: Option<f64>,
}

fn kind_name(k: SectorKind) -> &'static str {
    match k {
        SectorKind::Type1 => "TYPE1",
        SectorKind::Type2 => "TYPE2",
        SectorKind::Large => "LARGE",
    }
}

impl From<&BlockCheck> for BlockCheckOut {
    fn from(b: &BlockCheck) -> Self {
        Self {
            alice_value: b.alice_value,
            bob_value: b.bob_value,
            deg_alice: b.deg_alice,
            deg_bob: b.deg_bob,
            kind: kind_name(b.kind).to_string(),
            min_eigenvalue: b.min_eigenvalue,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerdictOut {
    pub status: String,
    pub witness: Option<WitnessOut>,
    pub block_checks: Vec<BlockCheckOut>,
}

impl From<&EntanglementVerdict> for VerdictOut {
    fn from(v: &EntanglementVerdict) -> Self {
        let witness = v.witness.as_ref().map(|w| match w {
            Witness::Crossed(c) => WitnessOut::Crossed {
                row: c.row,
                col: c.col,
                alice: [c.alice.0, c.alice.1],
                bob: [c.bob.0, c.bob.1],
                value: c.value.into(),
            },
            Witness::Block {
                alice_value,
                bob_value,
                min_eigenvalue,
            } => WitnessOut::Block {
                alice_value: *alice_value,
                bob_value: *bob_value,
                min_eigenvalue: *min_eigenvalue,
            },
        });
        Self {
            status: v.status.as_str().to_string(),
            witness,
            block_checks: v.block_checks.iter().map(BlockCheckOut::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnchorOut {
    pub m0: usize,
    pub n0: usize,
    pub p0: usize,
    pub q0: usize,
    pub row: usize,
    pub col: usize,
    pub value: ComplexOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationsOut {
    pub o0: f64,
    pub ox: f64,
    pub oy: f64,
    pub oz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CertificateOut {
    pub anchor: AnchorOut,
    pub anchors_found: usize,
    pub f_max: f64,
    pub f_max_display: String,
    pub violates_chsh: bool,
    pub theta_opt: f64,
    pub phi_opt: f64,
    pub expectations: ExpectationsOut,
}

impl CertificateOut {
    pub fn new(c: &ChshCertificate, d_b: usize, anchors_found: usize) -> Self {
        let a = &c.anchor;
        let e = c.expectations;
        Self {
            anchor: AnchorOut {
                m0: a.m0,
                n0: a.n0,
                p0: a.p0,
                q0: a.q0,
                row: a.m0 * d_b + a.p0,
                col: a.n0 * d_b + a.q0,
                value: a.value.into(),
            },
            anchors_found,
            f_max: c.f_max,
            f_max_display: fixed12(c.f_max),
            violates_chsh: c.violates(),
            theta_opt: c.theta_opt,
            phi_opt: c.phi_opt,
            expectations: ExpectationsOut {
                o0: e.o0,
                ox: e.ox,
                oy: e.oy,
                oz: e.oz,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GridOut {
    pub n_theta: usize,
    pub n_phi: usize,
    pub f_max: f64,
    pub theta: f64,
    pub phi: f64,
    pub evaluations: usize,
    /// Closed form minus grid maximum.
    pub gap: f64,
}

impl GridOut {
    pub fn new(g: &GridMax, n_theta: usize, n_phi: usize, closed: f64) -> Self {
        Self {
            n_theta,
            n_phi,
            f_max: g.f_max,
            theta: g.theta,
            phi: g.phi,
            evaluations: g.evaluations,
            gap: closed - g.f_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Purities {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidateReport {
    pub texture_violations: Vec<ViolationOut>,
    pub valid: bool,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CertifyReport {
    pub texture_violations: Vec<ViolationOut>,
    pub entanglement_verdict: VerdictOut,
    pub chsh_certificate: Option<CertificateOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_check: Option<GridOut>,
    pub min_pt_eigenvalue: f64,
    pub reduced_purities: Purities,
    pub tool_version: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnglesOut {
    pub theta: f64,
    pub phi: f64,
    /// φ from `sgn(ℑ a12)·arccos(ℜ a12 / 2|a12|)`, reported for comparison.
    pub phi_printed_formula: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HiggsParamsOut {
    pub a11: f64,
    pub a22: f64,
    pub a33: f64,
    pub a12: f64,
    pub a13: f64,
    pub a23: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HiggsReport {
    pub params: HiggsParamsOut,
    pub f12: f64,
    pub f12_display: String,
    pub f13: f64,
    pub f13_display: String,
    pub significance12: Option<f64>,
    pub significance13: Option<f64>,
    pub angles12: Option<AnglesOut>,
    pub tool_version: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReproducedOut {
    pub computed: f64,
    pub printed: f64,
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
    pub rounding_note: bool,
}

impl From<Reproduced> for ReproducedOut {
    fn from(r: Reproduced) -> Self {
        Self {
            computed: r.computed,
            printed: r.printed,
            lo: r.interval.lo,
            hi: r.interval.hi,
            pass: r.pass,
            rounding_note: r.rounding_note,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOut {
    pub central: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ColumnOut {
    pub luminosity: String,
    pub cut_gev: u32,
    pub events: u32,
    pub a12: MeasurementOut,
    pub a13: MeasurementOut,
    pub f12: ReproducedOut,
    pub f12_significance: ReproducedOut,
    pub f13: ReproducedOut,
    pub f13_significance: ReproducedOut,
}

impl From<&ColumnReport> for ColumnOut {
    fn from(c: &ColumnReport) -> Self {
        let col = &c.column;
        Self {
            luminosity: col.luminosity.label().to_string(),
            cut_gev: col.cut_gev,
            events: col.events,
            a12: MeasurementOut {
                central: col.a12.central,
                sigma: col.a12.sigma,
            },
            a13: MeasurementOut {
                central: col.a13.central,
                sigma: col.a13.sigma,
            },
            f12: c.f12.into(),
            f12_significance: c.f12_sigma.into(),
            f13: c.f13.into(),
            f13_significance: c.f13_sigma.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TablesOut {
    pub dataset_version: String,
    pub columns: Vec<ColumnOut>,
    pub f_values: usize,
    pub f_values_passed: usize,
    pub all_pass: bool,
    pub tool_version: String,
}

impl From<&TablesReport> for TablesOut {
    fn from(t: &TablesReport) -> Self {
        let columns: Vec<ColumnOut> = t.columns.iter().map(ColumnOut::from).collect();
        let f: Vec<bool> = columns
            .iter()
            .flat_map(|c| [c.f12.pass, c.f13.pass])
            .collect();
        Self {
            dataset_version: t.version.clone(),
            f_values: f.len(),
            f_values_passed: f.iter().filter(|&&p| p).count(),
            columns,
            all_pass: t.all_pass,
            tool_version: tool_version(),
        }
    }
}

fn violations_text(out: &mut String, violations: &[ViolationOut]) {
    if violations.is_empty() {
        writeln!(out, "texture: valid").unwrap();
        return;
    }
    writeln!(out, "texture: {} violation(s)", violations.len()).unwrap();
    for v in violations {
        writeln!(
            out,
            "  rho[{}, {}] = {} (|value| {:e}, row total {}, column total {})",
            v.row,
            v.col,
            complex_text(v.value),
            v.magnitude,
            v.row_total,
            v.col_total
        )
        .unwrap();
    }
}

impl ValidateReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        violations_text(&mut out, &self.texture_violations);
        writeln!(out, "{}", self.tool_version).unwrap();
        out
    }
}

impl CertifyReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        violations_text(&mut out, &self.texture_violations);
        let v = &self.entanglement_verdict;
        writeln!(out, "entanglement: {}", v.status).unwrap();
        match &v.witness {
            Some(WitnessOut::Crossed { row, col, value, .. }) => {
                writeln!(out, "  witness: crossed entry rho[{row}, {col}] = {}", complex_text(*value)).unwrap()
            }
            Some(WitnessOut::Block {
                alice_value,
                bob_value,
                min_eigenvalue,
            }) => writeln!(
                out,
                "  witness: sector ({alice_value}, {bob_value}) block with PT eigenvalue {min_eigenvalue}"
            )
            .unwrap(),
            None => {}
        }
        for b in &v.block_checks {
            let eig = b
                .min_eigenvalue
                .map_or("skipped (zero weight)".to_string(), |e| e.to_string());
            writeln!(
                out,
                "  block ({}, {}) {}x{} {}: min PT eigenvalue {eig}",
                b.alice_value, b.bob_value, b.deg_alice, b.deg_bob, b.kind
            )
            .unwrap();
        }
        writeln!(out, "min PT eigenvalue: {}", self.min_pt_eigenvalue).unwrap();
        writeln!(
            out,
            "reduced purities: A {}, B {}",
            self.reduced_purities.a, self.reduced_purities.b
        )
        .unwrap();
        match &self.chsh_certificate {
            Some(c) => {
                writeln!(
                    out,
                    "CHSH: fMax {} ({}), anchor rho[{}, {}] = {}",
                    c.f_max_display,
                    if c.violates_chsh {
                        "violates F <= 2"
                    } else {
                        "no violation"
                    },
                    c.anchor.row,
                    c.anchor.col,
                    complex_text(c.anchor.value)
                )
                .unwrap();
                writeln!(out, "  theta {}, phi {}", c.theta_opt, c.phi_opt).unwrap();
            }
            None => writeln!(out, "CHSH: no anchor entry").unwrap(),
        }
        if let Some(g) = &self.grid_check {
            writeln!(
                out,
                "grid check {}x{}: fMax {}, closed form minus grid {:e}",
                g.n_theta,
                g.n_phi,
                fixed12(g.f_max),
                g.gap
            )
            .unwrap();
        }
        writeln!(out, "{}", self.tool_version).unwrap();
        out
    }
}

impl HiggsReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        let p = &self.params;
        writeln!(
            out,
            "a11 {}, a22 {}, a33 {}, a12 {}, a13 {}, a23 {}",
            p.a11, p.a22, p.a33, p.a12, p.a13, p.a23
        )
        .unwrap();
        let sig = |s: Option<f64>| s.map_or(String::new(), |s| format!(" ({s:.1} sigma)"));
        writeln!(
            out,
            "F12 = {}{}",
            self.f12_display,
            sig(self.significance12)
        )
        .unwrap();
        writeln!(
            out,
            "F13 = {}{}",
            self.f13_display,
            sig(self.significance13)
        )
        .unwrap();
        if let Some(a) = &self.angles12 {
            writeln!(
                out,
                "a12 anchor angles: theta {}, phi {} (printed formula phi {})",
                a.theta, a.phi, a.phi_printed_formula
            )
            .unwrap();
        }
        writeln!(out, "{}", self.tool_version).unwrap();
        out
    }
}

impl TablesOut {
    pub fn text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "dataset {}", self.dataset_version).unwrap();
        writeln!(
            out,
            "{:<10} {:>4} {:>5}  {:>12} {:>12}  {:>16} {:>16} {:>16} {:>16}",
            "lumi", "cut", "N", "a12", "a13", "F12", "sigma", "F13", "sigma"
        )
        .unwrap();
        let cell = |r: &ReproducedOut, d: usize| {
            format!(
                "{:.d$}/{:.d$} {}",
                r.computed,
                r.printed,
                if r.pass { "PASS" } else { "FAIL" }
            )
        };
        for c in &self.columns {
            writeln!(
                out,
                "{:<10} {:>4} {:>5}  {:>12} {:>12}  {:>16} {:>16} {:>16} {:>16}",
                c.luminosity,
                c.cut_gev,
                c.events,
                format!("{:.2}+-{:.2}", c.a12.central, c.a12.sigma),
                format!("{:.2}+-{:.2}", c.a13.central, c.a13.sigma),
                cell(&c.f12, 2),
                cell(&c.f12_significance, 1),
                cell(&c.f13, 2),
                cell(&c.f13_significance, 1),
            )
            .unwrap();
        }
        writeln!(
            out,
            "{}/{} F values PASS; all checks {}",
            self.f_values_passed,
            self.f_values,
            if self.all_pass { "PASS" } else { "FAIL" }
        )
        .unwrap();
        writeln!(out, "{}", self.tool_version).unwrap();
        out
    }
}
