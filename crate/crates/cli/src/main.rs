use std::path::PathBuf;
use std::process::ExitCode;

use addobs_core::chsh::{certify_nonlocality, find_anchor_entries, grid_verify, GridConfig};
use addobs_core::entanglement::{certify, reduced_purity, Party};
use addobs_core::higgs::{
    certificates, f12, f13, printed_optimal_angles, reproduce_tables, rho_from_params,
    significance, HiggsZZParams, Measurement,
};
use addobs_core::linalg::Complex;
use addobs_core::structure::validate_additivity;
use addobs_core::Tolerances;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use addobs_cli::input::InputDocument;
use addobs_cli::report::{
    fixed12, tool_version, AnglesOut, CertificateOut, CertifyReport, GridOut, HiggsParamsOut,
    HiggsReport, Purities, TablesOut, ValidateReport, VerdictOut, ViolationOut,
};
use addobs_cli::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(
    name = "addobs",
    version,
    about = "Certify entanglement and CHSH nonlocality of states with an additive conserved quantity"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that every non-vanishing entry respects the additive texture.
    Validate {
        path: PathBuf,
        #[arg(long, default_value_t = 1e-12, value_parser = non_negative)]
        zero_tol: f64,
    },
    /// Entanglement verdict, CHSH certificate, PT spectrum and purities.
    Certify {
        path: PathBuf,
        #[arg(long, default_value_t = 1e-12, value_parser = non_negative)]
        zero_tol: f64,
        /// Cross-check the closed form on an NxM angle grid.
        #[arg(long, value_parser = grid_size)]
        grid: Option<(usize, usize)>,
    },
    /// CHSH values for the H -> ZZ state under parity.
    Higgs {
        #[arg(
            long,
            allow_negative_numbers = true,
            required_unless_present = "tables",
            requires = "a13"
        )]
        a12: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "a12")]
        a13: Option<f64>,
        #[arg(long, value_parser = positive, requires = "a12")]
        sigma12: Option<f64>,
        #[arg(long, value_parser = positive, requires = "a13")]
        sigma13: Option<f64>,
        /// Reproduce the embedded pseudo-experiment tables.
        #[arg(long, conflicts_with_all = ["a12", "a13", "sigma12", "sigma13"])]
        tables: bool,
    },
}

fn parse_float(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if !x.is_finite() {
        return Err("must be finite".into());
    }
    Ok(x)
}

fn non_negative(s: &str) -> Result<f64, String> {
    let x = parse_float(s)?;
    if x < 0.0 {
        return Err("must be >= 0".into());
    }
    Ok(x)
}

fn positive(s: &str) -> Result<f64, String> {
    let x = parse_float(s)?;
    if x <= 0.0 {
        return Err("must be > 0".into());
    }
    Ok(x)
}

fn grid_size(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or("expected <nTheta>x<nPhi>")?;
    let n: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let m: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    if n < 2 || m < 2 {
        return Err("both grid sizes must be at least 2".into());
    }
    Ok((n, m))
}

struct Rendered {
    text: String,
    json: String,
}

fn render<T: Serialize>(value: &T, text: String) -> Rendered {
    Rendered {
        text,
        json: serde_json::to_string_pretty(value).expect("reports contain only finite numbers"),
    }
}

/// The report to print and the exit code to return.
type Outcome = Result<(Rendered, u8), Failure>;

fn validate(path: PathBuf, zero_tol: f64) -> Outcome {
    let tol = Tolerances::default().with_zero(zero_tol);
    let loaded = InputDocument::read(&path)?.load(&tol)?;
    let violations = validate_additivity(&loaded.rho, &loaded.structure, &tol)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let report = ValidateReport {
        texture_violations: violations.iter().map(ViolationOut::from).collect(),
        valid: violations.is_empty(),
        tool_version: tool_version(),
    };
    let code = if report.valid { 0 } else { 2 };
    Ok((render(&report, report.text()), code))
}

fn certify_cmd(path: PathBuf, zero_tol: f64, grid: Option<(usize, usize)>) -> Outcome {
    let tol = Tolerances::default().with_zero(zero_tol);
    let loaded = InputDocument::read(&path)?.load(&tol)?;
    let (rho, s) = (&loaded.rho, &loaded.structure);
    let violations =
        validate_additivity(rho, s, &tol).map_err(|e| Failure::Usage(e.to_string()))?;
    if !violations.is_empty() {
        let report = ValidateReport {
            texture_violations: violations.iter().map(ViolationOut::from).collect(),
            valid: false,
            tool_version: tool_version(),
        };
        eprintln!("error: certification requires a valid texture");
        return Ok((render(&report, report.text()), 2));
    }

    let domain = |e: addobs_core::Error| Failure::Domain(e.to_string());
    let verdict = certify(rho, s, &tol).map_err(domain)?;
    let anchors = find_anchor_entries(rho, s, &tol).map_err(domain)?;
    let certificate = certify_nonlocality(rho, s, &tol).map_err(domain)?;
    let grid_check = match (&certificate, grid) {
        (Some(c), Some((n, m))) => {
            let g = grid_verify(rho, s, &c.anchor, &GridConfig::coarse(n, m)).map_err(domain)?;
            Some(GridOut::new(&g, n, m, c.f_max))
        }
        _ => None,
    };
    let report = CertifyReport {
        texture_violations: Vec::new(),
        entanglement_verdict: VerdictOut::from(&verdict),
        chsh_certificate: certificate
            .as_ref()
            .map(|c| CertificateOut::new(c, s.d_b(), anchors.len())),
        grid_check,
        min_pt_eigenvalue: verdict.min_pt_eigenvalue,
        reduced_purities: Purities {
            a: reduced_purity(rho, s, Party::A).map_err(domain)?,
            b: reduced_purity(rho, s, Party::B).map_err(domain)?,
        },
        tool_version: tool_version(),
    };
    Ok((render(&report, report.text()), 0))
}

fn higgs(a12: f64, a13: f64, sigma12: Option<f64>, sigma13: Option<f64>) -> Outcome {
    let tol = Tolerances::default();
    let p = HiggsZZParams::with_parity(Complex::new(a12, 0.0), a13);
    rho_from_params(&p, &tol).map_err(|e| Failure::Domain(e.to_string()))?;

    let sig = |central: f64, sigma: Option<f64>| -> Result<Option<f64>, Failure> {
        sigma
            .map(|s| significance(&Measurement::new(central, s)))
            .transpose()
            .map_err(|e| Failure::Usage(e.to_string()))
    };
    let angles12 = if p.a12.norm() > tol.zero {
        let (c12, _) = certificates(&p, &tol).map_err(|e| Failure::Domain(e.to_string()))?;
        Some(AnglesOut {
            theta: c12.theta_opt,
            phi: c12.phi_opt,
            phi_printed_formula: printed_optimal_angles(&p).1,
        })
    } else {
        None
    };
    let (v12, v13) = (f12(&p), f13(&p));
    let report = HiggsReport {
        params: HiggsParamsOut {
            a11: p.a11,
            a22: p.a22,
            a33: p.a33,
            a12: p.a12.re,
            a13: p.a13.re,
            a23: p.a23.re,
        },
        f12: v12,
        f12_display: fixed12(v12),
        f13: v13,
        f13_display: fixed12(v13),
        significance12: sig(a12, sigma12)?,
        significance13: sig(a13, sigma13)?,
        angles12,
        tool_version: tool_version(),
    };
    Ok((render(&report, report.text()), 0))
}

fn tables() -> Outcome {
    let report = TablesOut::from(&reproduce_tables());
    let code = if report.all_pass { 0 } else { 2 };
    Ok((render(&report, report.text()), code))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Validate { path, zero_tol } => validate(path, zero_tol),
        Command::Certify {
            path,
            zero_tol,
            grid,
        } => certify_cmd(path, zero_tol, grid),
        Command::Higgs { tables: true, .. } => tables(),
        Command::Higgs {
            a12,
            a13,
            sigma12,
            sigma13,
            ..
        } => higgs(
            a12.expect("clap requires --a12"),
            a13.expect("clap requires --a13"),
            sigma12,
            sigma13,
        ),
    };
    match outcome {
        Ok((rendered, code)) => {
            match cli.format {
                Format::Text => print!("{}", rendered.text),
                Format::Json => println!("{}", rendered.json),
            }
            ExitCode::from(code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
