//! Brute-force maximization of the CHSH expectation over Bob's angles.
//!
//! The search never touches the O-operator decomposition. It uses only that
//! `Tr(ρ A ⊗ B)` is affine in Bob's direction vector `b` when
//! `B = b·σ ⊕ 𝟙`, so eight traces against the real settings fix `F(θ, φ)`
//! on the whole sphere.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{build_observables, reorder_basis, AnchorEntry};
use crate::error::{Error, Result};
use crate::linalg::{direct_sum, kron, pauli, CMatrix, Hermitian};
use crate::par;
use crate::structure::{AdditiveStructure, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n_theta: usize,
    pub n_phi: usize,
    /// Zoom passes around the best cell, each 10× finer.
    pub refine_levels: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n_theta: 1024,
            n_phi: 2048,
            refine_levels: 3,
        }
    }
}

impl GridConfig {
    pub fn coarse(n_theta: usize, n_phi: usize) -> Self {
        Self {
            n_theta,
            n_phi,
            refine_levels: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMax {
    pub f_max: f64,
    pub theta: f64,
    pub phi: f64,
    pub evaluations: usize,
}

/// `Tr(ρ A⊗(σ_k ⊕ 0))` for k = x, y, z and `Tr(ρ A⊗(0 ⊕ 𝟙))`.
#[derive(Debug, Clone, Copy)]
struct AffineTrace {
    linear: [f64; 3],
    constant: f64,
}

impl AffineTrace {
    fn new(rho: &CMatrix, alice: &Hermitian, d_b: usize) -> Result<Self> {
        let pad = |m: CMatrix| direct_sum(&m, &CMatrix::zeros(d_b - 2));
        let ev = |bob: CMatrix| -> Result<f64> {
            Ok(rho.trace_product(&kron(alice.matrix(), &bob))?.re)
        };
        Ok(Self {
            linear: [
                ev(pad(pauli::x()))?,
                ev(pad(pauli::y()))?,
                ev(pad(pauli::z()))?,
            ],
            constant: ev(direct_sum(&CMatrix::zeros(2), &CMatrix::identity(d_b - 2)))?,
        })
    }

    fn at(&self, b: [f64; 3]) -> f64 {
        self.constant + self.linear[0] * b[0] + self.linear[1] * b[1] + self.linear[2] * b[2]
    }
}

struct Objective {
    a1: AffineTrace,
    a2: AffineTrace,
}

impl Objective {
    fn eval(&self, st: f64, ct: f64, sp: f64, cp: f64) -> f64 {
        let b1 = [st * cp, st * sp, ct];
        let b2 = [-st * cp, -st * sp, ct];
        self.a1.at(b1) + self.a1.at(b2) + self.a2.at(b1) - self.a2.at(b2)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn search(obj: &Objective, thetas: &[f64], phis: &[f64]) -> (usize, usize, f64) {
    let ts: Vec<(f64, f64)> = thetas.iter().map(|t| t.sin_cos()).collect();
    let ps: Vec<(f64, f64)> = phis.iter().map(|p| p.sin_cos()).collect();
    let np = ps.len();
    let (k, best) = par::argmax(ts.len() * np, |k| {
        let (st, ct) = ts[k / np];
        let (sp, cp) = ps[k % np];
        obj.eval(st, ct, sp, cp)
    })
    .expect("grid is non-empty");
    (k / np, k % np, best)
}

/// Maximum of the CHSH expectation on a uniform grid
/// `θ ∈ [0, π] × φ ∈ [−π, π]` (endpoints included), followed by optional
/// zoom passes. `rho` must already be in the reordered basis.
pub fn grid_max(rho: &CMatrix, d_a: usize, d_b: usize, cfg: &GridConfig) -> Result<GridMax> {
    if cfg.n_theta < 2 || cfg.n_phi < 2 {
        return Err(Error::InvalidInput(
            "grid needs at least 2 points per angle".into(),
        ));
    }
    if d_a < 2 || d_b < 2 || rho.dim() != d_a * d_b {
        return Err(Error::DimensionMismatch {
            expected: d_a * d_b,
            found: rho.dim(),
        });
    }
    let settings = build_observables(0.0, 0.0, d_a, d_b);
    let obj = Objective {
        a1: AffineTrace::new(rho, &settings.a1, d_b)?,
        a2: AffineTrace::new(rho, &settings.a2, d_b)?,
    };

    let thetas = linspace(0.0, PI, cfg.n_theta);
    let phis = linspace(-PI, PI, cfg.n_phi);
    let (i, j, mut best) = search(&obj, &thetas, &phis);
    let (mut theta, mut phi) = (thetas[i], phis[j]);
    let mut evaluations = thetas.len() * phis.len();

    const ZOOM: usize = 10;
    let mut h_theta = PI / (cfg.n_theta - 1) as f64;
    let mut h_phi = 2.0 * PI / (cfg.n_phi - 1) as f64;
    for _ in 0..cfg.refine_levels {
        let thetas: Vec<f64> = linspace(theta - h_theta, theta + h_theta, 2 * ZOOM + 1)
            .into_iter()
            .map(|t| t.clamp(0.0, PI))
            .collect();
        let phis = linspace(phi - h_phi, phi + h_phi, 2 * ZOOM + 1);
        let (i, j, value) = search(&obj, &thetas, &phis);
        evaluations += thetas.len() * phis.len();
        if value > best {
            best = value;
            theta = thetas[i];
            phi = phis[j];
        }
        h_theta /= ZOOM as f64;
        h_phi /= ZOOM as f64;
    }

    Ok(GridMax {
        f_max: best,
        theta,
        phi,
        evaluations,
    })
}

/// Grid maximum for the observable family built on `anchor`.
pub fn grid_verify(
    rho: &DensityMatrix,
    s: &AdditiveStructure,
    anchor: &AnchorEntry,
    cfg: &GridConfig,
) -> Result<GridMax> {
    let reordered = reorder_basis(anchor, s).apply(rho.matrix());
    grid_max(&reordered, s.d_a(), s.d_b(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::{f_max_closed_form, f_value, find_anchor_entries};
    use crate::structure::tests::{bell_psi_plus, c, qubit_pair};
    use crate::tolerance::Tolerances;
    use std::f64::consts::SQRT_2;

    #[test]
    fn objective_matches_operator_trace() {
        let s = qubit_pair(0.0);
        let anchor = AnchorEntry {
            m0: 0,
            p0: 1,
            n0: 1,
            q0: 0,
            value: c(0.5),
        };
        let re = reorder_basis(&anchor, &s).apply(bell_psi_plus().matrix());
        let settings = build_observables(0.0, 0.0, 2, 2);
        let obj = Objective {
            a1: AffineTrace::new(&re, &settings.a1, 2).unwrap(),
            a2: AffineTrace::new(&re, &settings.a2, 2).unwrap(),
        };
        for &(t, p) in &[(0.2, 0.1), (1.3, -2.0), (2.9, 3.0)] {
            let direct = f_value(&re, &build_observables(t, p, 2, 2)).unwrap();
            let (st, ct) = f64::sin_cos(t);
            let (sp, cp) = f64::sin_cos(p);
            assert!((obj.eval(st, ct, sp, cp) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn bell_grid_reaches_tsirelson() {
        let s = qubit_pair(0.0);
        let rho = bell_psi_plus();
        let anchor = find_anchor_entries(&rho, &s, &Tolerances::default())
            .unwrap()
            .remove(0);
        let g = grid_verify(&rho, &s, &anchor, &GridConfig::coarse(2000, 2000)).unwrap();
        assert!((g.f_max - 2.0 * SQRT_2).abs() < 5e-6, "{}", g.f_max);
        assert!(g.f_max <= 2.0 * SQRT_2 + 1e-12);

        let refined = grid_verify(&rho, &s, &anchor, &GridConfig::default()).unwrap();
        let closed = f_max_closed_form(&rho, &s, &anchor, &Tolerances::default()).unwrap();
        assert!((refined.f_max - closed.f_max).abs() < 1e-9);
    }

    #[test]
    fn diagonal_state_stays_classical() {
        let rho = DensityMatrix::new(CMatrix::diagonal(&[0.0, 0.3, 0.7, 0.0])).unwrap();
        let g = grid_max(rho.matrix(), 2, 2, &GridConfig::coarse(64, 64)).unwrap();
        assert!(g.f_max <= 2.0 + 1e-12);
    }

    #[test]
    fn rejects_degenerate_grid() {
        let rho = bell_psi_plus();
        assert!(grid_max(rho.matrix(), 2, 2, &GridConfig::coarse(1, 10)).is_err());
    }
}
