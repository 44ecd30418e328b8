//! CHSH violation built on an anchor entry.
//!
//! An anchor is a crossed entry `ρ_{(m₀p₀)(n₀q₀)}` whose column labels
//! `N₀`, `Q₀` are non-degenerate. After moving `m₀, n₀` (Alice) and
//! `p₀, q₀` (Bob) to the front of each basis, the observables
//! `A_i = a_i·σ ⊕ 𝟙` and `B_j = b_j·σ ⊕ 𝟙` turn the CHSH expectation into
//!
//! ```text
//! F(θ, φ) = 2[⟨O₀⟩ + sinθ cosφ ⟨O_x⟩ + sinθ sinφ ⟨O_y⟩ + cosθ ⟨O_z⟩]
//! ```
//!
//! whose maximum over the angles has a closed form in the anchor modulus
//! and `⟨O_z⟩`.

mod grid;

use serde::{Deserialize, Serialize};

pub use grid::{grid_max, grid_verify, GridConfig, GridMax};

use crate::error::{Error, Result};
use crate::linalg::{direct_sum, kron, pauli, CMatrix, Complex, Hermitian};
use crate::structure::{require_texture, AdditiveStructure, DensityMatrix};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorEntry {
    pub m0: usize,
    pub n0: usize,
    pub p0: usize,
    pub q0: usize,
    pub value: Complex,
}

impl AnchorEntry {
    pub fn row(&self, s: &AdditiveStructure) -> usize {
        s.flat(self.m0, self.p0)
    }

    pub fn col(&self, s: &AdditiveStructure) -> usize {
        s.flat(self.n0, self.q0)
    }
}

fn anchor_conditions(s: &AdditiveStructure, m0: usize, p0: usize, n0: usize, q0: usize) -> bool {
    s.on_shell(m0, p0)
        && s.on_shell(n0, q0)
        && !s.same_label(s.j_a()[m0], s.j_a()[n0])
        && !s.same_label(s.j_b()[p0], s.j_b()[q0])
        && s.alice_degeneracy(n0) == 1
        && s.bob_degeneracy(q0) == 1
}

/// Every entry meeting the anchor conditions, scanning the full matrix in
/// row-major order. An entry whose row labels are the non-degenerate pair
/// shows up through its conjugate.
pub fn find_anchor_entries(
    rho: &DensityMatrix,
    s: &AdditiveStructure,
    tol: &Tolerances,
) -> Result<Vec<AnchorEntry>> {
    require_texture(rho, s, tol)?;
    let n = rho.dim();
    let mut out = Vec::new();
    for row in 0..n {
        let (m0, p0) = s.split(row);
        for col in 0..n {
            if row == col {
                continue;
            }
            let value = rho.entry(row, col);
            if value.norm() <= tol.zero {
                continue;
            }
            let (n0, q0) = s.split(col);
            if anchor_conditions(s, m0, p0, n0, q0) {
                out.push(AnchorEntry {
                    m0,
                    n0,
                    p0,
                    q0,
                    value,
                });
            }
        }
    }
    Ok(out)
}

/// New basis order per party: position `k` holds old index `alice[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisReordering {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

fn front_two(first: usize, second: usize, dim: usize) -> Vec<usize> {
    let mut order = vec![first, second];
    order.extend((0..dim).filter(|&i| i != first && i != second));
    order
}

impl BasisReordering {
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d_b = self.bob.len();
        let old = |k: usize| self.alice[k / d_b] * d_b + self.bob[k % d_b];
        CMatrix::from_fn(rho.dim(), |i, j| rho[(old(i), old(j))])
    }
}

pub fn reorder_basis(anchor: &AnchorEntry, s: &AdditiveStructure) -> BasisReordering {
    BasisReordering {
        alice: front_two(anchor.m0, anchor.n0, s.d_a()),
        bob: front_two(anchor.p0, anchor.q0, s.d_b()),
    }
}

/// The measurement settings for given Bob angles.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshObservables {
    pub a1: Hermitian,
    pub a2: Hermitian,
    pub b1: Hermitian,
    pub b2: Hermitian,
    pub theta: f64,
    pub phi: f64,
}

/// `v·σ ⊕ 𝟙_{d−2}`.
fn two_level_setting(v: [f64; 3], dim: usize) -> Hermitian {
    let m = direct_sum(&pauli::dot(v), &CMatrix::identity(dim - 2));
    Hermitian::new(m).expect("Pauli combination is Hermitian")
}

pub fn bob_directions(theta: f64, phi: f64) -> ([f64; 3], [f64; 3]) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    ([st * cp, st * sp, ct], [-st * cp, -st * sp, ct])
}

pub fn build_observables(theta: f64, phi: f64, d_a: usize, d_b: usize) -> ChshObservables {
    let (b1, b2) = bob_directions(theta, phi);
    ChshObservables {
        a1: two_level_setting([0.0, 0.0, 1.0], d_a),
        a2: two_level_setting([1.0, 0.0, 0.0], d_a),
        b1: two_level_setting(b1, d_b),
        b2: two_level_setting(b2, d_b),
        theta,
        phi,
    }
}

impl ChshObservables {
    /// `A₁⊗(B₁+B₂) + A₂⊗(B₁−B₂)`.
    pub fn chsh_operator(&self) -> CMatrix {
        let sum = self.b1.matrix().add(self.b2.matrix()).unwrap();
        let diff = self.b1.matrix().sub(self.b2.matrix()).unwrap();
        kron(self.a1.matrix(), &sum)
            .add(&kron(self.a2.matrix(), &diff))
            .unwrap()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OOperators {
    pub o0: Hermitian,
    pub ox: Hermitian,
    pub oy: Hermitian,
    pub oz: Hermitian,
}

pub fn build_o_operators(d_a: usize, d_b: usize) -> Result<OOperators> {
    if d_a < 2 || d_b < 2 {
        return Err(Error::InvalidInput(format!(
            "CHSH construction needs both dimensions >= 2, got {d_a}x{d_b}"
        )));
    }
    let alice_z = direct_sum(&pauli::z(), &CMatrix::identity(d_a - 2));
    let alice_x = direct_sum(&pauli::x(), &CMatrix::identity(d_a - 2));
    let bob_rest = direct_sum(&CMatrix::zeros(2), &CMatrix::identity(d_b - 2));
    let bob = |s: CMatrix| direct_sum(&s, &CMatrix::zeros(d_b - 2));
    let h = |m: CMatrix| Hermitian::new(m).expect("Kronecker product of Hermitian factors");
    Ok(OOperators {
        o0: h(kron(&alice_z, &bob_rest)),
        oz: h(kron(&alice_z, &bob(pauli::z()))),
        ox: h(kron(&alice_x, &bob(pauli::x()))),
        oy: h(kron(&alice_x, &bob(pauli::y()))),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OExpectations {
    pub o0: f64,
    pub ox: f64,
    pub oy: f64,
    pub oz: f64,
}

impl OExpectations {
    /// `‖(⟨O_x⟩, ⟨O_y⟩, ⟨O_z⟩)‖`
    pub fn bloch_norm(&self) -> f64 {
        (self.ox * self.ox + self.oy * self.oy + self.oz * self.oz).sqrt()
    }
}

/// The four expectations read off the entries of a reordered state, where
/// Alice's `m₀, n₀` are indices 0, 1 and Bob's `p₀, q₀` are 0, 1.
pub fn o_expectations(rho: &CMatrix, d_a: usize, d_b: usize) -> OExpectations {
    let at = |m: usize, p: usize, n: usize, q: usize| rho[(m * d_b + p, n * d_b + q)];
    let diag = |m: usize, p: usize| at(m, p, m, p).re;
    let (m0, n0, p0, q0) = (0, 1, 0, 1);
    let others = 2..d_a;
    let rest = 2..d_b;

    let mut o0 = 0.0;
    for t in rest.clone() {
        o0 += diag(m0, t) - diag(n0, t);
        o0 += others.clone().map(|s| diag(s, t)).sum::<f64>();
    }

    let mut oz = diag(m0, p0) - diag(m0, q0) + diag(n0, q0) - diag(n0, p0);
    oz += others
        .clone()
        .map(|s| diag(s, p0) - diag(s, q0))
        .sum::<f64>();

    let mut coherence = at(m0, p0, n0, q0) + at(n0, p0, m0, q0);
    coherence += others.map(|s| at(s, p0, s, q0)).sum::<Complex>();

    OExpectations {
        o0,
        ox: 2.0 * coherence.re,
        oy: -2.0 * coherence.im,
        oz,
    }
}

/// `Tr(ρ O_i)` by direct operator products.
pub fn o_expectations_direct(rho: &CMatrix, ops: &OOperators) -> Result<OExpectations> {
    let ev = |o: &Hermitian| rho.trace_product(o.matrix()).map(|z| z.re);
    Ok(OExpectations {
        o0: ev(&ops.o0)?,
        ox: ev(&ops.ox)?,
        oy: ev(&ops.oy)?,
        oz: ev(&ops.oz)?,
    })
}

/// `Tr(ρ [A₁⊗(B₁+B₂) + A₂⊗(B₁−B₂)])` for a state in the reordered basis.
pub fn f_value(rho: &CMatrix, obs: &ChshObservables) -> Result<f64> {
    Ok(rho.trace_product(&obs.chsh_operator())?.re)
}

/// `F` from the O-expectations and the Bob angles.
pub fn f_from_expectations(o: &OExpectations, theta: f64, phi: f64) -> f64 {
    let (b1, _) = bob_directions(theta, phi);
    2.0 * (o.o0 + b1[0] * o.ox + b1[1] * o.oy + b1[2] * o.oz)
}

/// `2[1 + √(4|ρ_anchor|² + ⟨O_z⟩²) − ⟨O_z⟩]`
pub fn f_max_from_anchor(anchor_abs: f64, oz: f64) -> f64 {
    2.0 * (1.0 + (4.0 * anchor_abs * anchor_abs + oz * oz).sqrt() - oz)
}

/// `⟨O_z⟩` once the anchor conditions have removed the vanishing terms:
/// `ρ_{(m₀p₀)} + ρ_{(n₀q₀)} + Σ_{s≠m₀,n₀} ρ_{(s p₀)}` (diagonal entries).
pub fn oz_under_anchor(rho: &DensityMatrix, s: &AdditiveStructure, anchor: &AnchorEntry) -> f64 {
    let diag = |m: usize, p: usize| rho.entry(s.flat(m, p), s.flat(m, p)).re;
    let others: f64 = (0..s.d_a())
        .filter(|&i| i != anchor.m0 && i != anchor.n0)
        .map(|i| diag(i, anchor.p0))
        .sum();
    diag(anchor.m0, anchor.p0) + diag(anchor.n0, anchor.q0) + others
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshCertificate {
    pub anchor: AnchorEntry,
    pub reorder: BasisReordering,
    pub f_max: f64,
    pub theta_opt: f64,
    pub phi_opt: f64,
    pub expectations: OExpectations,
}

impl ChshCertificate {
    pub fn observables(&self) -> ChshObservables {
        build_observables(
            self.theta_opt,
            self.phi_opt,
            self.reorder.alice.len(),
            self.reorder.bob.len(),
        )
    }

    pub fn violates(&self) -> bool {
        self.f_max > 2.0
    }
}

/// Optimal angles align `b₁` with `(⟨O_x⟩, ⟨O_y⟩, ⟨O_z⟩)`; a zero vector
/// maps to `(0, 0)`.
pub fn optimal_angles(o: &OExpectations) -> (f64, f64) {
    let norm = o.bloch_norm();
    if norm == 0.0 {
        return (0.0, 0.0);
    }
    // Adding 0.0 turns -0.0 into 0.0, so φ = π rather than −π when oy vanishes.
    (
        (o.oz / norm).clamp(-1.0, 1.0).acos(),
        (o.oy + 0.0).atan2(o.ox + 0.0),
    )
}

pub fn f_max_closed_form(
    rho: &DensityMatrix,
    s: &AdditiveStructure,
    anchor: &AnchorEntry,
    tol: &Tolerances,
) -> Result<ChshCertificate> {
    if s.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: rho.dim(),
        });
    }
    let in_range =
        anchor.m0 < s.d_a() && anchor.n0 < s.d_a() && anchor.p0 < s.d_b() && anchor.q0 < s.d_b();
    if !in_range || !anchor_conditions(s, anchor.m0, anchor.p0, anchor.n0, anchor.q0) {
        return Err(Error::InvalidAnchor(format!(
            "({}, {}), ({}, {}) does not meet the anchor conditions",
            anchor.m0, anchor.p0, anchor.n0, anchor.q0
        )));
    }
    let value = rho.entry(anchor.row(s), anchor.col(s));
    if value.norm() <= tol.zero || (value - anchor.value).norm() > tol.zero.max(1e-15) {
        return Err(Error::InvalidAnchor(format!(
            "entry value {value} does not match a non-vanishing anchor {}",
            anchor.value
        )));
    }

    let reorder = reorder_basis(anchor, s);
    let reordered = reorder.apply(rho.matrix());
    let expectations = o_expectations(&reordered, s.d_a(), s.d_b());
    let f_max = f_max_from_anchor(value.norm(), oz_under_anchor(rho, s, anchor));
    let (theta_opt, phi_opt) = optimal_angles(&expectations);

    Ok(ChshCertificate {
        anchor: anchor.clone(),
        reorder,
        f_max,
        theta_opt,
        phi_opt,
        expectations,
    })
}

/// Best certificate over all anchors; ties keep the first anchor found.
/// `None` means no anchor exists, which says nothing about locality.
pub fn certify_nonlocality(
    rho: &DensityMatrix,
    s: &AdditiveStructure,
    tol: &Tolerances,
) -> Result<Option<ChshCertificate>> {
    let anchors = find_anchor_entries(rho, s, tol)?;
    let mut best: Option<ChshCertificate> = None;
    for anchor in &anchors {
        let cert = f_max_closed_form(rho, s, anchor, tol)?;
        if best.as_ref().is_none_or(|b| cert.f_max > b.f_max) {
            best = Some(cert);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matmul, ONE, ZERO};
    use crate::structure::tests::{bell_psi_plus, c, qubit_pair};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn higgs_structure() -> AdditiveStructure {
        AdditiveStructure::new(vec![1.0, 0.0, -1.0], vec![1.0, 0.0, -1.0], 0.0).unwrap()
    }

    fn higgs_rho(diag: [f64; 3], a12: Complex, a13: Complex, a23: Complex) -> DensityMatrix {
        let mut m = CMatrix::zeros(9);
        for (k, d) in [2, 4, 6].into_iter().zip(diag) {
            m.set(k, k, c(d));
        }
        for (i, j, v) in [(2, 4, a12), (2, 6, a13), (4, 6, a23)] {
            m.set(i, j, v);
            m.set(j, i, v.conj());
        }
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn higgs_a12_is_an_anchor() {
        let rho = higgs_rho([0.4, 0.3, 0.3], c(-0.2), c(0.1), c(-0.2));
        let s = higgs_structure();
        let anchors = find_anchor_entries(&rho, &s, &tol()).unwrap();
        // Three crossed entries, each in both orientations.
        assert_eq!(anchors.len(), 6);
        let a12 = &anchors[0];
        assert_eq!((a12.m0, a12.p0, a12.n0, a12.q0), (0, 2, 1, 1));
        assert_eq!(a12.value, c(-0.2));
        // (N0, Q0) = (0, 0)
        assert_eq!((s.j_a()[a12.n0], s.j_b()[a12.q0]), (0.0, 0.0));
    }

    #[test]
    fn diagonal_state_has_no_anchor() {
        let rho = higgs_rho([0.4, 0.3, 0.3], ZERO, ZERO, ZERO);
        let s = higgs_structure();
        assert!(find_anchor_entries(&rho, &s, &tol()).unwrap().is_empty());
        assert!(certify_nonlocality(&rho, &s, &tol()).unwrap().is_none());
    }

    #[test]
    fn doubly_degenerate_crossed_entry_is_not_an_anchor() {
        // J_A = [1,1,0,0], J_B = [0,0,1,1], J = 1. Crossed entry between
        // (m,p) = (0,0) [M=1,P=0] and (n,q) = (2,2) [N=0,Q=1]; every label
        // is doubly degenerate, so neither orientation qualifies.
        let s = AdditiveStructure::new(vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 1.0], 1.0)
            .unwrap();
        let (i, j) = (s.flat(0, 0), s.flat(2, 2));
        let mut m = CMatrix::zeros(16);
        m.set(i, i, c(0.5));
        m.set(j, j, c(0.5));
        m.set(i, j, c(0.3));
        m.set(j, i, c(0.3));
        let rho = DensityMatrix::new(m).unwrap();
        assert_eq!(
            crate::entanglement::find_crossed_entries(&rho, &s, &tol())
                .unwrap()
                .len(),
            1
        );
        assert!(find_anchor_entries(&rho, &s, &tol()).unwrap().is_empty());
    }

    #[test]
    fn one_sided_degeneracy_uses_the_conjugate() {
        // Alice label 1 degenerate, 0 not; Bob label 0 degenerate, 1 not.
        // Entry (m,p)=(0,0) [1,0] → (n,q)=(2,2) [0,1]: N0=0, Q0=1 non-degenerate.
        let s = AdditiveStructure::new(vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], 1.0).unwrap();
        let (i, j) = (s.flat(0, 0), s.flat(2, 2));
        let mut m = CMatrix::zeros(9);
        m.set(i, i, c(0.5));
        m.set(j, j, c(0.5));
        m.set(i, j, c(0.25));
        m.set(j, i, c(0.25));
        let rho = DensityMatrix::new(m).unwrap();
        let anchors = find_anchor_entries(&rho, &s, &tol()).unwrap();
        assert_eq!(anchors.len(), 1);
        assert_eq!(
            (anchors[0].m0, anchors[0].p0, anchors[0].n0, anchors[0].q0),
            (0, 0, 2, 2)
        );

        // Swap the roles of the parties' degeneracies: only the conjugate qualifies.
        let s2 = AdditiveStructure::new(vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0], 1.0).unwrap();
        let (i, j) = (s2.flat(0, 0), s2.flat(2, 2));
        let mut m = CMatrix::zeros(9);
        m.set(i, i, c(0.5));
        m.set(j, j, c(0.5));
        m.set(i, j, Complex::new(0.1, 0.2));
        m.set(j, i, Complex::new(0.1, -0.2));
        let rho = DensityMatrix::new(m).unwrap();
        let anchors = find_anchor_entries(&rho, &s2, &tol()).unwrap();
        assert_eq!(anchors.len(), 1);
        assert_eq!(
            (anchors[0].m0, anchors[0].p0, anchors[0].n0, anchors[0].q0),
            (2, 2, 0, 0)
        );
        assert_eq!(anchors[0].value, Complex::new(0.1, -0.2));
    }

    #[test]
    fn higgs_reordering() {
        let s = higgs_structure();
        let rho = higgs_rho([0.4, 0.3, 0.3], c(-0.2), c(0.1), c(-0.2));
        let anchor = find_anchor_entries(&rho, &s, &tol()).unwrap().remove(0);
        let r = reorder_basis(&anchor, &s);
        // Alice {|1>,|0>,|-1>}, Bob {|-1>,|0>,|1>}.
        assert_eq!(r.alice, vec![0, 1, 2]);
        assert_eq!(r.bob, vec![2, 1, 0]);
        let re = r.apply(rho.matrix());
        // The reordered texture: anchor at (0, 4), a13 at (0, 8), a23 at (4, 8).
        assert_eq!(re[(0, 0)], c(0.4));
        assert_eq!(re[(0, 4)], c(-0.2));
        assert_eq!(re[(0, 8)], c(0.1));
        assert_eq!(re[(4, 8)], c(-0.2));
        assert_eq!(re[(8, 8)], c(0.3));
    }

    #[test]
    fn qubit_anchor_reorders_bob_only() {
        let s = qubit_pair(0.0);
        let anchor = AnchorEntry {
            m0: 0,
            p0: 1,
            n0: 1,
            q0: 0,
            value: c(0.5),
        };
        let r = reorder_basis(&anchor, &s);
        assert_eq!(r.alice, vec![0, 1]);
        assert_eq!(r.bob, vec![1, 0]);
        let re = r.apply(bell_psi_plus().matrix());
        assert_eq!(re[(0, 3)], c(0.5));
        assert_eq!(re[(3, 3)], c(0.5));
    }

    #[test]
    fn observables_examples() {
        let obs = build_observables(0.0, 0.3, 3, 3);
        let expected = direct_sum(&pauli::z(), &CMatrix::identity(1));
        assert!(obs.b1.matrix().max_abs_diff(&expected).unwrap() < 1e-15);
        assert!(obs.b2.matrix().max_abs_diff(&expected).unwrap() < 1e-15);

        let obs = build_observables(FRAC_PI_2, 0.0, 3, 3);
        let plus = direct_sum(&pauli::x(), &CMatrix::identity(1));
        let minus = direct_sum(&pauli::x().scale(-ONE), &CMatrix::identity(1));
        assert!(obs.b1.matrix().max_abs_diff(&plus).unwrap() < 1e-15);
        assert!(obs.b2.matrix().max_abs_diff(&minus).unwrap() < 1e-15);
    }

    #[test]
    fn bob_sum_and_difference_factorize() {
        for &(theta, phi) in &[(0.3, -1.2), (1.7, 2.9), (PI, 0.5)] {
            let obs = build_observables(theta, phi, 2, 4);
            let sum = obs.b1.matrix().add(obs.b2.matrix()).unwrap();
            let diff = obs.b1.matrix().sub(obs.b2.matrix()).unwrap();
            // The cosθ factor only multiplies the two-level block: the
            // identity blocks of B₁ and B₂ add up to 2·𝟙.
            let c1 = direct_sum(&pauli::z().scale(c(theta.cos())), &CMatrix::identity(2));
            assert!(sum.max_abs_diff(&c1.scale(c(2.0))).unwrap() < 1e-14);
            let two_level = sum.principal_submatrix(&[0, 1]);
            assert!(
                two_level
                    .max_abs_diff(&pauli::z().scale(c(2.0 * theta.cos())))
                    .unwrap()
                    < 1e-14
            );
            let c2 = direct_sum(&pauli::dot([phi.cos(), phi.sin(), 0.0]), &CMatrix::zeros(2));
            assert!(diff.max_abs_diff(&c2.scale(c(2.0 * theta.sin()))).unwrap() < 1e-14);
        }
    }

    #[test]
    fn settings_square_to_identity() {
        let obs = build_observables(1.1, -2.3, 4, 3);
        for (h, d) in [(&obs.a1, 4), (&obs.a2, 4), (&obs.b1, 3), (&obs.b2, 3)] {
            let sq = matmul(h.matrix(), h.matrix()).unwrap();
            assert!(sq.max_abs_diff(&CMatrix::identity(d)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn qubit_o_operators() {
        let ops = build_o_operators(2, 2).unwrap();
        assert_eq!(ops.o0.matrix(), &CMatrix::zeros(4));
        assert_eq!(ops.oz.matrix(), &kron(&pauli::z(), &pauli::z()));
        assert!(build_o_operators(1, 3).is_err());
    }

    #[test]
    fn bell_expectations() {
        let s = qubit_pair(0.0);
        let anchor = AnchorEntry {
            m0: 0,
            p0: 1,
            n0: 1,
            q0: 0,
            value: c(0.5),
        };
        let re = reorder_basis(&anchor, &s).apply(bell_psi_plus().matrix());
        let o = o_expectations(&re, 2, 2);
        assert_eq!(
            o,
            OExpectations {
                o0: 0.0,
                ox: 1.0,
                oy: 0.0,
                oz: 1.0
            }
        );
    }

    #[test]
    fn higgs_expectations() {
        let (a11, a22, a33) = (0.45, 0.3, 0.25);
        let a12 = Complex::new(-0.2, 0.07);
        let rho = higgs_rho([a11, a22, a33], a12, c(0.1), a12);
        let s = higgs_structure();
        let anchor = find_anchor_entries(&rho, &s, &tol()).unwrap().remove(0);
        let re = reorder_basis(&anchor, &s).apply(rho.matrix());
        let o = o_expectations(&re, 3, 3);
        assert!((o.oz - (a11 + a22)).abs() < 1e-15);
        assert!((o.ox - 2.0 * a12.re).abs() < 1e-15);
        assert!((o.oy + 2.0 * a12.im).abs() < 1e-15);
        assert!((o.o0 - (1.0 - a11 - a22)).abs() < 1e-15);
    }

    #[test]
    fn diagonal_state_has_no_transverse_expectation() {
        let rho = higgs_rho([0.4, 0.3, 0.3], ZERO, ZERO, ZERO);
        let o = o_expectations(rho.matrix(), 3, 3);
        assert_eq!((o.ox, o.oy), (0.0, 0.0));
    }

    #[test]
    fn f_value_examples() {
        let s = qubit_pair(0.0);
        let anchor = AnchorEntry {
            m0: 0,
            p0: 1,
            n0: 1,
            q0: 0,
            value: c(0.5),
        };
        let re = reorder_basis(&anchor, &s).apply(bell_psi_plus().matrix());
        let f = f_value(&re, &build_observables(FRAC_PI_4, 0.0, 2, 2)).unwrap();
        assert!((f - 2.0 * SQRT_2).abs() < 1e-12);

        let o = o_expectations(&re, 2, 2);
        let f0 = f_value(&re, &build_observables(0.0, 1.0, 2, 2)).unwrap();
        assert!((f0 - 2.0 * (o.o0 + o.oz)).abs() < 1e-12);
    }

    #[test]
    fn product_state_respects_classical_bound() {
        let rho = higgs_rho([0.0, 1.0, 0.0], ZERO, ZERO, ZERO);
        for i in 0..=20 {
            for j in 0..=20 {
                let theta = PI * i as f64 / 20.0;
                let phi = -PI + 2.0 * PI * j as f64 / 20.0;
                let f = f_value(rho.matrix(), &build_observables(theta, phi, 3, 3)).unwrap();
                assert!(f <= 2.0 + 1e-9);
            }
        }
    }

    #[test]
    fn bell_certificate_saturates_tsirelson() {
        let s = qubit_pair(0.0);
        let cert = certify_nonlocality(&bell_psi_plus(), &s, &tol())
            .unwrap()
            .unwrap();
        assert!((cert.f_max - 2.0 * SQRT_2).abs() < 1e-12);
        assert!((cert.theta_opt - FRAC_PI_4).abs() < 1e-12);
        assert!(cert.phi_opt.abs() < 1e-12);
    }

    #[test]
    fn zero_anchor_limit() {
        assert_eq!(f_max_from_anchor(0.0, 0.7), 2.0);
        assert_eq!(f_max_from_anchor(0.0, 0.0), 2.0);
    }

    #[test]
    fn table_one_first_column() {
        // |a12| = 0.33, |a13| = 0.20, a11 + a22 = 1 - |a13| under parity.
        let a13 = 0.20;
        // a11 = a33 and a22 = 1 - 2 a11, so a11 + a22 = 1 - a11 = 1 - |a13|.
        let (a11, a22, a33) = (a13, 1.0 - 2.0 * a13, a13);
        let rho = higgs_rho([a11, a22, a33], c(-0.33), c(a13), c(-0.33));
        let s = higgs_structure();
        let anchor = find_anchor_entries(&rho, &s, &tol()).unwrap().remove(0);
        let cert = f_max_closed_form(&rho, &s, &anchor, &tol()).unwrap();
        assert_eq!(format!("{:.2}", cert.f_max), "2.47");
    }

    #[test]
    fn larger_anchor_wins() {
        // Two anchors with equal diagonals; the larger modulus gives the larger F.
        let rho = higgs_rho([1.0 / 3.0; 3], c(-0.1), ZERO, c(0.3));
        let s = higgs_structure();
        let cert = certify_nonlocality(&rho, &s, &tol()).unwrap().unwrap();
        let expected = f_max_from_anchor(0.3, 2.0 / 3.0);
        assert!((cert.f_max - expected).abs() < 1e-15);
        assert_eq!(cert.anchor.value.norm(), 0.3);
        assert!(f_max_from_anchor(0.1, 2.0 / 3.0) < expected);
    }

    #[test]
    fn invalid_anchor_is_rejected() {
        let rho = higgs_rho([0.4, 0.3, 0.3], c(-0.2), ZERO, ZERO);
        let s = higgs_structure();
        let bogus = AnchorEntry {
            m0: 0,
            p0: 2,
            n0: 0,
            q0: 2,
            value: c(0.4),
        };
        assert!(matches!(
            f_max_closed_form(&rho, &s, &bogus, &tol()),
            Err(Error::InvalidAnchor(_))
        ));
        let wrong_value = AnchorEntry {
            m0: 0,
            p0: 2,
            n0: 1,
            q0: 1,
            value: c(0.3),
        };
        assert!(f_max_closed_form(&rho, &s, &wrong_value, &tol()).is_err());
    }
}
