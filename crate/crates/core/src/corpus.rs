//! Seeded generators for texture-respecting test states.
//!
//! Every state is a mixture of pure states supported on on-shell basis
//! vectors, so it commutes with the additive observable by construction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chsh::{find_anchor_entries, AnchorEntry};
use crate::linalg::{CMatrix, Complex, ZERO};
use crate::structure::{AdditiveStructure, DensityMatrix};
use crate::tolerance::Tolerances;

pub const SEED_ENV: &str = "ADDOBS_CERTIFY_SEED";
pub const DEFAULT_SEED: u64 = 42;

/// Seed from `ADDOBS_CERTIFY_SEED`, falling back to 42 when unset or
/// unparsable.
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Whether some on-shell pair of pairs satisfies the anchor conditions on
/// labels alone (distinct indices, non-degenerate `n0` and `q0`).
pub fn admits_anchor(s: &AdditiveStructure) -> bool {
    let shell: Vec<(usize, usize)> = (0..s.d_a())
        .flat_map(|m| (0..s.d_b()).map(move |p| (m, p)))
        .filter(|&(m, p)| s.on_shell(m, p))
        .collect();
    shell.iter().any(|&(m0, p0)| {
        shell.iter().any(|&(n0, q0)| {
            m0 != n0 && p0 != q0 && s.alice_degeneracy(n0) == 1 && s.bob_degeneracy(q0) == 1
        })
    })
}

pub struct Corpus {
    rng: ChaCha8Rng,
}

impl Corpus {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn from_env() -> Self {
        Self::new(seed_from_env())
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn labels(&mut self, n: usize, distinct: bool) -> Vec<f64> {
        if distinct {
            let mut pool: Vec<i32> = (-4..=4).collect();
            pool.shuffle(&mut self.rng);
            pool[..n].iter().map(|&k| k as f64 * 0.5).collect()
        } else {
            (0..n)
                .map(|_| self.rng.gen_range(-2..=2) as f64 * 0.5)
                .collect()
        }
    }

    /// Picks `J` among the attained sums, preferring sums reached by more
    /// than one pair so the on-shell subspace is not a single basis vector.
    fn structure_from(&mut self, j_a: Vec<f64>, j_b: Vec<f64>) -> AdditiveStructure {
        let sums: Vec<f64> = j_a
            .iter()
            .flat_map(|a| j_b.iter().map(move |b| a + b))
            .collect();
        let shared: Vec<f64> = sums
            .iter()
            .copied()
            .filter(|x| sums.iter().filter(|y| (*y - x).abs() < 1e-9).count() > 1)
            .collect();
        let j = match shared.choose(&mut self.rng) {
            Some(&x) if self.rng.gen_bool(0.8) => x,
            _ => *sums.choose(&mut self.rng).expect("labels are non-empty"),
        };
        AdditiveStructure::new(j_a, j_b, j).expect("J is attained by construction")
    }

    /// Random labels (degeneracies allowed) with `2 ≤ d_a ≤ max_da`,
    /// `2 ≤ d_b ≤ max_db`.
    pub fn structure(&mut self, max_da: usize, max_db: usize) -> AdditiveStructure {
        let d_a = self.rng.gen_range(2..=max_da.max(2));
        let d_b = self.rng.gen_range(2..=max_db.max(2));
        let j_a = self.labels(d_a, false);
        let j_b = self.labels(d_b, false);
        self.structure_from(j_a, j_b)
    }

    /// A system whose sectors are all 1×n or n×1: either a qubit with
    /// distinct labels against a qudit, or non-degenerate labels on both sides.
    pub fn type1_structure(&mut self, max_d: usize) -> AdditiveStructure {
        let max_d = max_d.clamp(2, 9);
        if self.rng.gen_bool(0.5) {
            let j_a = self.labels(2, true);
            let d_b = self.rng.gen_range(2..=max_d);
            let j_b = self.labels(d_b, false);
            self.structure_from(j_a, j_b)
        } else {
            let d_a = self.rng.gen_range(2..=max_d);
            let d_b = self.rng.gen_range(2..=max_d);
            let j_a = self.labels(d_a, true);
            let j_b = self.labels(d_b, true);
            self.structure_from(j_a, j_b)
        }
    }

    fn amplitude(&mut self) -> Complex {
        Complex::new(self.rng.gen_range(-1.0..1.0), self.rng.gen_range(-1.0..1.0))
    }

    fn weights(&mut self, n: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..n).map(|_| self.rng.gen_range(0.05..1.0)).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }

    fn mixture(&mut self, dim: usize, vectors: &[Vec<Complex>]) -> DensityMatrix {
        let w = self.weights(vectors.len());
        let m = CMatrix::from_fn(dim, |i, j| {
            vectors
                .iter()
                .zip(&w)
                .map(|(v, &wk)| v[i] * v[j].conj() * wk)
                .sum()
        });
        DensityMatrix::new(m).expect("mixture of unit vectors is a state")
    }

    fn normalize(v: &mut [Complex]) -> bool {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            return false;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        true
    }

    /// Random pure state on the on-shell subspace; each amplitude is dropped
    /// with probability `sparsity`.
    pub fn shell_vector(&mut self, s: &AdditiveStructure, sparsity: f64) -> Vec<Complex> {
        let shell: Vec<usize> = (0..s.dim()).filter(|&k| s.flat_on_shell(k)).collect();
        loop {
            let mut v = vec![ZERO; s.dim()];
            for &k in &shell {
                if !self.rng.gen_bool(sparsity) {
                    v[k] = self.amplitude();
                }
            }
            if Self::normalize(&mut v) {
                return v;
            }
        }
    }

    /// Mixture of `1..=max_rank` random on-shell pure states.
    pub fn shell_state(
        &mut self,
        s: &AdditiveStructure,
        max_rank: usize,
        sparsity: f64,
    ) -> DensityMatrix {
        let rank = self.rng.gen_range(1..=max_rank.max(1));
        let vectors: Vec<_> = (0..rank).map(|_| self.shell_vector(s, sparsity)).collect();
        self.mixture(s.dim(), &vectors)
    }

    /// Mixture of products `|m⟩ ⊗ |φ⟩` and `|φ⟩ ⊗ |p⟩` each confined to a
    /// single on-shell sector. Separable by construction.
    pub fn product_mixture(&mut self, s: &AdditiveStructure, terms: usize) -> DensityMatrix {
        let sectors: Vec<_> = crate::structure::build_sectors(s)
            .into_iter()
            .filter(|sec| sec.is_on_shell(s))
            .collect();
        let vectors: Vec<Vec<Complex>> = (0..terms.max(1))
            .map(|_| {
                let sec = sectors
                    .choose(&mut self.rng)
                    .expect("structure has an on-shell sector")
                    .clone();
                loop {
                    let alice = self.local(sec.alice_indices.len());
                    let bob = self.local(sec.bob_indices.len());
                    let mut v = vec![ZERO; s.dim()];
                    for (&m, &x) in sec.alice_indices.iter().zip(&alice) {
                        for (&p, &y) in sec.bob_indices.iter().zip(&bob) {
                            v[s.flat(m, p)] = x * y;
                        }
                    }
                    if Self::normalize(&mut v) {
                        break v;
                    }
                }
            })
            .collect();
        self.mixture(s.dim(), &vectors)
    }

    fn local(&mut self, n: usize) -> Vec<Complex> {
        if n == 1 || self.rng.gen_bool(0.3) {
            let mut v = vec![ZERO; n];
            v[self.rng.gen_range(0..n)] = Complex::new(1.0, 0.0);
            v
        } else {
            (0..n).map(|_| self.amplitude()).collect()
        }
    }

    /// A state carrying at least one anchor entry, on a structure with
    /// `d_a ≤ max_da`, `d_b ≤ max_db`.
    pub fn anchored_state(
        &mut self,
        max_da: usize,
        max_db: usize,
        tol: &Tolerances,
    ) -> (DensityMatrix, AdditiveStructure, Vec<AnchorEntry>) {
        loop {
            let s = self.structure(max_da, max_db);
            if !admits_anchor(&s) {
                continue;
            }
            let sparsity = if self.rng.gen_bool(0.5) { 0.0 } else { 0.3 };
            let rho = self.shell_state(&s, 3, sparsity);
            let anchors =
                find_anchor_entries(&rho, &s, tol).expect("shell states respect the texture");
            if !anchors.is_empty() {
                return (rho, s, anchors);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{classify_sectors, find_crossed_entries, SectorKind};
    use crate::structure::validate_additivity;

    #[test]
    fn same_seed_same_states() {
        let mut a = Corpus::new(7);
        let mut b = Corpus::new(7);
        for _ in 0..5 {
            let s = a.structure(4, 5);
            assert_eq!(s, b.structure(4, 5));
            assert_eq!(a.shell_state(&s, 3, 0.2), b.shell_state(&s, 3, 0.2));
        }
    }

    #[test]
    fn states_respect_texture() {
        let tol = Tolerances::default();
        let mut c = Corpus::new(1);
        for _ in 0..50 {
            let s = c.structure(4, 5);
            let rho = c.shell_state(&s, 3, 0.3);
            assert!(validate_additivity(&rho, &s, &tol).unwrap().is_empty());
            let rho = c.product_mixture(&s, 4);
            assert!(validate_additivity(&rho, &s, &tol).unwrap().is_empty());
            assert!(find_crossed_entries(&rho, &s, &tol).unwrap().is_empty());
        }
    }

    #[test]
    fn type1_structures_have_only_type1_sectors() {
        let mut c = Corpus::new(3);
        for _ in 0..50 {
            let s = c.type1_structure(5);
            assert!(classify_sectors(&s)
                .iter()
                .all(|k| k.kind == SectorKind::Type1));
        }
    }

    #[test]
    fn anchored_states_have_anchors() {
        let tol = Tolerances::default();
        let mut c = Corpus::new(5);
        for _ in 0..20 {
            let (rho, s, anchors) = c.anchored_state(4, 5, &tol);
            assert!(s.d_a() <= 4 && s.d_b() <= 5);
            assert!(!anchors.is_empty());
            assert_eq!(rho.dim(), s.dim());
        }
    }
}
