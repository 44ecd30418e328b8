//! The conserved additive observable `J = J_A + J_B` and what it forces on
//! a density matrix.
//!
//! Basis states of each party are labelled by their eigenvalue under the
//! local observable. A state with a definite total value `J` can only have
//! non-vanishing entries `ρ_{(mp)(nq)}` with `M + P = N + Q = J`; that
//! constraint is the "texture" checked here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues_hermitian, partial_transpose, CMatrix, Complex, Hermitian};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveStructure {
    j_a: Vec<f64>,
    j_b: Vec<f64>,
    j_total: f64,
    label_tol: f64,
}

impl AdditiveStructure {
    pub fn new(j_a: Vec<f64>, j_b: Vec<f64>, j_total: f64) -> Result<Self> {
        Self::with_label_tol(j_a, j_b, j_total, Tolerances::default().label)
    }

    pub fn with_label_tol(
        j_a: Vec<f64>,
        j_b: Vec<f64>,
        j_total: f64,
        label_tol: f64,
    ) -> Result<Self> {
        if j_a.is_empty() || j_b.is_empty() {
            return Err(Error::InvalidStructure(
                "both parties need at least one basis state".into(),
            ));
        }
        if !j_a
            .iter()
            .chain(&j_b)
            .chain([&j_total])
            .all(|x| x.is_finite())
        {
            return Err(Error::InvalidStructure(
                "eigenvalue labels must be finite".into(),
            ));
        }
        let s = Self {
            j_a,
            j_b,
            j_total,
            label_tol,
        };
        let any_on_shell = (0..s.d_a()).any(|m| (0..s.d_b()).any(|p| s.on_shell(m, p)));
        if !any_on_shell {
            return Err(Error::InvalidStructure(format!(
                "no basis pair has total eigenvalue {}",
                s.j_total
            )));
        }
        Ok(s)
    }

    pub fn d_a(&self) -> usize {
        self.j_a.len()
    }

    pub fn d_b(&self) -> usize {
        self.j_b.len()
    }

    pub fn dim(&self) -> usize {
        self.d_a() * self.d_b()
    }

    pub fn j_a(&self) -> &[f64] {
        &self.j_a
    }

    pub fn j_b(&self) -> &[f64] {
        &self.j_b
    }

    pub fn j_total(&self) -> f64 {
        self.j_total
    }

    pub fn label_tol(&self) -> f64 {
        self.label_tol
    }

    pub fn flat(&self, m: usize, p: usize) -> usize {
        m * self.d_b() + p
    }

    pub fn split(&self, k: usize) -> (usize, usize) {
        (k / self.d_b(), k % self.d_b())
    }

    pub fn same_label(&self, x: f64, y: f64) -> bool {
        (x - y).abs() <= self.label_tol
    }

    /// `J_A[m] + J_B[p] == J`.
    pub fn on_shell(&self, m: usize, p: usize) -> bool {
        self.same_label(self.j_a[m] + self.j_b[p], self.j_total)
    }

    pub fn flat_on_shell(&self, k: usize) -> bool {
        let (m, p) = self.split(k);
        self.on_shell(m, p)
    }

    pub fn alice_degeneracy(&self, m: usize) -> usize {
        let v = self.j_a[m];
        self.j_a.iter().filter(|&&x| self.same_label(x, v)).count()
    }

    pub fn bob_degeneracy(&self, p: usize) -> usize {
        let v = self.j_b[p];
        self.j_b.iter().filter(|&&x| self.same_label(x, v)).count()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            })
        }
    }
}

/// All basis pairs `(m, q)` with `J_A[m] = M`, `J_B[q] = Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub alice_value: f64,
    pub bob_value: f64,
    pub alice_indices: Vec<usize>,
    pub bob_indices: Vec<usize>,
}

impl Sector {
    pub fn deg_alice(&self) -> usize {
        self.alice_indices.len()
    }

    pub fn deg_bob(&self) -> usize {
        self.bob_indices.len()
    }

    pub fn is_on_shell(&self, s: &AdditiveStructure) -> bool {
        s.same_label(self.alice_value + self.bob_value, s.j_total)
    }

    /// Flat product-space indices, Alice-major.
    pub fn flat_indices(&self, s: &AdditiveStructure) -> Vec<usize> {
        self.alice_indices
            .iter()
            .flat_map(|&m| self.bob_indices.iter().map(move |&q| s.flat(m, q)))
            .collect()
    }
}

/// Groups indices by eigenvalue; groups are ascending in value and each
/// keeps its smallest member value as representative.
fn eigenvalue_groups(values: &[f64], tol: f64) -> Vec<(f64, Vec<usize>)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for i in order {
        match groups.last_mut() {
            Some((rep, members)) if (values[i] - *rep).abs() <= tol => members.push(i),
            _ => groups.push((values[i], vec![i])),
        }
    }
    for (_, members) in &mut groups {
        members.sort_unstable();
    }
    groups
}

/// One sector per distinct `(M, Q)`, sorted by `(M, Q)`.
pub fn build_sectors(s: &AdditiveStructure) -> Vec<Sector> {
    let alice = eigenvalue_groups(&s.j_a, s.label_tol);
    let bob = eigenvalue_groups(&s.j_b, s.label_tol);
    let mut out = Vec::with_capacity(alice.len() * bob.len());
    for (m_val, m_idx) in &alice {
        for (q_val, q_idx) in &bob {
            out.push(Sector {
                alice_value: *m_val,
                bob_value: *q_val,
                alice_indices: m_idx.clone(),
                bob_indices: q_idx.clone(),
            });
        }
    }
    out
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: Hermitian,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    /// Checks the invariants; slightly non-Hermitian input within `tol.herm`
    /// is symmetrized.
    pub fn with_tolerances(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        if matrix
            .as_slice()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let mat = Hermitian::symmetrized(matrix, tol.herm)?;
        let trace: f64 = (0..mat.dim()).map(|i| mat.matrix()[(i, i)].re).sum();
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::BadTrace {
                trace,
                tol: tol.trace,
            });
        }
        let min_eigenvalue = eigenvalues_hermitian(&mat).first().copied().unwrap_or(0.0);
        if min_eigenvalue < -tol.psd {
            return Err(Error::NotPositive {
                min_eigenvalue,
                tol: tol.psd,
            });
        }
        Ok(Self { mat })
    }

    pub fn matrix(&self) -> &CMatrix {
        self.mat.matrix()
    }

    pub fn hermitian(&self) -> &Hermitian {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex {
        self.mat.matrix()[(i, j)]
    }
}

/// A non-vanishing entry sitting where the additive constraint forbids it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextureViolation {
    pub row: usize,
    pub col: usize,
    pub value: Complex,
    /// `M + P` of the row basis pair.
    pub row_total: f64,
    /// `N + Q` of the column basis pair.
    pub col_total: f64,
}

pub fn validate_additivity(
    rho: &DensityMatrix,
    s: &AdditiveStructure,
    tol: &Tolerances,
) -> Result<Vec<TextureViolation>> {
    s.check_dim(rho.dim())?;
    let n = rho.dim();
    let total = |k: usize| {
        let (m, p) = s.split(k);
        s.j_a[m] + s.j_b[p]
    };
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let value = rho.entry(i, j);
            if value.norm() <= tol.zero {
                continue;
            }
            if !s.flat_on_shell(i) || !s.flat_on_shell(j) {
                out.push(TextureViolation {
                    row: i,
                    col: j,
                    value,
                    row_total: total(i),
                    col_total: total(j),
                });
            }
        }
    }
    Ok(out)
}

pub(crate) fn require_texture(
    rho: &DensityMatrix,
    s: &AdditiveStructure,
    tol: &Tolerances,
) -> Result<()> {
    let violations = validate_additivity(rho, s, tol)?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::TextureViolation {
            count: violations.len(),
        })
    }
}

/// Principal block of `ρ^{T₂}` on an on-shell sector (`M + Q = J`).
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBlock {
    pub sector: Sector,
    pub indices: Vec<usize>,
    pub matrix: CMatrix,
}

impl SectorBlock {
    pub fn trace(&self) -> f64 {
        (0..self.matrix.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }
}

/// Principal block of `ρ^{T₂}` pairing an off-shell sector `(M, Q)` with
/// its partner `(J − Q, J − M)`. Both diagonal sub-blocks vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossBlock {
    pub first: Sector,
    pub second: Sector,
    /// Indices of `first` followed by those of `second`.
    pub indices: Vec<usize>,
    pub matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PtBlocks {
    pub dim: usize,
    pub sector_blocks: Vec<SectorBlock>,
    pub cross_blocks: Vec<CrossBlock>,
}

impl PtBlocks {
    /// Places every block back into a zero matrix.
    pub fn reassemble(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim);
        let blocks = self
            .sector_blocks
            .iter()
            .map(|b| (&b.indices, &b.matrix))
            .chain(self.cross_blocks.iter().map(|b| (&b.indices, &b.matrix)));
        for (indices, matrix) in blocks {
            for (a, &i) in indices.iter().enumerate() {
                for (b, &j) in indices.iter().enumerate() {
                    out.set(i, j, matrix[(a, b)]);
                }
            }
        }
        out
    }
}

pub fn pt_block_decomposition(
    rho: &DensityMatrix,
    s: &AdditiveStructure,
    tol: &Tolerances,
) -> Result<PtBlocks> {
    require_texture(rho, s, tol)?;
    let pt = partial_transpose(rho.matrix(), s.d_a(), s.d_b())?;
    let sectors = build_sectors(s);

    let mut sector_blocks = Vec::new();
    let mut cross_blocks = Vec::new();
    for (idx, sector) in sectors.iter().enumerate() {
        if sector.is_on_shell(s) {
            let indices = sector.flat_indices(s);
            let matrix = pt.principal_submatrix(&indices);
            sector_blocks.push(SectorBlock {
                sector: sector.clone(),
                indices,
                matrix,
            });
            continue;
        }
        let partner = sectors.iter().enumerate().find(|(_, o)| {
            s.same_label(o.alice_value, s.j_total - sector.bob_value)
                && s.same_label(o.bob_value, s.j_total - sector.alice_value)
        });
        if let Some((pidx, other)) = partner {
            if pidx <= idx {
                continue;
            }
            let mut indices = sector.flat_indices(s);
            indices.extend(other.flat_indices(s));
            let matrix = pt.principal_submatrix(&indices);
            cross_blocks.push(CrossBlock {
                first: sector.clone(),
                second: other.clone(),
                indices,
                matrix,
            });
        }
    }
    Ok(PtBlocks {
        dim: rho.dim(),
        sector_blocks,
        cross_blocks,
    })
}
