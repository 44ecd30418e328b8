//! Small dense complex matrices.
//!
//! Everything here works on row-major `dim × dim` storage. Bipartite
//! operators use the Alice-major flat index `k = m * d_b + p`, so that
//! `kron(a, b)[(m*d_b + p, n*d_b + q)] = a[(m, n)] * b[(p, q)]`.

mod jacobi;

use std::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use jacobi::{eigenvalues_hermitian, eigenvalues_hermitian_with, JacobiConfig};

pub type Complex = Complex64;

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);
pub const I: Complex = Complex::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a
    /// perfect square.
    pub fn from_row_major(entries: Vec<Complex>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_rows(rows: &[Vec<Complex>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                Complex::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: Complex) {
        self.data[i * self.dim + j] = value;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex, Complex) -> Complex) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_dim(self.dim, other.dim)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `max_ij |a_ij - conj(a_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Principal submatrix on the given (ordered) index list.
    pub fn principal_submatrix(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), |a, b| self[(indices[a], indices[b])])
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex> {
        check_dim(self.dim, other.dim)?;
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        Ok(acc)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex;

    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.dim + j]
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// A matrix known to be Hermitian within a tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, Self::DEFAULT_TOL)
    }

    pub fn with_tolerance(matrix: CMatrix, tol: f64) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian { defect, tol });
        }
        Ok(Self(matrix))
    }

    /// Replaces the matrix by `(A + A†) / 2` after the tolerance check.
    pub fn symmetrized(matrix: CMatrix, tol: f64) -> Result<Self> {
        let checked = Self::with_tolerance(matrix, tol)?;
        let m = &checked.0;
        let half = Complex::new(0.5, 0.0);
        Ok(Self(CMatrix::from_fn(m.dim(), |i, j| {
            (m[(i, j)] + m[(j, i)].conj()) * half
        })))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

impl AsRef<CMatrix> for Hermitian {
    fn as_ref(&self) -> &CMatrix {
        &self.0
    }
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_dim(a.dim, b.dim)?;
    let n = a.dim;
    let mut out = CMatrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a.data[i * n + k];
            if aik == ZERO {
                continue;
            }
            for j in 0..n {
                out.data[i * n + j] += aik * b.data[k * n + j];
            }
        }
    }
    Ok(out)
}

pub fn trace(a: &CMatrix) -> Complex {
    (0..a.dim).map(|i| a[(i, i)]).sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let db = b.dim;
    CMatrix::from_fn(a.dim * db, |r, c| a[(r / db, c / db)] * b[(r % db, c % db)])
}

/// Block-diagonal `a ⊕ b`.
pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let da = a.dim;
    CMatrix::from_fn(da + b.dim, |i, j| match (i < da, j < da) {
        (true, true) => a[(i, j)],
        (false, false) => b[(i - da, j - da)],
        _ => ZERO,
    })
}

/// Transposes Bob's index: `out[(m,q),(n,p)] = rho[(m,p),(n,q)]`.
pub fn partial_transpose(rho: &CMatrix, d_a: usize, d_b: usize) -> Result<CMatrix> {
    check_dim(d_a * d_b, rho.dim)?;
    Ok(CMatrix::from_fn(rho.dim, |r, c| {
        let (m, q) = (r / d_b, r % d_b);
        let (n, p) = (c / d_b, c % d_b);
        rho[(m * d_b + p, n * d_b + q)]
    }))
}

/// Partial trace over one party, returning the reduced operator.
pub fn partial_trace(rho: &CMatrix, d_a: usize, d_b: usize, keep_alice: bool) -> Result<CMatrix> {
    check_dim(d_a * d_b, rho.dim)?;
    Ok(if keep_alice {
        CMatrix::from_fn(d_a, |m, n| {
            (0..d_b).map(|p| rho[(m * d_b + p, n * d_b + p)]).sum()
        })
    } else {
        CMatrix::from_fn(d_b, |p, q| {
            (0..d_a).map(|m| rho[(m * d_b + p, m * d_b + q)]).sum()
        })
    })
}

pub mod pauli {
    use super::{CMatrix, Complex, I, ONE, ZERO};

    pub fn x() -> CMatrix {
        CMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap()
    }

    pub fn y() -> CMatrix {
        CMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap()
    }

    pub fn z() -> CMatrix {
        CMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]).unwrap()
    }

    /// `v · σ` for a real 3-vector.
    pub fn dot(v: [f64; 3]) -> CMatrix {
        let [vx, vy, vz] = v;
        CMatrix::from_rows(&[
            vec![Complex::new(vz, 0.0), Complex::new(vx, -vy)],
            vec![Complex::new(vx, vy), Complex::new(-vz, 0.0)],
        ])
        .unwrap()
    }
}
