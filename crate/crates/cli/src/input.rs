use std::path::Path;

use addobs_core::linalg::{CMatrix, Complex};
use addobs_core::structure::{AdditiveStructure, DensityMatrix};
use addobs_core::{Error, Tolerances};
use serde::{Deserialize, Serialize};

use crate::Failure;

/// A matrix entry, either `{"re": .., "im": ..}` or a bare real number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Complex {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    Real(f64),
}

impl From<Entry> for Complex {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Complex { re, im } => Complex::new(re, im),
            Entry::Real(re) => Complex::new(re, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InputDocument {
    pub dim_a: usize,
    pub dim_b: usize,
    pub j_a: Vec<f64>,
    pub j_b: Vec<f64>,
    pub j_total: f64,
    pub matrix: Vec<Vec<Entry>>,
}

pub struct Loaded {
    pub rho: DensityMatrix,
    pub structure: AdditiveStructure,
}

impl InputDocument {
    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("cannot parse {}: {e}", path.display())))
    }

    /// Shape problems are usage errors; a matrix that is not a density
    /// matrix is a domain failure.
    pub fn load(self, tol: &Tolerances) -> Result<Loaded, Failure> {
        if self.j_a.len() != self.dim_a || self.j_b.len() != self.dim_b {
            return Err(Failure::Usage(format!(
                "label lists have lengths {} and {}, expected dimA = {} and dimB = {}",
                self.j_a.len(),
                self.j_b.len(),
                self.dim_a,
                self.dim_b
            )));
        }
        let dim = self.dim_a * self.dim_b;
        if self.matrix.len() != dim || self.matrix.iter().any(|row| row.len() != dim) {
            return Err(Failure::Usage(format!("matrix must be {dim}x{dim}")));
        }
        let structure = AdditiveStructure::new(self.j_a, self.j_b, self.j_total)
            .map_err(|e| Failure::Usage(e.to_string()))?;
        let rows: Vec<Vec<Complex>> = self
            .matrix
            .into_iter()
            .map(|row| row.into_iter().map(Complex::from).collect())
            .collect();
        let matrix = CMatrix::from_rows(&rows).map_err(|e| Failure::Usage(e.to_string()))?;
        let rho = DensityMatrix::with_tolerances(matrix, tol).map_err(|e| match e {
            Error::InvalidInput(msg) => Failure::Usage(msg),
            other => Failure::Domain(other.to_string()),
        })?;
        Ok(Loaded { rho, structure })
    }
}
