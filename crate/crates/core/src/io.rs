//! JSON basis files.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "d": 2,
//!   "schmidt": [0.894427190999916, 0.4472135954999579],
//!   "generators": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]], ...]
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays. Floats are written in shortest round-trip form, so a save/load
//! cycle reproduces every value bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bipartite::SchmidtVector;
use crate::error::{Error, Result};
use crate::linalg::{c, Matrix, Tolerance};
use crate::lunmeb::BasisCandidate;

pub const FORMAT_VERSION: u32 = 1;

pub type MatrixRepr = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFile {
    pub format_version: u32,
    pub d: usize,
    pub schmidt: Vec<f64>,
    pub generators: Vec<MatrixRepr>,
}

pub fn matrix_to_repr(m: &Matrix) -> MatrixRepr {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_repr(repr: &MatrixRepr) -> Result<Matrix> {
    let rows = repr
        .iter()
        .map(|row| row.iter().map(|&[re, im]| c(re, im)).collect())
        .collect();
    Matrix::from_rows(rows).map_err(|e| Error::Format(e.to_string()))
}

impl BasisFile {
    pub fn from_candidate(candidate: &BasisCandidate) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            d: candidate.d(),
            schmidt: candidate.seed().coefficients().to_vec(),
            generators: candidate.generators().iter().map(matrix_to_repr).collect(),
        }
    }

    /// Structural checks only: version, dimensions and shapes.
    fn check_structure(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format_version {}, expected {FORMAT_VERSION}",
                self.format_version
            )));
        }
        if self.d == 0 || self.schmidt.len() != self.d {
            return Err(Error::Format(format!(
                "d = {} but {} Schmidt coefficients",
                self.d,
                self.schmidt.len()
            )));
        }
        if self.generators.is_empty() {
            return Err(Error::Format("no generators".into()));
        }
        for (i, g) in self.generators.iter().enumerate() {
            if g.len() != self.d || g.iter().any(|row| row.len() != self.d) {
                return Err(Error::Format(format!(
                    "generator {i} is not {0}x{0}",
                    self.d
                )));
            }
        }
        Ok(())
    }

    /// Rebuilds the candidate. Structural problems and an unnormalised seed
    /// are [`Error::Format`]; non-unitary generators surface as
    /// [`Error::NonUnitary`].
    pub fn to_candidate(&self, tol: &Tolerance) -> Result<BasisCandidate> {
        self.check_structure()?;
        let seed = SchmidtVector::with_tolerance(self.schmidt.clone(), tol.verify_tol)
            .map_err(|e| Error::Format(e.to_string()))?;
        let generators = self
            .generators
            .iter()
            .map(matrix_from_repr)
            .collect::<Result<Vec<_>>>()?;
        BasisCandidate::from_generators(seed, generators, tol)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("basis file serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}
