//! Generator-file JSON: `{"q", "p", "e", "n", "generators": [[[codes]]]}`.
//!
//! Matrices are nested arrays of integer element codes, row-major. Unknown
//! keys are ignored, so a serialized counterexample bundle loads directly.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::field::{Field, FieldError};
use crate::matrix::{MatError, Matrix};

#[derive(Debug, thiserror::Error)]
pub enum GenFileError {
    #[error("invalid generator file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error("generator {index} is {rows} rows, expected n = {n}")]
    WrongDimension { index: usize, rows: usize, n: usize },
    #[error("generator file lists no generators")]
    Empty,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub q: u64,
    pub p: u64,
    pub e: u32,
    pub n: usize,
    pub generators: Vec<Vec<Vec<u64>>>,
}

impl GeneratorFile {
    pub fn from_generators(gens: &[Matrix]) -> GeneratorFile {
        let field = gens[0].field();
        GeneratorFile {
            q: field.q(),
            p: field.p(),
            e: field.e(),
            n: gens[0].n(),
            generators: gens.iter().map(Matrix::rows_codes).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<GeneratorFile, GenFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    /// Rebuilds the field and matrices, validating the designation, every
    /// element code, and the dimensions.
    pub fn to_matrices(&self) -> Result<(Arc<Field>, Vec<Matrix>), GenFileError> {
        if self.generators.is_empty() {
            return Err(GenFileError::Empty);
        }
        let field = Arc::new(Field::from_designation(
            Some(self.q),
            Some(self.p),
            Some(self.e),
        )?);
        let mut out = Vec::with_capacity(self.generators.len());
        for (index, rows) in self.generators.iter().enumerate() {
            if rows.len() != self.n {
                return Err(GenFileError::WrongDimension {
                    index,
                    rows: rows.len(),
                    n: self.n,
                });
            }
            out.push(Matrix::from_rows_codes(field.clone(), rows)?);
        }
        Ok((field, out))
    }
}
