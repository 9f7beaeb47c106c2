//! JSON documents for frequency data and exp-trig polynomials.
//!
//! Complex numbers are stored as `[re, im]` pairs and matrices as row-major
//! entry lists, so documents stay readable and diff-able.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{AlgebraError, ExpTrigPoly, FrequencyVector, MultiIndex};

/// Serialized frequency vector, including its certified small-divisor data.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FrequencyVectorDoc {
    pub omega: Vec<f64>,
    pub c_d: f64,
    pub nu: f64,
    pub resonance_tol: f64,
    pub mode_cap: u32,
}

impl FrequencyVectorDoc {
    pub fn from_freq(freq: &FrequencyVector) -> Self {
        Self {
            omega: freq.omega().to_vec(),
            c_d: freq.c_d(),
            nu: freq.nu(),
            resonance_tol: freq.resonance_tol(),
            mode_cap: freq.mode_cap(),
        }
    }

    pub fn into_freq(self) -> Result<FrequencyVector, AlgebraError> {
        FrequencyVector::with_constants(
            self.omega,
            self.c_d,
            self.nu,
            self.resonance_tol,
            self.mode_cap,
        )
    }
}

/// One canonical term `coeff * exp((i <alpha, omega> + lambda) tau)`.
///
/// `coeff` is the `dim x dim` matrix in row-major order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermDoc {
    pub alpha: Vec<i32>,
    pub lambda: [f64; 2],
    pub coeff: Vec<[f64; 2]>,
}

/// Serialized exp-trig polynomial.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExpTrigPolyDoc {
    pub frequency: FrequencyVectorDoc,
    pub dim: usize,
    pub terms: Vec<TermDoc>,
}

/// Serialized complex matrix, row-major.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &DMatrix<C64>) -> Self {
        let mut entries = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                entries.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            entries,
        }
    }

    pub fn into_matrix(self) -> Result<DMatrix<C64>, AlgebraError> {
        if self.entries.len() != self.rows * self.cols {
            return Err(AlgebraError::Document(format!(
                "matrix document claims {}x{} but carries {} entries",
                self.rows,
                self.cols,
                self.entries.len()
            )));
        }
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let [re, im] = self.entries[i * self.cols + j];
                m[(i, j)] = C64::new(re, im);
            }
        }
        Ok(m)
    }
}

impl ExpTrigPoly {
    /// Converts to a serializable document.
    pub fn to_doc(&self) -> ExpTrigPolyDoc {
        let dim = self.dim();
        let mut terms = Vec::with_capacity(self.term_count());
        for (alpha, lambda, coeff) in self.terms() {
            let mut entries = Vec::with_capacity(dim * dim);
            for i in 0..dim {
                for j in 0..dim {
                    entries.push([coeff[(i, j)].re, coeff[(i, j)].im]);
                }
            }
            terms.push(TermDoc {
                alpha: alpha.as_slice().to_vec(),
                lambda: [lambda.re, lambda.im],
                coeff: entries,
            });
        }
        ExpTrigPolyDoc {
            frequency: FrequencyVectorDoc::from_freq(self.freq()),
            dim,
            terms,
        }
    }

    /// Rebuilds a polynomial from a document, revalidating every term.
    pub fn from_doc(doc: ExpTrigPolyDoc) -> Result<Self, AlgebraError> {
        let freq = doc.frequency.into_freq()?;
        let dim = doc.dim;
        let mut triples = Vec::with_capacity(doc.terms.len());
        for term in doc.terms {
            if term.coeff.len() != dim * dim {
                return Err(AlgebraError::Document(format!(
                    "term coefficient carries {} entries, expected {}",
                    term.coeff.len(),
                    dim * dim
                )));
            }
            let coeff = DMatrix::from_fn(dim, dim, |i, j| {
                let [re, im] = term.coeff[i * dim + j];
                C64::new(re, im)
            });
            triples.push((term.alpha, C64::new(term.lambda[0], term.lambda[1]), coeff));
        }
        Self::from_terms(&freq, dim, triples)
    }

    /// Serializes to pretty JSON.
    pub fn to_json(&self) -> Result<String, AlgebraError> {
        Ok(serde_json::to_string_pretty(&self.to_doc())?)
    }

    /// Deserializes from JSON produced by [`Self::to_json`].
    pub fn from_json(text: &str) -> Result<Self, AlgebraError> {
        let doc: ExpTrigPolyDoc = serde_json::from_str(text)?;
        Self::from_doc(doc)
    }
}

// `MultiIndex` only travels inside term documents, but a direct conversion
// keeps call sites tidy.
impl MultiIndex {
    pub fn to_vec(&self) -> Vec<i32> {
        self.as_slice().to_vec()
    }
}
