//! Versioned JSON documents for complete decompositions.
//!
//! A document stores the forcing field, every iterate of the change of
//! variables, the averaged matrix series, and the defect, keyed by one shared
//! frequency block.  Reloading revalidates all terms and recomputes the
//! contraction constants, so a tampered document cannot smuggle in an
//! inconsistent threshold.

use serde::{Deserialize, Serialize};

use crate::algebra::{
    AlgebraError, ExpTrigPoly, ExpTrigPolyDoc, FrequencyVectorDoc, MatrixDoc, TermDoc,
};

use super::{
    epsilon_threshold, AveragingError, DecompositionConstants, EpsPoly, MicroMacroDecomposition,
    SharpFlatField,
};

/// Current document layout version.
pub const SCHEMA_VERSION: u32 = 1;

/// Serialized `eps` series: term lists indexed by `eps` power.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EpsSeriesDoc {
    pub coeffs: Vec<Vec<TermDoc>>,
}

impl EpsSeriesDoc {
    fn from_series(p: &EpsPoly) -> Self {
        let coeffs = (0..p.degree().map_or(0, |d| d + 1))
            .map(|k| p.coeff(k).to_doc().terms)
            .collect();
        Self { coeffs }
    }

    fn into_series(
        self,
        freq: &FrequencyVectorDoc,
        dim: usize,
    ) -> Result<EpsPoly, AlgebraError> {
        let frequency = freq.clone().into_freq()?;
        let mut out = EpsPoly::zero(&frequency, dim);
        for (k, terms) in self.coeffs.into_iter().enumerate() {
            let poly = poly_from_terms(freq, dim, terms)?;
            out = out.add(&EpsPoly::from_poly(poly).shift_up(k))?;
        }
        Ok(out)
    }
}

fn poly_from_terms(
    freq: &FrequencyVectorDoc,
    dim: usize,
    terms: Vec<TermDoc>,
) -> Result<ExpTrigPoly, AlgebraError> {
    ExpTrigPoly::from_doc(ExpTrigPolyDoc {
        frequency: freq.clone(),
        dim,
        terms,
    })
}

/// Serialized decomposition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionDoc {
    pub schema_version: u32,
    pub frequency: FrequencyVectorDoc,
    pub dim: usize,
    pub order: usize,
    pub contraction: f64,
    pub mu: f64,
    pub smoothness: u32,
    pub forcing: Vec<TermDoc>,
    pub phis: Vec<EpsSeriesDoc>,
    pub averaged: Vec<MatrixDoc>,
    pub defect: EpsSeriesDoc,
    pub constants: DecompositionConstants,
}

impl MicroMacroDecomposition {
    /// Converts to a serializable document.
    pub fn to_doc(&self) -> DecompositionDoc {
        let frequency = FrequencyVectorDoc::from_freq(self.field.freq());
        DecompositionDoc {
            schema_version: SCHEMA_VERSION,
            frequency,
            dim: self.field.dim(),
            order: self.order,
            contraction: self.constants.contraction,
            mu: self.field.mu(),
            smoothness: self.field.smoothness(),
            forcing: self.field.forcing().to_doc().terms,
            phis: self.phis.iter().map(EpsSeriesDoc::from_series).collect(),
            averaged: self.averaged.iter().map(MatrixDoc::from_matrix).collect(),
            defect: EpsSeriesDoc::from_series(&self.defect),
            constants: self.constants,
        }
    }

    /// Rebuilds a decomposition from a document, revalidating terms and
    /// recomputing the contraction constants.
    pub fn from_doc(doc: DecompositionDoc) -> Result<Self, AveragingError> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(AveragingError::Document(format!(
                "unsupported schema version {} (expected {})",
                doc.schema_version, SCHEMA_VERSION
            )));
        }
        if doc.phis.len() != doc.order + 2 {
            return Err(AveragingError::Document(format!(
                "order {} decomposition must store {} iterates, found {}",
                doc.order,
                doc.order + 2,
                doc.phis.len()
            )));
        }
        let forcing = poly_from_terms(&doc.frequency, doc.dim, doc.forcing)?;
        let field = SharpFlatField::with_options(forcing, doc.mu, doc.smoothness)?;
        let constants = epsilon_threshold(&field, doc.order, doc.contraction)?;
        let stored = doc.constants.eps_threshold;
        let drift = (constants.eps_threshold - stored).abs()
            / constants.eps_threshold.max(f64::MIN_POSITIVE);
        if drift > 1e-6 {
            return Err(AveragingError::Document(format!(
                "stored threshold {stored:e} disagrees with the recomputed value {:e}",
                constants.eps_threshold
            )));
        }
        let phis = doc
            .phis
            .into_iter()
            .map(|p| p.into_series(&doc.frequency, doc.dim))
            .collect::<Result<Vec<_>, _>>()?;
        let defect = doc.defect.into_series(&doc.frequency, doc.dim)?;
        let averaged = doc
            .averaged
            .into_iter()
            .map(MatrixDoc::into_matrix)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            field,
            order: doc.order,
            phis,
            averaged,
            defect,
            constants,
        })
    }

    /// Serializes to pretty JSON.
    pub fn to_json(&self) -> Result<String, AveragingError> {
        serde_json::to_string_pretty(&self.to_doc())
            .map_err(|e| AveragingError::Document(e.to_string()))
    }

    /// Deserializes from JSON produced by [`Self::to_json`].
    pub fn from_json(text: &str) -> Result<Self, AveragingError> {
        let doc: DecompositionDoc =
            serde_json::from_str(text).map_err(|e| AveragingError::Document(e.to_string()))?;
        Self::from_doc(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FrequencyVector;
    use num_complex::Complex64 as C64;
    use std::f64::consts::PI;

    fn sample() -> MicroMacroDecomposition {
        let freq = FrequencyVector::mono(PI).unwrap();
        let forcing = ExpTrigPoly::scalar(&freq, C64::new(-1.0, 0.0))
            .add(&ExpTrigPoly::cosine(&freq, 0).unwrap())
            .unwrap();
        let field = SharpFlatField::new(forcing).unwrap();
        MicroMacroDecomposition::build(field, 1, 0.5).unwrap()
    }

    #[test]
    fn decomposition_round_trips_through_json() {
        let d = sample();
        let text = d.to_json().unwrap();
        let e = MicroMacroDecomposition::from_json(&text).unwrap();
        assert_eq!(d.order(), e.order());
        assert!(d.phi().coefficient_distance(e.phi()) < 1e-15);
        assert!(d.defect().coefficient_distance(e.defect()) < 1e-15);
        assert_eq!(d.averaged_series(), e.averaged_series());
        assert_eq!(d.eps_threshold(), e.eps_threshold());
    }

    #[test]
    fn future_schema_versions_are_rejected() {
        let mut doc = sample().to_doc();
        doc.schema_version = 2;
        assert!(matches!(
            MicroMacroDecomposition::from_doc(doc),
            Err(AveragingError::Document(_))
        ));
    }

    #[test]
    fn missing_iterates_are_rejected() {
        let mut doc = sample().to_doc();
        doc.phis.pop();
        assert!(matches!(
            MicroMacroDecomposition::from_doc(doc),
            Err(AveragingError::Document(_))
        ));
    }

    #[test]
    fn tampered_threshold_is_rejected() {
        let mut doc = sample().to_doc();
        doc.constants.eps_threshold *= 10.0;
        assert!(matches!(
            MicroMacroDecomposition::from_doc(doc),
            Err(AveragingError::Document(_))
        ));
    }
}
