use serde::{Deserialize, Serialize};

use super::scalar::PadicScalar;
use crate::error::{Error, Result};

/// Polynomial with p-adic coefficients in ascending degree. Coefficients
/// that are indistinguishable from zero stay in the list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicPoly {
    pub coeffs: Vec<PadicScalar>,
}

impl PadicPoly {
    pub fn new(coeffs: Vec<PadicScalar>) -> Result<Self> {
        if let Some(first) = coeffs.first() {
            if coeffs.iter().any(|c| c.p() != first.p()) {
                return Err(Error::PrimeMismatch(first.p(), 0));
            }
        }
        Ok(PadicPoly { coeffs })
    }

    pub fn from_i64s(p: u64, coeffs: &[i64], rel: u32) -> Result<Self> {
        let coeffs = coeffs
            .iter()
            .map(|&c| PadicScalar::from_i64(p, c, rel))
            .collect::<Result<Vec<_>>>()?;
        Ok(PadicPoly { coeffs })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn p(&self) -> Option<u64> {
        self.coeffs.first().map(|c| c.p())
    }

    /// Index of the last coefficient that is not exactly zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_exact_zero())
    }

    pub fn mul(&self, other: &PadicPoly) -> Result<PadicPoly> {
        if self.is_empty() || other.is_empty() {
            return Ok(PadicPoly { coeffs: vec![] });
        }
        let p = self.coeffs[0].p();
        let mut out = vec![PadicScalar::exact_zero(p); self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b)?)?;
            }
        }
        Ok(PadicPoly { coeffs: out })
    }

    /// Keep coefficients of degree <= t.
    pub fn truncate(&self, t: usize) -> PadicPoly {
        PadicPoly { coeffs: self.coeffs.iter().take(t + 1).cloned().collect() }
    }
}
