use crate::error::{Error, Result};

/// Ordered tensor-factor dimensions of a composite Hilbert space, e.g.
/// `[system, apparatus, environment]`. The last factor is least significant
/// in the computational basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSignature {
    factors: Vec<usize>,
}

impl FactorSignature {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Signature("no factors".into()));
        }
        if factors.contains(&0) {
            return Err(Error::Signature(format!("zero-dimensional factor in {factors:?}")));
        }
        factors
            .iter()
            .try_fold(1usize, |acc, &f| acc.checked_mul(f))
            .ok_or_else(|| Error::Signature(format!("dimension of {factors:?} overflows")))?;
        Ok(Self { factors })
    }

    /// A single-factor signature.
    pub fn flat(dim: usize) -> Self {
        Self { factors: vec![dim] }
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().product()
    }

    /// Splits a flat basis index into per-factor digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, &f) in out.iter_mut().zip(&self.factors).rev() {
            *slot = index % f;
            index /= f;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        assert_eq!(digits.len(), self.factors.len());
        digits.iter().zip(&self.factors).fold(0, |acc, (&d, &f)| {
            assert!(d < f, "digit {d} out of range for factor of dim {f}");
            acc * f + d
        })
    }
}
