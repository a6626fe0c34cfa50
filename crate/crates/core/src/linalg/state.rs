use std::ops::{Add, Sub};

use faer::Mat;

use super::{Operator, C64};
use crate::error::{Error, Result};
use crate::tol;

/// A (not necessarily normalized) vector in a finite Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() || amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState);
        }
        Ok(Self { amps })
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized_from(amps: Vec<C64>) -> Result<Self> {
        Self::new(amps)?.normalized()
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "state dimension must be positive");
        Self { amps: vec![C64::new(0.0, 0.0); dim] }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut s = Self::zeros(dim);
        s.amps[index] = C64::new(1.0, 0.0);
        s
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= tol::NORMALIZED
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product of mismatched dimensions");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { amps: self.amps.iter().map(|a| a * k).collect() }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `|self⟩⟨self|`.
    pub fn density(&self) -> Operator {
        let d = self.dim();
        Operator::from_mat(Mat::from_fn(d, d, |i, j| self.amps[i] * self.amps[j].conj())).hermitian()
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector { amps }
    }

    pub(crate) fn as_column(&self) -> Mat<C64> {
        Mat::from_fn(self.dim(), 1, |i, _| self.amps[i])
    }

    pub(crate) fn from_column(m: faer::MatRef<'_, C64>, col: usize) -> Self {
        Self { amps: (0..m.nrows()).map(|i| m[(i, col)]).collect() }
    }
}

impl Add for &StateVector {
    type Output = StateVector;
    fn add(self, rhs: &StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.dim());
        StateVector { amps: self.amps.iter().zip(&rhs.amps).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &StateVector {
    type Output = StateVector;
    fn sub(self, rhs: &StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.dim());
        StateVector { amps: self.amps.iter().zip(&rhs.amps).map(|(a, b)| a - b).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_nan() {
        assert_eq!(StateVector::new(vec![]), Err(Error::InvalidState));
        assert_eq!(StateVector::new(vec![C64::new(f64::NAN, 0.0)]), Err(Error::InvalidState));
        assert!(StateVector::zeros(3).normalized().is_err());
    }

    #[test]
    fn tensor_orders_left_factor_major() {
        let a = StateVector::basis(2, 1);
        let b = StateVector::basis(3, 2);
        assert_eq!(a.tensor(&b), StateVector::basis(6, 5));
    }

    #[test]
    fn inner_is_antilinear_in_bra() {
        let a = StateVector::new(vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)]).unwrap();
        let b = StateVector::basis(2, 0);
        assert_eq!(a.inner(&b), C64::new(0.0, -1.0));
    }
}
