use std::ops::{Add, Mul, Sub};

use faer::{Mat, MatRef, Side};

use super::{matmul, FactorSignature, StateVector, C64};
use crate::error::{Error, Result};
use crate::tol;

/// Structural claims attached to an operator. They are recorded when an
/// operator is built and only checked when [`Operator::verify`] is called.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tags {
    pub hermitian: bool,
    pub unitary: bool,
    pub projector: bool,
}

/// A dense complex square matrix.
#[derive(Debug, Clone)]
pub struct Operator {
    mat: Mat<C64>,
    tags: Tags,
}

impl PartialEq for Operator {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

impl Operator {
    /// Wraps a square matrix. Panics if the matrix is not square.
    pub fn from_mat(mat: Mat<C64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "operators are square");
        assert!(mat.nrows() > 0, "operator dimension must be positive");
        Self { mat, tags: Tags::default() }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare { rows: n, cols: bad.len() });
        }
        Ok(Self::from_mat(Mat::from_fn(n, n, |i, j| rows[i][j])))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> =
            rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_mat(Mat::identity(dim, dim)).with_tags(Tags { hermitian: true, unitary: true, projector: true })
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_mat(Mat::zeros(dim, dim))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let d = entries.len();
        Self::from_mat(Mat::from_fn(d, d, |i, j| if i == j { entries[i] } else { C64::new(0.0, 0.0) }))
    }

    /// Projector onto the span of the given computational basis states.
    pub fn basis_projector(dim: usize, indices: &[usize]) -> Self {
        let mut diag = vec![C64::new(0.0, 0.0); dim];
        for &i in indices {
            diag[i] = C64::new(1.0, 0.0);
        }
        Self::diagonal(&diag).hermitian().projector()
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Self {
        let (k, b) = (ket.amplitudes(), bra.amplitudes());
        assert_eq!(k.len(), b.len());
        Self::from_mat(Mat::from_fn(k.len(), k.len(), |i, j| k[i] * b[j].conj()))
    }

    pub fn with_tags(mut self, tags: Tags) -> Self {
        self.tags = tags;
        self
    }

    pub fn hermitian(mut self) -> Self {
        self.tags.hermitian = true;
        self
    }

    pub fn unitary(mut self) -> Self {
        self.tags.unitary = true;
        self
    }

    pub fn projector(mut self) -> Self {
        self.tags.projector = true;
        self.tags.hermitian = true;
        self
    }

    pub fn tags(&self) -> Tags {
        self.tags
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn mat(&self) -> MatRef<'_, C64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<C64> {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        let tags = Tags { hermitian: self.tags.hermitian, unitary: self.tags.unitary, projector: self.tags.projector };
        Self { mat: self.mat.adjoint().to_owned(), tags }
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        assert_eq!(self.dim(), psi.dim(), "operator/state dimension mismatch");
        let out = matmul(self.mat(), psi.as_column().as_ref());
        StateVector::from_column(out.as_ref(), 0)
    }

    pub fn scale(&self, k: C64) -> Self {
        Self::from_mat(Mat::from_fn(self.dim(), self.dim(), |i, j| self.mat[(i, j)] * k))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        max_abs(self.mat())
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let d = self.dim();
        let mut m = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                m = m.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        m
    }

    /// `max |A - A†|`.
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for j in 0..d {
            for i in 0..=j {
                m = m.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        m
    }

    /// `max |A†A - I|`.
    pub fn unitary_defect(&self) -> f64 {
        let prod = matmul(self.mat.adjoint(), self.mat());
        max_abs_diff_identity(prod.as_ref())
    }

    /// `max |A² - A|`.
    pub fn idempotency_defect(&self) -> f64 {
        let sq = matmul(self.mat(), self.mat());
        Operator::from_mat(sq).max_abs_diff(self)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= tol::EQUALITY
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary_defect() <= tol::STRUCTURAL
    }

    pub fn is_projector(&self) -> bool {
        self.idempotency_defect() <= tol::STRUCTURAL && self.hermitian_defect() <= tol::STRUCTURAL
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|j| (0..d).all(|i| i == j || self.mat[(i, j)] == C64::new(0.0, 0.0)))
    }

    /// Checks every asserted tag against the tolerance table.
    pub fn verify(&self) -> Result<()> {
        if self.tags.hermitian {
            self.ensure_hermitian(tol::EQUALITY)?;
        }
        if self.tags.unitary {
            let defect = self.unitary_defect();
            if defect > tol::STRUCTURAL {
                return Err(Error::NotUnitary { defect });
            }
        }
        if self.tags.projector {
            self.ensure_projector()?;
        }
        Ok(())
    }

    pub(crate) fn ensure_hermitian(&self, tolerance: f64) -> Result<()> {
        let asymmetry = self.hermitian_defect();
        if asymmetry > tolerance {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(())
    }

    pub(crate) fn ensure_projector(&self) -> Result<()> {
        let idempotency = self.idempotency_defect();
        let asymmetry = self.hermitian_defect();
        if idempotency > tol::STRUCTURAL || asymmetry > tol::STRUCTURAL {
            return Err(Error::NotProjector { idempotency, asymmetry });
        }
        Ok(())
    }

    /// Eigenvalues of a hermitian operator in nondecreasing order.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        self.ensure_hermitian(tol::STRUCTURAL)?;
        let vals = self
            .mat
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        Ok(vals)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &Operator) -> Operator {
        let (a, b) = (self.dim(), other.dim());
        let mut out = Mat::<C64>::zeros(a * b, a * b);
        faer::linalg::kron::kron(out.as_mut(), self.mat(), other.mat());
        let tags = Tags {
            hermitian: self.tags.hermitian && other.tags.hermitian,
            unitary: self.tags.unitary && other.tags.unitary,
            projector: self.tags.projector && other.tags.projector,
        };
        Operator { mat: out, tags }
    }

    /// Traces out every factor not listed in `keep`. The kept factors stay in
    /// signature order regardless of the order of `keep`.
    pub fn partial_trace(&self, sig: &FactorSignature, keep: &[usize]) -> Result<Operator> {
        if sig.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: sig.dim(), found: self.dim() });
        }
        let factors = sig.factors();
        let mut kept = vec![false; factors.len()];
        for &k in keep {
            if k >= factors.len() {
                return Err(Error::Signature(format!("factor index {k} out of range for {} factors", factors.len())));
            }
            kept[k] = true;
        }
        let kept_dims: Vec<usize> = factors.iter().zip(&kept).filter(|(_, &k)| k).map(|(&d, _)| d).collect();
        let traced_dims: Vec<usize> = factors.iter().zip(&kept).filter(|(_, &k)| !k).map(|(&d, _)| d).collect();
        let dk: usize = kept_dims.iter().product();
        let dt: usize = traced_dims.iter().product();

        // full index = Σ digit_f · stride_f over the signature's mixed radix
        let mut strides = vec![1usize; factors.len()];
        for f in (0..factors.len().saturating_sub(1)).rev() {
            strides[f] = strides[f + 1] * factors[f + 1];
        }
        let compose = |kept_idx: usize, traced_idx: usize| -> usize {
            let (mut ki, mut ti) = (kept_idx, traced_idx);
            let mut full = 0;
            for f in (0..factors.len()).rev() {
                let digit = if kept[f] {
                    let d = ki % factors[f];
                    ki /= factors[f];
                    d
                } else {
                    let d = ti % factors[f];
                    ti /= factors[f];
                    d
                };
                full += digit * strides[f];
            }
            full
        };

        let mut out = Mat::<C64>::zeros(dk, dk);
        for e in 0..dt {
            let rows: Vec<usize> = (0..dk).map(|k| compose(k, e)).collect();
            for (j, &fj) in rows.iter().enumerate() {
                for (i, &fi) in rows.iter().enumerate() {
                    out[(i, j)] += self.mat[(fi, fj)];
                }
            }
        }
        let mut result = Operator::from_mat(out);
        result.tags.hermitian = self.tags.hermitian;
        Ok(result)
    }
}

pub(crate) fn max_abs(m: MatRef<'_, C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

fn max_abs_diff_identity(m: MatRef<'_, C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            best = best.max((m[(i, j)] - target).norm());
        }
    }
    best
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator product of mismatched dimensions");
        Operator::from_mat(matmul(self.mat(), rhs.mat()))
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim());
        Operator::from_mat(&self.mat + &rhs.mat)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim());
        Operator::from_mat(&self.mat - &rhs.mat)
    }
}
