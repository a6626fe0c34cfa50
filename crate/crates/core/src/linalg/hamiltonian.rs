use faer::{Mat, MatRef, Side};

use super::{matmul, Operator, StateVector, C64};
use crate::error::{Error, Result};
use crate::tol;

/// A time-independent Hamiltonian held in spectral form `H = V Λ V†` (ħ = 1).
///
/// Evolution of vectors never builds `e^{-iHt}`: a block of columns is moved
/// into the eigenbasis, multiplied by phases and moved back, which costs two
/// matrix products. A `None` eigenbasis means `H` is diagonal in the
/// computational basis, in which case evolution is exact phase multiplication.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    eigenvalues: Vec<f64>,
    basis: Option<Mat<C64>>,
    matrix: Option<Operator>,
}

impl Hamiltonian {
    /// Diagonalizes `h`. Rejects operators that are not hermitian within 1e-12.
    pub fn new(h: &Operator) -> Result<Self> {
        h.ensure_hermitian(tol::EQUALITY)?;
        let matrix = Some(h.clone().hermitian());
        if h.is_diagonal() {
            let eigenvalues = (0..h.dim()).map(|i| h.get(i, i).re).collect();
            return Ok(Self { eigenvalues, basis: None, matrix });
        }
        let evd = h.mat().self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let eigenvalues = (0..h.dim()).map(|i| evd.S()[i].re).collect();
        Ok(Self { eigenvalues, basis: Some(evd.U().to_owned()), matrix })
    }

    pub fn zero(dim: usize) -> Self {
        Self { eigenvalues: vec![0.0; dim], basis: None, matrix: None }
    }

    /// Builds `V diag(eigenvalues) V†` from its parts without forming the
    /// dense matrix. The columns of `eigenvectors` must be orthonormal; this is
    /// probed with a few fixed vectors at `O(d²)` cost.
    pub fn from_spectrum(eigenvalues: Vec<f64>, eigenvectors: Mat<C64>) -> Result<Self> {
        let d = eigenvalues.len();
        if eigenvectors.nrows() != d || eigenvectors.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: eigenvectors.nrows() });
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("non-finite eigenvalue".into()));
        }
        let probe = Mat::<C64>::from_fn(d, 3, |i, j| {
            let x = ((i * (2 * j + 3) + 7 * j) % 11) as f64 - 5.0;
            C64::new(x, (j as f64) - 1.0)
        });
        let round_trip = matmul(eigenvectors.adjoint(), matmul(eigenvectors.as_ref(), probe.as_ref()).as_ref());
        let scale = super::operator::max_abs(probe.as_ref());
        let defect = super::operator::max_abs((&round_trip - &probe).as_ref()) / scale;
        if defect > tol::STRUCTURAL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self { eigenvalues, basis: Some(eigenvectors), matrix: None })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// The dense matrix of `H`.
    pub fn matrix(&self) -> Operator {
        if let Some(m) = &self.matrix {
            return m.clone();
        }
        let diag: Vec<C64> = self.eigenvalues.iter().map(|&v| C64::new(v, 0.0)).collect();
        match &self.basis {
            None => Operator::diagonal(&diag).hermitian(),
            Some(v) => Operator::from_mat(sandwich(v.as_ref(), &diag)).hermitian(),
        }
    }

    /// All eigenvalues coincide, so evolution is a global phase.
    fn is_scalar(&self) -> bool {
        let first = self.eigenvalues[0];
        self.eigenvalues.iter().all(|&v| v == first)
    }

    fn phases(&self, t: f64) -> Vec<C64> {
        self.eigenvalues.iter().map(|&v| C64::from_polar(1.0, -v * t)).collect()
    }

    /// `e^{-iHt}`.
    pub fn propagator(&self, t: f64) -> Operator {
        let d = self.dim();
        if t == 0.0 {
            return Operator::identity(d);
        }
        let phases = self.phases(t);
        let u = match &self.basis {
            Some(v) if !self.is_scalar() => Operator::from_mat(sandwich(v.as_ref(), &phases)),
            _ => Operator::diagonal(&phases),
        };
        u.unitary()
    }

    pub fn evolve(&self, psi: &StateVector, t: f64) -> StateVector {
        assert_eq!(psi.dim(), self.dim());
        let out = self.evolve_block(psi.as_column().as_ref(), t);
        StateVector::from_column(out.as_ref(), 0)
    }

    /// `e^{-iHt} B` for a block of column vectors.
    pub(crate) fn evolve_block(&self, block: MatRef<'_, C64>, t: f64) -> Mat<C64> {
        if t == 0.0 {
            return block.to_owned();
        }
        let phases = self.phases(t);
        match &self.basis {
            Some(_) if self.is_scalar() => scale_rows(block.to_owned(), |_| phases[0]),
            None => scale_rows(block.to_owned(), |i| phases[i]),
            Some(v) => {
                let coeffs = scale_rows(matmul(v.adjoint(), block), |i| phases[i]);
                matmul(v.as_ref(), coeffs.as_ref())
            }
        }
    }
}

fn scale_rows(mut m: Mat<C64>, factor: impl Fn(usize) -> C64) -> Mat<C64> {
    for j in 0..m.ncols() {
        for (i, x) in m.col_as_slice_mut(j).iter_mut().enumerate() {
            *x *= factor(i);
        }
    }
    m
}

/// `V diag(d) V†`.
fn sandwich(v: MatRef<'_, C64>, diag: &[C64]) -> Mat<C64> {
    let mut vd = v.to_owned();
    for j in 0..vd.ncols() {
        for x in vd.col_as_slice_mut(j) {
            *x *= diag[j];
        }
    }
    matmul(vd.as_ref(), v.adjoint())
}

/// `e^{-iHt}` for a hermitian `h` (ħ = 1).
pub fn propagator(h: &Operator, t: f64) -> Result<Operator> {
    Ok(Hamiltonian::new(h)?.propagator(t))
}

/// Heisenberg-picture projector `e^{+iHt} P₀ e^{-iHt}`.
pub fn heisenberg_projector(p0: &Operator, h: &Operator, t: f64) -> Result<Operator> {
    p0.ensure_projector()?;
    if t == 0.0 {
        return Ok(p0.clone().projector());
    }
    let u = propagator(h, t)?;
    Ok((&(&u.adjoint() * p0) * &u).projector())
}
