use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{matmul, Dynamics, Operator, StateVector, C64};

/// An orthogonal projector, stored either as a set of computational basis
/// states it spans or as a dense matrix.
///
/// Basis projectors are applied in `O(d)` per vector, which is what keeps
/// large chained evaluations cheap when alternatives are diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    repr: Repr,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Basis(Vec<bool>),
    Dense(Operator),
}

impl Projector {
    /// Projector onto `span{|i⟩ : i ∈ indices}`.
    pub fn onto_basis(dim: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = vec![false; dim];
        for i in indices {
            mask[i] = true;
        }
        Self { repr: Repr::Basis(mask) }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        Self { repr: Repr::Basis(mask) }
    }

    /// Projector onto the span of an orthonormal set of vectors.
    pub fn onto_vectors(vectors: &[StateVector]) -> Result<Self> {
        let first = vectors.first().ok_or_else(|| Error::Parameter("no vectors to project onto".into()))?;
        let mut sum = Operator::zeros(first.dim());
        for v in vectors {
            if v.dim() != first.dim() {
                return Err(Error::DimensionMismatch { expected: first.dim(), found: v.dim() });
            }
            sum = &sum + &Operator::outer(v, v);
        }
        Self::from_operator(sum)
    }

    /// Validates `op` as a projector (idempotent and hermitian within 1e-10).
    pub fn from_operator(op: Operator) -> Result<Self> {
        op.ensure_projector()?;
        Ok(Self::from_operator_unchecked(op))
    }

    /// Wraps an operator known to be a projector, e.g. a unitary conjugate of one.
    pub(crate) fn from_operator_unchecked(op: Operator) -> Self {
        if op.is_diagonal() {
            let d = op.dim();
            let one = C64::new(1.0, 0.0);
            let zero = C64::new(0.0, 0.0);
            if (0..d).all(|i| op.get(i, i) == one || op.get(i, i) == zero) {
                return Self { repr: Repr::Basis((0..d).map(|i| op.get(i, i) == one).collect()) };
            }
        }
        Self { repr: Repr::Dense(op.projector()) }
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Basis(m) => m.len(),
            Repr::Dense(op) => op.dim(),
        }
    }

    pub fn basis_mask(&self) -> Option<&[bool]> {
        match &self.repr {
            Repr::Basis(m) => Some(m),
            Repr::Dense(_) => None,
        }
    }

    pub fn to_operator(&self) -> Operator {
        match &self.repr {
            Repr::Basis(mask) => {
                let idx: Vec<usize> = mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
                Operator::basis_projector(mask.len(), &idx)
            }
            Repr::Dense(op) => op.clone(),
        }
    }

    /// Dimension of the range, `Tr P` rounded.
    pub fn rank(&self) -> usize {
        match &self.repr {
            Repr::Basis(m) => m.iter().filter(|&&b| b).count(),
            Repr::Dense(op) => op.trace().re.round() as usize,
        }
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        let out = self.apply_block(psi.as_column().as_ref());
        StateVector::from_column(out.as_ref(), 0)
    }

    pub(crate) fn apply_block(&self, block: MatRef<'_, C64>) -> Mat<C64> {
        assert_eq!(block.nrows(), self.dim(), "projector/vector dimension mismatch");
        match &self.repr {
            Repr::Basis(mask) => {
                let zero = C64::new(0.0, 0.0);
                Mat::from_fn(block.nrows(), block.ncols(), |i, j| if mask[i] { block[(i, j)] } else { zero })
            }
            Repr::Dense(op) => matmul(op.mat(), block),
        }
    }

    /// Sum of mutually orthogonal projectors, itself a projector.
    pub fn merge(parts: &[&Projector]) -> Projector {
        assert!(!parts.is_empty(), "cannot merge an empty set of projectors");
        if let Some(masks) = parts.iter().map(|p| p.basis_mask()).collect::<Option<Vec<_>>>() {
            let mask = (0..masks[0].len()).map(|i| masks.iter().any(|m| m[i])).collect();
            return Projector { repr: Repr::Basis(mask) };
        }
        let mut sum = parts[0].to_operator();
        for p in &parts[1..] {
            sum = &sum + &p.to_operator();
        }
        Projector::from_operator_unchecked(sum)
    }

    /// `U(t)† P U(t)`.
    pub fn heisenberg(&self, dynamics: &Dynamics, t: f64) -> Projector {
        if t == 0.0 {
            return self.clone();
        }
        Projector::from_operator_unchecked(dynamics.heisenberg(&self.to_operator(), t))
    }

    /// `U(t) P U(t)†`.
    pub fn schrodinger(&self, dynamics: &Dynamics, t: f64) -> Projector {
        if t == 0.0 {
            return self.clone();
        }
        Projector::from_operator_unchecked(dynamics.schrodinger(&self.to_operator(), t))
    }
}
