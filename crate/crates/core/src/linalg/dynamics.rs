use faer::{Mat, MatRef};

use super::{matmul, Hamiltonian, Operator, StateVector, C64};
use crate::error::{Error, Result};

/// An instantaneous unitary coupling applied at `time`.
#[derive(Debug, Clone)]
pub struct Kick {
    pub time: f64,
    pub unitary: Operator,
    pub label: String,
}

/// Closed-system time evolution: a free Hamiltonian interrupted by
/// instantaneous unitary kicks.
///
/// `U(t)` advances from time 0 to `t` and includes every kick with
/// `0 < time ≤ t`. Without kicks this is `e^{-iHt}`.
#[derive(Debug, Clone)]
pub struct Dynamics {
    hamiltonian: Hamiltonian,
    kicks: Vec<Kick>,
}

impl Dynamics {
    pub fn new(hamiltonian: Hamiltonian) -> Self {
        Self { hamiltonian, kicks: Vec::new() }
    }

    pub fn from_operator(h: &Operator) -> Result<Self> {
        Ok(Self::new(Hamiltonian::new(h)?))
    }

    /// Kicks must be unitary, at strictly positive and strictly increasing times.
    pub fn with_kicks(hamiltonian: Hamiltonian, kicks: Vec<Kick>) -> Result<Self> {
        let mut previous = 0.0;
        for k in &kicks {
            if k.unitary.dim() != hamiltonian.dim() {
                return Err(Error::DimensionMismatch { expected: hamiltonian.dim(), found: k.unitary.dim() });
            }
            if !(k.time > previous) {
                return Err(Error::Parameter(format!(
                    "kick '{}' at t={} must come after t={previous}",
                    k.label, k.time
                )));
            }
            let defect = k.unitary.unitary_defect();
            if defect > crate::tol::STRUCTURAL {
                return Err(Error::NotUnitary { defect });
            }
            previous = k.time;
        }
        Ok(Self { hamiltonian, kicks })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn kicks(&self) -> &[Kick] {
        &self.kicks
    }

    /// `U(to) U(from)†` applied to `psi`.
    pub fn advance(&self, psi: &StateVector, from: f64, to: f64) -> StateVector {
        let out = self.advance_block(psi.as_column().as_ref(), from, to);
        StateVector::from_column(out.as_ref(), 0)
    }

    pub(crate) fn advance_block(&self, block: MatRef<'_, C64>, from: f64, to: f64) -> Mat<C64> {
        let mut cur = from;
        let mut out = block.to_owned();
        if to >= from {
            for k in self.kicks.iter().filter(|k| k.time > from && k.time <= to) {
                out = self.hamiltonian.evolve_block(out.as_ref(), k.time - cur);
                out = matmul(k.unitary.mat(), out.as_ref());
                cur = k.time;
            }
        } else {
            for k in self.kicks.iter().rev().filter(|k| k.time > to && k.time <= from) {
                out = self.hamiltonian.evolve_block(out.as_ref(), k.time - cur);
                out = matmul(k.unitary.mat().adjoint(), out.as_ref());
                cur = k.time;
            }
        }
        self.hamiltonian.evolve_block(out.as_ref(), to - cur)
    }

    /// `U(t)`.
    pub fn propagator(&self, t: f64) -> Operator {
        if self.kicks.is_empty() {
            return self.hamiltonian.propagator(t);
        }
        let id = Mat::<C64>::identity(self.dim(), self.dim());
        Operator::from_mat(self.advance_block(id.as_ref(), 0.0, t)).unitary()
    }

    /// `U(t)† A U(t)`.
    pub fn heisenberg(&self, a: &Operator, t: f64) -> Operator {
        if t == 0.0 {
            return a.clone();
        }
        let u = self.propagator(t);
        let out = &(&u.adjoint() * a) * &u;
        out.with_tags(a.tags())
    }

    /// `U(t) A U(t)†`, the inverse of [`Dynamics::heisenberg`].
    pub fn schrodinger(&self, a: &Operator, t: f64) -> Operator {
        if t == 0.0 {
            return a.clone();
        }
        let u = self.propagator(t);
        let out = &(&u * a) * &u.adjoint();
        out.with_tags(a.tags())
    }
}
