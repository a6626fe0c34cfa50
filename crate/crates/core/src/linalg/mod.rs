//! Dense complex linear algebra over finite Hilbert spaces.

mod dynamics;
mod hamiltonian;
mod operator;
pub mod pauli;
mod signature;
mod state;

pub use dynamics::{Dynamics, Kick};
pub use hamiltonian::{heisenberg_projector, propagator, Hamiltonian};
pub use operator::{Operator, Tags};
pub use signature::FactorSignature;
pub use state::StateVector;

use faer::linalg::matmul::matmul as faer_matmul;
use faer::traits::Conjugate;
use faer::{Accum, Mat, MatRef, Par};

pub type C64 = num_complex::Complex64;

/// `lhs · rhs` using faer's global parallelism setting.
pub(crate) fn matmul<L, R>(lhs: MatRef<'_, L>, rhs: MatRef<'_, R>) -> Mat<C64>
where
    L: Conjugate<Canonical = C64>,
    R: Conjugate<Canonical = C64>,
{
    let mut out = Mat::<C64>::zeros(lhs.nrows(), rhs.ncols());
    faer_matmul(out.as_mut(), Accum::Replace, lhs, rhs, C64::new(1.0, 0.0), faer::get_global_parallelism());
    out
}

/// Runs `f` with faer kernels restricted to the calling thread, restoring the
/// previous setting afterwards.
pub fn with_sequential_kernels<T>(f: impl FnOnce() -> T) -> T {
    let previous = faer::get_global_parallelism();
    faer::set_global_parallelism(Par::Seq);
    let out = f();
    faer::set_global_parallelism(previous);
    out
}
