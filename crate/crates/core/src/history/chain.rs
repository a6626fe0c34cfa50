//! Right-to-left evaluation of projector chains.
//!
//! Branch vectors are computed by pushing `|Ψ⟩` through the chain one time
//! step at a time. All histories sharing a prefix share the work for that
//! prefix: at step `k` the evaluator holds one column per prefix, so a grid
//! of `N` histories costs `O(N d²)` in total and no class operator is formed.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use faer::Mat;

use super::{History, HistoryGrid, Projector};
use crate::error::{Error, Result};
use crate::linalg::{Dynamics, Operator, StateVector, C64};
use crate::tol;

static CLASS_OPERATORS_BUILT: AtomicUsize = AtomicUsize::new(0);

/// How many class-operator matrices this process has materialized.
pub fn class_operators_built() -> usize {
    CLASS_OPERATORS_BUILT.load(Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// Chain of Heisenberg-picture projectors `Pⁿ(tₙ)···P¹(t₁)|Ψ⟩`.
    #[default]
    HeisenbergChain,
    /// Unitary advances between equally spaced times alternating with
    /// time-0 projections, mapped back to the Heisenberg picture at the end.
    SchrodingerChain,
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalMode::HeisenbergChain => "heisenberg-chain",
            EvalMode::SchrodingerChain => "schrodinger-chain",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub mode: EvalMode,
    pub epsilon: f64,
    pub max_histories: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { mode: EvalMode::HeisenbergChain, epsilon: tol::DEFAULT_EPSILON, max_histories: tol::DEFAULT_MAX_HISTORIES }
    }
}

impl EvalOptions {
    pub fn with_mode(mut self, mode: EvalMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_max_histories(mut self, cap: usize) -> Self {
        self.max_histories = cap;
        self
    }
}

struct Step {
    /// Advance `U(to) U(from)†` before projecting.
    advance: Option<(f64, f64)>,
    members: Vec<Projector>,
}

struct Chain {
    steps: Vec<Step>,
    /// Map the final vectors from time `t` back to the Heisenberg picture.
    rewind: Option<f64>,
}

fn check_equal_spacing(times: &[f64]) -> Result<()> {
    if times.len() < 3 {
        return Ok(());
    }
    let first = times[1] - times[0];
    for (k, w) in times.windows(2).enumerate().skip(1) {
        let step = w[1] - w[0];
        if (step - first).abs() > tol::EQUALITY * first.abs().max(1.0) {
            return Err(Error::UnequalSpacing { index: k, step, first });
        }
    }
    Ok(())
}

fn prepare(grid: &HistoryGrid, dynamics: &Dynamics, mode: EvalMode) -> Result<Chain> {
    if dynamics.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: dynamics.dim() });
    }
    match mode {
        EvalMode::HeisenbergChain => Ok(Chain {
            steps: grid
                .families()
                .iter()
                .map(|f| Step { advance: None, members: f.heisenberg(dynamics).members().to_vec() })
                .collect(),
            rewind: None,
        }),
        EvalMode::SchrodingerChain => {
            let times = grid.times();
            check_equal_spacing(&times)?;
            let mut previous = 0.0;
            let steps = grid
                .families()
                .iter()
                .map(|f| {
                    let advance = Some((previous, f.time()));
                    previous = f.time();
                    Step { advance, members: f.schrodinger(dynamics).members().to_vec() }
                })
                .collect();
            Ok(Chain { steps, rewind: Some(previous) })
        }
    }
}

/// Branch vectors of every history, one column each, in
/// [`HistoryGrid::histories`] order.
pub(crate) fn evaluate_all(
    grid: &HistoryGrid,
    dynamics: &Dynamics,
    psi: &StateVector,
    mode: EvalMode,
    cap: usize,
) -> Result<Mat<C64>> {
    grid.check_cap(cap)?;
    if psi.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: psi.dim() });
    }
    let chain = prepare(grid, dynamics, mode)?;
    let d = grid.dim();
    let mut block = psi.as_column();
    for step in &chain.steps {
        if let Some((from, to)) = step.advance {
            block = dynamics.advance_block(block.as_ref(), from, to);
        }
        let m = step.members.len();
        let parents = block.ncols();
        let mut children = Mat::<C64>::zeros(d, parents * m);
        for (k, member) in step.members.iter().enumerate() {
            let projected = member.apply_block(block.as_ref());
            for p in 0..parents {
                children.col_as_slice_mut(p * m + k).copy_from_slice(projected.col_as_slice(p));
            }
        }
        block = children;
    }
    if let Some(t) = chain.rewind {
        block = dynamics.advance_block(block.as_ref(), t, 0.0);
    }
    Ok(block)
}

/// `|Ψ_α⟩ = C_α|Ψ⟩` for a single history, evaluated as a chain of
/// matrix-vector products in the requested mode.
pub fn branch_vector(
    grid: &HistoryGrid,
    dynamics: &Dynamics,
    history: &History,
    psi: &StateVector,
    mode: EvalMode,
) -> Result<StateVector> {
    grid.ensure_contains(history)?;
    if psi.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: psi.dim() });
    }
    let chain = prepare(grid, dynamics, mode)?;
    let mut v = psi.clone();
    for (step, &alt) in chain.steps.iter().zip(history.alternatives()) {
        if let Some((from, to)) = step.advance {
            v = dynamics.advance(&v, from, to);
        }
        v = step.members[alt].apply(&v);
    }
    if let Some(t) = chain.rewind {
        v = dynamics.advance(&v, t, 0.0);
    }
    Ok(v)
}

/// The class operator `C_α = Pⁿ_{αₙ}(tₙ)···P¹_{α₁}(t₁)` as a dense matrix.
/// Generally not a projector.
pub fn class_operator(grid: &HistoryGrid, dynamics: &Dynamics, history: &History) -> Result<Operator> {
    grid.ensure_contains(history)?;
    if dynamics.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: dynamics.dim() });
    }
    CLASS_OPERATORS_BUILT.fetch_add(1, Ordering::Relaxed);
    let mut c = Operator::identity(grid.dim()).with_tags(Default::default());
    for (fam, &alt) in grid.families().iter().zip(history.alternatives()) {
        let p = fam.heisenberg(dynamics).members()[alt].to_operator();
        c = &p * &c;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::ProjectorFamily;
    use crate::linalg::{pauli, Hamiltonian};

    fn z_family(t: f64) -> ProjectorFamily {
        ProjectorFamily::from_basis_classes(t, 2, &[vec![0], vec![1]], vec!["up".into(), "down".into()]).unwrap()
    }

    #[test]
    fn spacing_rule() {
        assert!(check_equal_spacing(&[0.3, 1.0, 1.7, 2.4]).is_ok());
        assert!(check_equal_spacing(&[5.0, 6.0]).is_ok());
        assert!(matches!(check_equal_spacing(&[0.0, 1.0, 2.5]), Err(Error::UnequalSpacing { index: 1, .. })));
    }

    #[test]
    fn schrodinger_mode_rejects_unequal_steps() {
        let grid = HistoryGrid::new(vec![z_family(0.5), z_family(1.0), z_family(2.0)]).unwrap();
        let dyn_ = Dynamics::new(Hamiltonian::new(&pauli::x()).unwrap());
        let psi = StateVector::basis(2, 0);
        let err = branch_vector(&grid, &dyn_, &History(vec![0, 0, 0]), &psi, EvalMode::SchrodingerChain);
        assert!(matches!(err, Err(Error::UnequalSpacing { .. })));
        assert!(branch_vector(&grid, &dyn_, &History(vec![0, 0, 0]), &psi, EvalMode::HeisenbergChain).is_ok());
    }

    #[test]
    fn single_time_branch_is_projection() {
        let grid = HistoryGrid::new(vec![z_family(0.0)]).unwrap();
        let dyn_ = Dynamics::new(Hamiltonian::zero(2));
        let psi = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let b = branch_vector(&grid, &dyn_, &History(vec![1]), &psi, EvalMode::HeisenbergChain).unwrap();
        assert!((b.norm_sqr() - 0.64).abs() < 1e-15);
    }

    #[test]
    fn class_operator_counts_materializations() {
        let grid = HistoryGrid::new(vec![z_family(0.0)]).unwrap();
        let dyn_ = Dynamics::new(Hamiltonian::zero(2));
        let before = class_operators_built();
        class_operator(&grid, &dyn_, &History(vec![0])).unwrap();
        assert!(class_operators_built() > before);
        assert!(class_operator(&grid, &dyn_, &History(vec![2])).is_err());
    }
}
