//! Conditional prediction, retrodiction and the effective density matrix.
//!
//! Every conditional probability is a ratio of history probabilities taken
//! from a decoherent joint set. The effective state summarizes a condition
//! chain for prediction; it is rebuilt from the chain on every update so
//! that the chain stays the single source of truth.

use crate::error::{Error, Result};
use crate::history::{evaluate, branch_vector, EvalMode, EvalOptions, History, HistoryGrid};
use crate::linalg::{Dynamics, Operator, StateVector, C64};
use crate::tol;

/// Alternative `alternative` of the family at index `family` in the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alternative {
    pub family: usize,
    pub alternative: usize,
}

impl Alternative {
    pub fn new(family: usize, alternative: usize) -> Self {
        Self { family, alternative }
    }
}

/// Alternatives known to have happened, in strictly increasing time order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConditionChain {
    entries: Vec<Alternative>,
}

impl ConditionChain {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates the chain against `grid`: indices in range, families (and
    /// therefore times) strictly increasing.
    pub fn new(grid: &HistoryGrid, entries: Vec<Alternative>) -> Result<Self> {
        let chain = Self { entries };
        chain.validate(grid)?;
        Ok(chain)
    }

    fn validate(&self, grid: &HistoryGrid) -> Result<()> {
        for (k, a) in self.entries.iter().enumerate() {
            if a.family >= grid.len() {
                return Err(Error::Condition(format!("family {} out of range for {} families", a.family, grid.len())));
            }
            if a.alternative >= grid.family(a.family).len() {
                return Err(Error::Condition(format!(
                    "alternative {} out of range for family {} with {} members",
                    a.alternative,
                    a.family,
                    grid.family(a.family).len()
                )));
            }
            if k > 0 && a.family <= self.entries[k - 1].family {
                return Err(Error::Condition("condition times must be strictly increasing".into()));
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[Alternative] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last_family(&self) -> Option<usize> {
        self.entries.last().map(|a| a.family)
    }

    pub fn appended(&self, next: Alternative) -> Self {
        let mut entries = self.entries.clone();
        entries.push(next);
        Self { entries }
    }
}

/// `ρ_eff = C ρ C† / Tr[C ρ C†]` for the chain `C` of a condition, in the
/// Heisenberg picture.
#[derive(Debug, Clone)]
pub struct EffectiveState {
    rho: Operator,
    condition: ConditionChain,
    normalizer: f64,
}

impl EffectiveState {
    pub fn rho(&self) -> &Operator {
        &self.rho
    }

    pub fn condition(&self) -> &ConditionChain {
        &self.condition
    }

    /// `Tr[C ρ C†]` before normalization, i.e. the probability of the condition.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.rho.hermitian_eigenvalues()
    }

    /// Direct reduction `P ρ_eff P / Tr[P ρ_eff P]` by a Heisenberg projector
    /// for `next`.
    pub fn reduce(&self, projector: &Operator, next: Alternative) -> Result<EffectiveState> {
        let sandwiched = &(projector * &self.rho) * projector;
        let tr = sandwiched.trace().re;
        let normalizer = self.normalizer * tr;
        if normalizer <= tol::DIVISION_FLOOR {
            return Err(Error::NullCondition { probability: normalizer, floor: tol::DIVISION_FLOOR });
        }
        Ok(EffectiveState {
            rho: sandwiched.scale(C64::new(1.0 / tr, 0.0)).hermitian(),
            condition: self.condition.appended(next),
            normalizer,
        })
    }
}

/// The theory `(dynamics, Ψ)` plus a grid of alternatives to reason about.
#[derive(Debug, Clone, Copy)]
pub struct Inference<'a> {
    grid: &'a HistoryGrid,
    dynamics: &'a Dynamics,
    psi: &'a StateVector,
    options: EvalOptions,
}

impl<'a> Inference<'a> {
    pub fn new(grid: &'a HistoryGrid, dynamics: &'a Dynamics, psi: &'a StateVector) -> Result<Self> {
        if grid.dim() != dynamics.dim() || grid.dim() != psi.dim() {
            return Err(Error::DimensionMismatch { expected: grid.dim(), found: psi.dim().min(dynamics.dim()) });
        }
        if !psi.is_normalized() {
            return Err(Error::Parameter(format!("state must be normalized (norm = {})", psi.norm())));
        }
        Ok(Self { grid, dynamics, psi, options: EvalOptions::default() })
    }

    pub fn with_options(mut self, options: EvalOptions) -> Self {
        self.options = options;
        self
    }

    pub fn options(&self) -> &EvalOptions {
        &self.options
    }

    fn check_alternative(&self, a: Alternative) -> Result<()> {
        ConditionChain::new(self.grid, vec![a]).map(|_| ())
    }

    /// Branch vectors of the certified joint set over `families`; errors if
    /// the set does not decohere at the configured epsilon.
    fn certified_joint(&self, families: &[usize]) -> Result<(HistoryGrid, Vec<StateVector>, Vec<f64>)> {
        let sub = self.grid.subgrid(families)?;
        let (branches, report) = evaluate(&sub, self.dynamics, self.psi, &self.options)?;
        if !report.certified() {
            return Err(Error::NotCertified { max_offdiag: report.max_offdiag(), epsilon: report.epsilon() });
        }
        let vectors = (0..branches.len()).map(|i| branches.vector(i)).collect();
        Ok((sub, vectors, report.diagonal()))
    }

    /// `p(future | condition) = p(future, condition) / p(condition)`.
    pub fn predict(&self, condition: &ConditionChain, future: Alternative) -> Result<f64> {
        condition.validate(self.grid)?;
        self.check_alternative(future)?;
        if condition.last_family().is_some_and(|f| f >= future.family) {
            return Err(Error::Condition("predicted alternative must lie after every condition".into()));
        }
        let mut families: Vec<usize> = condition.entries().iter().map(|a| a.family).collect();
        families.push(future.family);
        let (sub, vectors, diag) = self.certified_joint(&families)?;

        let mut alts: Vec<usize> = condition.entries().iter().map(|a| a.alternative).collect();
        alts.push(future.alternative);
        let joint = diag[sub.flat_index(&History(alts.clone()))];

        // C_cond|Ψ⟩ = Σ over the future family of the joint branches
        let mut cond_branch = StateVector::zeros(self.psi.dim());
        for a in 0..sub.family(sub.len() - 1).len() {
            alts[sub.len() - 1] = a;
            cond_branch = &cond_branch + &vectors[sub.flat_index(&History(alts.clone()))];
        }
        ratio(joint, cond_branch.norm_sqr())
    }

    /// `p(past | present) = p(present, past) / p(present)`.
    pub fn retrodict(&self, present: Alternative, past: &ConditionChain) -> Result<f64> {
        past.validate(self.grid)?;
        self.check_alternative(present)?;
        if past.last_family().is_some_and(|f| f >= present.family) {
            return Err(Error::Condition("retrodicted alternatives must lie before the present one".into()));
        }
        let mut families: Vec<usize> = past.entries().iter().map(|a| a.family).collect();
        families.push(present.family);
        let (sub, vectors, diag) = self.certified_joint(&families)?;

        let mut alts: Vec<usize> = past.entries().iter().map(|a| a.alternative).collect();
        alts.push(present.alternative);
        let joint = diag[sub.flat_index(&History(alts))];

        // P_present(t)|Ψ⟩ = Σ over every past history of the joint branches
        let mut present_branch = StateVector::zeros(self.psi.dim());
        for h in sub.histories().filter(|h| h.0[sub.len() - 1] == present.alternative) {
            present_branch = &present_branch + &vectors[sub.flat_index(&h)];
        }
        ratio(joint, present_branch.norm_sqr())
    }

    /// The condition's chain applied to `|Ψ⟩`, Heisenberg picture.
    fn condition_branch(&self, condition: &ConditionChain) -> Result<StateVector> {
        if condition.is_empty() {
            return Ok(self.psi.clone());
        }
        let families: Vec<usize> = condition.entries().iter().map(|a| a.family).collect();
        let sub = self.grid.subgrid(&families)?;
        let alts = History(condition.entries().iter().map(|a| a.alternative).collect());
        branch_vector(&sub, self.dynamics, &alts, self.psi, EvalMode::HeisenbergChain)
    }

    /// `ρ_eff = C|Ψ⟩⟨Ψ|C† / ‖C|Ψ⟩‖²`.
    pub fn effective_state(&self, condition: &ConditionChain) -> Result<EffectiveState> {
        condition.validate(self.grid)?;
        let v = self.condition_branch(condition)?;
        let normalizer = v.norm_sqr();
        if normalizer <= tol::DIVISION_FLOOR {
            return Err(Error::NullCondition { probability: normalizer, floor: tol::DIVISION_FLOOR });
        }
        let rho = v.density().scale(C64::new(1.0 / normalizer, 0.0)).hermitian();
        Ok(EffectiveState { rho, condition: condition.clone(), normalizer })
    }

    /// `Tr[P(t) ρ_eff]` for a later alternative. Refuses when the joint set of
    /// the condition and the future alternative does not decohere.
    pub fn predict_from_state(&self, state: &EffectiveState, future: Alternative) -> Result<f64> {
        self.check_alternative(future)?;
        if state.condition.last_family().is_some_and(|f| f >= future.family) {
            return Err(Error::Condition("predicted alternative must lie after every condition".into()));
        }
        let mut families: Vec<usize> = state.condition.entries().iter().map(|a| a.family).collect();
        families.push(future.family);
        self.certified_joint(&families)?;

        let p = self.heisenberg_projector(future);
        let rho = state.rho.mat();
        let d = rho.nrows();
        let mut tr = C64::new(0.0, 0.0);
        for j in 0..d {
            for i in 0..d {
                tr += p.get(i, j) * rho[(j, i)];
            }
        }
        Ok(tr.re.clamp(0.0, 1.0))
    }

    pub fn heisenberg_projector(&self, a: Alternative) -> Operator {
        let fam = self.grid.family(a.family);
        fam.members()[a.alternative].heisenberg(self.dynamics, fam.time()).to_operator()
    }

    /// Conditions `state` on a further alternative by replaying the extended
    /// chain from `|Ψ⟩`.
    pub fn update(&self, state: &EffectiveState, next: Alternative) -> Result<EffectiveState> {
        self.check_alternative(next)?;
        if state.condition.last_family().is_some_and(|f| f >= next.family) {
            return Err(Error::Condition("update must lie after every condition".into()));
        }
        self.effective_state(&state.condition.appended(next))
    }

    /// Probability table of the certified joint set over `families`, in
    /// history order of the corresponding subgrid.
    pub fn joint_table(&self, families: &[usize]) -> Result<(HistoryGrid, Vec<f64>)> {
        let (sub, _, diag) = self.certified_joint(families)?;
        Ok((sub, diag.into_iter().map(|p| p.clamp(0.0, 1.0)).collect()))
    }
}

fn ratio(joint: f64, marginal: f64) -> Result<f64> {
    if marginal <= tol::DIVISION_FLOOR {
        return Err(Error::NullCondition { probability: marginal, floor: tol::DIVISION_FLOOR });
    }
    Ok((joint / marginal).clamp(0.0, 1.0))
}
