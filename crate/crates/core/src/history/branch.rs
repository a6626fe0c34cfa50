use faer::Mat;

use super::chain::evaluate_all;
use super::{EvalMode, EvalOptions, History, HistoryGrid};
use crate::error::{Error, Result};
use crate::linalg::{Dynamics, StateVector, C64};
use crate::tol;

/// All branch vectors of a history set, stored as the columns of a `d × N`
/// matrix.
#[derive(Debug, Clone)]
pub struct BranchSet {
    vectors: Mat<C64>,
    labels: Vec<Vec<String>>,
    histories: Vec<History>,
    times: Vec<f64>,
    mode: EvalMode,
    coarse: bool,
}

impl BranchSet {
    /// Evaluates `|Ψ_α⟩` for every history of `grid`. `psi` must be normalized.
    pub fn build(grid: &HistoryGrid, dynamics: &Dynamics, psi: &StateVector, options: &EvalOptions) -> Result<Self> {
        if !psi.is_normalized() {
            return Err(Error::Parameter(format!("state must be normalized (norm = {})", psi.norm())));
        }
        let vectors = evaluate_all(grid, dynamics, psi, options.mode, options.max_histories)?;
        let histories: Vec<History> = grid.histories().collect();
        let labels = histories.iter().map(|h| grid.label_path(h)).collect();
        Ok(Self { vectors, labels, histories, times: grid.times(), mode: options.mode, coarse: false })
    }

    pub(crate) fn from_parts(
        vectors: Mat<C64>,
        labels: Vec<Vec<String>>,
        histories: Vec<History>,
        times: Vec<f64>,
        mode: EvalMode,
        coarse: bool,
    ) -> Self {
        Self { vectors, labels, histories, times, mode, coarse }
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn vector(&self, i: usize) -> StateVector {
        StateVector::from_column(self.vectors.as_ref(), i)
    }

    pub(crate) fn matrix(&self) -> &Mat<C64> {
        &self.vectors
    }

    /// Label path per history, one entry per time (a single class label for
    /// coarse-grained sets).
    pub fn labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    pub fn histories(&self) -> &[History] {
        &self.histories
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    pub fn is_coarse(&self) -> bool {
        self.coarse
    }

    pub fn norms(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.vectors.col_as_slice(j).iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()).collect()
    }

    /// `Σ_α |Ψ_α⟩`, which reproduces `|Ψ⟩` for an exhaustive set.
    pub fn sum(&self) -> StateVector {
        let mut acc = vec![C64::new(0.0, 0.0); self.dim()];
        for j in 0..self.len() {
            for (a, x) in acc.iter_mut().zip(self.vectors.col_as_slice(j)) {
                *a += x;
            }
        }
        StateVector::new(acc).expect("finite sum of finite vectors")
    }

    /// Checks `‖Σ_α |Ψ_α⟩ − |Ψ⟩‖ ≤ 1e-9`.
    pub fn resolves(&self, psi: &StateVector) -> bool {
        (&self.sum() - psi).norm() <= 1e3 * tol::STRUCTURAL
    }
}
