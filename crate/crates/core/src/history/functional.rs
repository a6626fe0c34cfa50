use faer::Mat;

use super::{BranchSet, EvalMode, History};
use crate::error::{Error, Result};
use crate::linalg::{matmul, C64};
use crate::tol;

/// The decoherence functional `D_αβ = ⟨Ψ_α|Ψ_β⟩` of a branch set, together
/// with the certification verdict at tolerance `epsilon`.
#[derive(Debug, Clone)]
pub struct DecoherenceReport {
    functional: Mat<C64>,
    epsilon: f64,
    max_offdiag: f64,
    max_offdiag_real: f64,
    certified: bool,
    labels: Vec<Vec<String>>,
    histories: Vec<History>,
    mode: EvalMode,
}

/// Builds `D = B†B` for the branch matrix `B` and certifies the set when
/// every off-diagonal modulus is at most `epsilon`.
pub fn decoherence_functional(branches: &BranchSet, epsilon: f64) -> DecoherenceReport {
    let b = branches.matrix();
    let raw = matmul(b.adjoint(), b.as_ref());
    let n = raw.nrows();
    // exact hermitian symmetry; the product is hermitian up to rounding
    let functional = Mat::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(raw[(i, i)].re, 0.0)
        } else {
            (raw[(i, j)] + raw[(j, i)].conj()) * 0.5
        }
    });
    let (mut max_offdiag, mut max_offdiag_real) = (0.0f64, 0.0f64);
    for j in 0..n {
        for i in 0..j {
            max_offdiag = max_offdiag.max(functional[(i, j)].norm());
            max_offdiag_real = max_offdiag_real.max(functional[(i, j)].re.abs());
        }
    }
    DecoherenceReport {
        functional,
        epsilon,
        max_offdiag,
        max_offdiag_real,
        certified: max_offdiag <= epsilon,
        labels: branches.labels().to_vec(),
        histories: branches.histories().to_vec(),
        mode: branches.mode(),
    }
}

impl DecoherenceReport {
    pub fn len(&self) -> usize {
        self.functional.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entry(&self, a: usize, b: usize) -> C64 {
        self.functional[(a, b)]
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `max_{α≠β} |D_αβ|`.
    pub fn max_offdiag(&self) -> f64 {
        self.max_offdiag
    }

    /// `max_{α≠β} |Re D_αβ|`, the weaker consistency quantity. Reported only;
    /// certification uses the full modulus.
    pub fn max_offdiag_real(&self) -> f64 {
        self.max_offdiag_real
    }

    pub fn certified(&self) -> bool {
        self.certified
    }

    pub fn labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    pub fn histories(&self) -> &[History] {
        &self.histories
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    /// `D_αα = ‖Ψ_α‖²`, available whether or not the set is certified.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.functional[(i, i)].re).collect()
    }

    /// `Σ_{α≠β ∈ class} D_αβ`: the amount by which the probability of a merged
    /// class exceeds the sum of its members' diagonal weights.
    pub fn interference_within(&self, class: &[usize]) -> f64 {
        let mut s = 0.0;
        for &a in class {
            for &b in class {
                if a != b {
                    s += self.functional[(a, b)].re;
                }
            }
        }
        s
    }

    /// `Σ_{α∈A, β∈B} D_αβ`.
    pub fn block_sum(&self, rows: &[usize], cols: &[usize]) -> C64 {
        rows.iter().flat_map(|&a| cols.iter().map(move |&b| (a, b))).map(|(a, b)| self.functional[(a, b)]).sum()
    }

    /// `Σ_αβ D_αβ`, which equals `‖Ψ‖²`.
    pub fn total(&self) -> C64 {
        let all: Vec<usize> = (0..self.len()).collect();
        self.block_sum(&all, &all)
    }
}

/// `p(α) = D_αα` for a certified report, clamped to `[0, 1]`.
pub fn probabilities(report: &DecoherenceReport) -> Result<Vec<f64>> {
    if !report.certified {
        return Err(Error::NotCertified { max_offdiag: report.max_offdiag, epsilon: report.epsilon });
    }
    report
        .diagonal()
        .into_iter()
        .map(|p| {
            if p < -tol::NEGATIVE_PROBABILITY {
                Err(Error::Parameter(format!("negative diagonal weight {p:.3e}")))
            } else {
                Ok(p.clamp(0.0, 1.0))
            }
        })
        .collect()
}
