//! Spin measured along `z` by a pointer whose reading is copied to a record.
//!
//! Factors are `spin ⊗ pointer ⊗ record`, all qubits. The spin precesses
//! about `z`. At `t = 1` the pointer flips if the spin is down; at `t = 2`
//! the record flips if the pointer is set. Records are never disturbed
//! afterwards, so a record reading persists for all later times.

use super::{controlled_flip, ModelSpec};
use crate::error::{Error, Result};
use crate::history::{HistoryGrid, ProjectorFamily};
use crate::linalg::{Dynamics, FactorSignature, Hamiltonian, Kick, Operator, StateVector, C64};

const SPIN: usize = 0;
const POINTER: usize = 1;
const RECORD: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SternGerlachParams {
    /// Polar angle of the initial spin direction.
    pub theta: f64,
    /// Larmor frequency `ω` in `H = ω S_z`.
    pub precession: f64,
}

impl Default for SternGerlachParams {
    fn default() -> Self {
        Self { theta: std::f64::consts::FRAC_PI_3, precession: 0.7 }
    }
}

pub fn build_stern_gerlach(p: &SternGerlachParams) -> Result<ModelSpec> {
    if !p.theta.is_finite() || !p.precession.is_finite() {
        return Err(Error::Parameter("theta and precession must be finite".into()));
    }
    let sig = FactorSignature::new(vec![2, 2, 2])?;
    let d = sig.dim();

    let half = p.precession / 2.0;
    let h0 = Operator::diagonal(
        &(0..d).map(|i| C64::new(if sig.digits(i)[SPIN] == 0 { half } else { -half }, 0.0)).collect::<Vec<_>>(),
    );
    let kicks = vec![
        Kick { time: 1.0, unitary: controlled_flip(&sig, SPIN, 1, POINTER), label: "spin->pointer".into() },
        Kick { time: 2.0, unitary: controlled_flip(&sig, POINTER, 1, RECORD), label: "pointer->record".into() },
    ];
    let dynamics = Dynamics::with_kicks(Hamiltonian::new(&h0.hermitian())?, kicks)?;

    let (c, s) = ((p.theta / 2.0).cos(), (p.theta / 2.0).sin());
    let psi0 = StateVector::from_real(&[c, s])?.tensor(&StateVector::basis(4, 0));

    let on = |factor: usize, value: usize| -> Vec<usize> { (0..d).filter(|&i| sig.digits(i)[factor] == value).collect() };
    let up_down = vec!["up".to_string(), "down".to_string()];
    let spin = |t| ProjectorFamily::from_basis_classes(t, d, &[on(SPIN, 0), on(SPIN, 1)], up_down.clone());
    let record = |t| ProjectorFamily::from_basis_classes(t, d, &[on(RECORD, 0), on(RECORD, 1)], up_down.clone());
    let apparatus = |t| {
        let classes: Vec<Vec<usize>> = (0..4)
            .map(|k| (0..d).filter(|&i| sig.digits(i)[POINTER] * 2 + sig.digits(i)[RECORD] == k).collect())
            .collect();
        let labels = (0..4).map(|k| format!("p{}r{}", k / 2, k % 2)).collect();
        ProjectorFamily::from_basis_classes(t, d, &classes, labels)
    };

    let grids = vec![
        ("born".into(), HistoryGrid::new(vec![record(3.0)?])?),
        ("persistence".into(), HistoryGrid::new(vec![record(3.0)?, record(4.0)?])?),
        ("measurement".into(), HistoryGrid::new(vec![spin(0.5)?, record(3.0)?])?),
        ("apparatus".into(), HistoryGrid::new(vec![apparatus(1.5)?, apparatus(2.5)?, apparatus(3.5)?])?),
    ];
    ModelSpec {
        name: "stern_gerlach".into(),
        dynamics,
        psi0,
        sig,
        factor_labels: vec!["spin".into(), "pointer".into(), "record".into()],
        basis_labels: vec![up_down.clone(), vec!["0".into(), "1".into()], vec!["0".into(), "1".into()]],
        grids,
    }
    .check()
}
