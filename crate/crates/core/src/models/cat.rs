//! A decaying atom that kills a cat, and an environment that notices.
//!
//! Factors are `atom ⊗ cat ⊗ env`. The cat has two alive levels and two
//! dead levels and oscillates within each pair. At `t = 1` a decayed atom
//! swaps the cat from alive to dead; at `t = 2` every environment qubit
//! flips if the cat is dead. With no environment qubits the atom is the
//! only record of the outcome.

use super::{basis_where, permutation, ModelSpec};
use crate::error::{Error, Result};
use crate::history::{HistoryGrid, Picture, Projector, ProjectorFamily};
use crate::linalg::{Dynamics, FactorSignature, Hamiltonian, Kick, Operator, StateVector, C64};

const ATOM: usize = 0;
const CAT: usize = 1;
const ENV: usize = 2;

const ALIVE: [usize; 2] = [0, 1];
const DEAD: [usize; 2] = [2, 3];
const INTERNAL_RATE: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatParams {
    /// Amplitude of the decayed atom; the undecayed amplitude is `√(1-|β|²)`.
    pub beta: C64,
    pub env_qubits: usize,
}

impl Default for CatParams {
    fn default() -> Self {
        Self { beta: C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0), env_qubits: 2 }
    }
}

pub fn build_cat(p: &CatParams) -> Result<ModelSpec> {
    let b2 = p.beta.norm_sqr();
    if !(0.0..=1.0).contains(&b2) || !b2.is_finite() {
        return Err(Error::Parameter(format!("|beta|^2 must lie in [0, 1], got {b2}")));
    }
    if p.env_qubits > 10 {
        return Err(Error::Parameter(format!("at most 10 environment qubits, got {}", p.env_qubits)));
    }
    let de = 1usize << p.env_qubits;
    let mut factors = vec![2, 4];
    if p.env_qubits > 0 {
        factors.push(de);
    }
    let sig = FactorSignature::new(factors)?;
    let d = sig.dim();

    // internal oscillation a1 <-> a2 and d1 <-> d2
    let pair_flip = Operator::from_real_rows(&[
        &[0.0, 1.0, 0.0, 0.0],
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])?;
    let h_cat = Operator::identity(2).tensor(&pair_flip.scale(C64::new(INTERNAL_RATE, 0.0))).tensor(&Operator::identity(de));
    let hamiltonian = Hamiltonian::new(&h_cat.hermitian())?;

    let mut kicks = vec![Kick {
        time: 1.0,
        unitary: permutation(&sig, |x| {
            if x[ATOM] == 1 {
                x[CAT] ^= 2;
            }
        }),
        label: "trigger".into(),
    }];
    if p.env_qubits > 0 {
        kicks.push(Kick {
            time: 2.0,
            unitary: permutation(&sig, |x| {
                if DEAD.contains(&x[CAT]) {
                    x[ENV] ^= de - 1;
                }
            }),
            label: "environment".into(),
        });
    }
    let dynamics = Dynamics::with_kicks(hamiltonian, kicks)?;

    let alpha = (1.0 - b2).sqrt();
    let atom = StateVector::new(vec![C64::new(alpha, 0.0), p.beta])?;
    let mut psi0 = atom.tensor(&StateVector::basis(4, ALIVE[0]));
    if p.env_qubits > 0 {
        psi0 = psi0.tensor(&StateVector::basis(de, 0));
    }

    let alive = basis_where(&sig, |x| ALIVE.contains(&x[CAT]));
    let dead = basis_where(&sig, |x| DEAD.contains(&x[CAT]));
    let fate = |t| ProjectorFamily::from_basis_classes(t, d, &[alive.clone(), dead.clone()], vec!["alive".into(), "dead".into()]);

    // (|undecayed, a1⟩ + |decayed, d1⟩)/√2 ⊗ I_env and its complement
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut phi = vec![C64::new(0.0, 0.0); 8];
    phi[ALIVE[0]] = C64::new(h, 0.0);
    phi[4 + DEAD[0]] = C64::new(h, 0.0);
    let phi = StateVector::new(phi)?;
    let p_phi = Operator::outer(&phi, &phi).tensor(&Operator::identity(de));
    let rest = &Operator::identity(d) - &p_phi;
    let superposition = ProjectorFamily::new(
        4.0,
        Picture::Schrodinger,
        vec![Projector::from_operator(p_phi)?, Projector::from_operator(rest)?],
        vec!["phi".into(), "not-phi".into()],
    )?;

    let env_labels = (0..de).map(|i| format!("{i:0w$b}", w = p.env_qubits.max(1))).collect();
    let mut factor_labels = vec!["atom".to_string(), "cat".to_string()];
    let mut basis_labels = vec![
        vec!["undecayed".to_string(), "decayed".to_string()],
        vec!["a1".into(), "a2".into(), "d1".into(), "d2".into()],
    ];
    if p.env_qubits > 0 {
        factor_labels.push("env".into());
        basis_labels.push(env_labels);
    }

    ModelSpec {
        name: "cat".into(),
        dynamics,
        psi0,
        sig,
        factor_labels,
        basis_labels,
        grids: vec![
            ("alive-dead".into(), HistoryGrid::new(vec![fate(3.0)?, fate(4.0)?])?),
            ("recoherence".into(), HistoryGrid::new(vec![fate(3.0)?, superposition])?),
        ],
    }
    .check()
}
