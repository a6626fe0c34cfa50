//! Ready-made closed systems with suggested history grids.

mod cat;
mod epr;
mod random;
mod stern_gerlach;
mod two_slit;

use std::collections::BTreeMap;

pub use cat::{build_cat, CatParams};
pub use epr::{build_epr_pair, EprModel, EprParams, NoSignalingReport};
pub use random::{build_random, random_grid, random_hermitian, random_state, random_unitary, RandomParams};
pub use stern_gerlach::{build_stern_gerlach, SternGerlachParams};
pub use two_slit::{build_two_slit, EnvEncoding, TwoSlitParams};

use crate::error::{Error, Result};
use crate::history::HistoryGrid;
use crate::linalg::{Dynamics, FactorSignature, Operator, StateVector, C64};

/// A theory `(dynamics, Ψ)` with labels and named grids to ask it about.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub name: String,
    pub dynamics: Dynamics,
    pub psi0: StateVector,
    pub sig: FactorSignature,
    pub factor_labels: Vec<String>,
    /// Per factor, a name for each basis state.
    pub basis_labels: Vec<Vec<String>>,
    pub grids: Vec<(String, HistoryGrid)>,
}

impl ModelSpec {
    pub fn dim(&self) -> usize {
        self.sig.dim()
    }

    pub fn grid(&self, name: &str) -> Option<&HistoryGrid> {
        self.grids.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }

    pub fn grid_names(&self) -> Vec<&str> {
        self.grids.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// The first suggested grid.
    pub fn default_grid(&self) -> &HistoryGrid {
        &self.grids[0].1
    }

    /// Human-readable name of a computational basis state, e.g. `up|0|1`.
    pub fn basis_label(&self, index: usize) -> String {
        self.sig
            .digits(index)
            .iter()
            .zip(&self.basis_labels)
            .map(|(&d, names)| names[d].as_str())
            .collect::<Vec<_>>()
            .join("|")
    }

    pub(crate) fn check(self) -> Result<Self> {
        let d = self.sig.dim();
        if self.dynamics.dim() != d || self.psi0.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: self.psi0.dim() });
        }
        if !self.psi0.is_normalized() {
            return Err(Error::Parameter(format!("{}: initial state is not normalized", self.name)));
        }
        if self.grids.is_empty() || self.grids.iter().any(|(_, g)| g.dim() != d) {
            return Err(Error::Parameter(format!("{}: suggested grids missing or of wrong dimension", self.name)));
        }
        Ok(self)
    }
}

/// Names and one-line descriptions of the builders reachable by name.
pub const BUILDERS: &[(&str, &str)] = &[
    ("two_slit", "path register with screen bins and an optional which-path spin environment"),
    ("stern_gerlach", "spin measured by a pointer that is copied into a persistent record"),
    ("cat", "decaying atom triggering a cat, with an environment that records the cat"),
    ("epr", "singlet pair with local records along axes a and b"),
    ("random", "seeded random Hamiltonian, state and projector families"),
];

/// Numeric parameters for [`build_named`], keyed by name.
pub type Params = BTreeMap<String, f64>;

fn param(params: &Params, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

fn count_param(params: &Params, key: &str, default: usize) -> Result<usize> {
    match params.get(key) {
        None => Ok(default),
        Some(&v) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => Ok(v as usize),
        Some(&v) => Err(Error::Parameter(format!("{key} must be a non-negative integer, got {v}"))),
    }
}

/// Builds a model by registry name. Unknown parameter keys are rejected.
pub fn build_named(name: &str, params: &Params) -> Result<ModelSpec> {
    let allowed: &[&str] = match name {
        "two_slit" => &["screen_bins", "a1_re", "a1_im", "a2_re", "a2_im", "env_spins", "coupling_angle", "collective"],
        "stern_gerlach" => &["theta", "precession"],
        "cat" => &["beta_re", "beta_im", "env_qubits"],
        "epr" => &["a_theta", "a_phi", "b_theta", "b_phi", "sweep"],
        "random" => &["dim", "times", "members", "seed"],
        other => return Err(Error::Parameter(format!("unknown model '{other}'"))),
    };
    if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::Parameter(format!("model '{name}' has no parameter '{bad}' (expected one of {allowed:?})")));
    }
    match name {
        "two_slit" => {
            let d = TwoSlitParams::default();
            let encoding = match params.get("collective") {
                None => EnvEncoding::Auto,
                Some(&v) if v != 0.0 => EnvEncoding::Collective,
                Some(_) => EnvEncoding::Qubits,
            };
            build_two_slit(&TwoSlitParams {
                screen_bins: count_param(params, "screen_bins", d.screen_bins)?,
                a1: C64::new(param(params, "a1_re", d.a1.re), param(params, "a1_im", d.a1.im)),
                a2: C64::new(param(params, "a2_re", d.a2.re), param(params, "a2_im", d.a2.im)),
                env_spins: count_param(params, "env_spins", d.env_spins)?,
                coupling_angle: param(params, "coupling_angle", d.coupling_angle),
                encoding,
            })
        }
        "stern_gerlach" => {
            let d = SternGerlachParams::default();
            build_stern_gerlach(&SternGerlachParams {
                theta: param(params, "theta", d.theta),
                precession: param(params, "precession", d.precession),
            })
        }
        "cat" => {
            let d = CatParams::default();
            build_cat(&CatParams {
                beta: C64::new(param(params, "beta_re", d.beta.re), param(params, "beta_im", d.beta.im)),
                env_qubits: count_param(params, "env_qubits", d.env_qubits)?,
            })
        }
        "epr" => {
            let d = EprParams::default();
            let axis = |t: f64, p: f64| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
            let (at, ap) = (param(params, "a_theta", 0.0), param(params, "a_phi", 0.0));
            let (bt, bp) = (param(params, "b_theta", std::f64::consts::FRAC_PI_2), param(params, "b_phi", 0.0));
            Ok(build_epr_pair(&EprParams { a: axis(at, ap), b: axis(bt, bp), sweep: count_param(params, "sweep", d.sweep)? })?
                .spec)
        }
        "random" => {
            let d = RandomParams::default();
            build_random(&RandomParams {
                dim: count_param(params, "dim", d.dim)?,
                times: count_param(params, "times", d.times)?,
                members: count_param(params, "members", d.members)?,
                seed: count_param(params, "seed", d.seed as usize)? as u64,
            })
        }
        _ => unreachable!(),
    }
}

/// Controlled-NOT on a register described by `sig`: flips the `target`
/// qubit factor of every basis state whose `control` factor equals `on`.
pub(crate) fn controlled_flip(sig: &FactorSignature, control: usize, on: usize, target: usize) -> Operator {
    permutation(sig, |digits| {
        if digits[control] == on {
            digits[target] ^= 1;
        }
    })
}

/// Unitary permutation of basis states, `|i⟩ → |f(i)⟩`, with `f` acting on
/// factor digits in place.
pub(crate) fn permutation(sig: &FactorSignature, f: impl Fn(&mut Vec<usize>)) -> Operator {
    let d = sig.dim();
    let mut m = faer::Mat::<C64>::zeros(d, d);
    for i in 0..d {
        let mut digits = sig.digits(i);
        f(&mut digits);
        m[(sig.index(&digits), i)] = C64::new(1.0, 0.0);
    }
    Operator::from_mat(m).unitary()
}

/// Basis states of `sig` whose digit in `factor` satisfies `pred`.
pub(crate) fn basis_where(sig: &FactorSignature, pred: impl Fn(&[usize]) -> bool) -> Vec<usize> {
    (0..sig.dim()).filter(|&i| pred(&sig.digits(i))).collect()
}
