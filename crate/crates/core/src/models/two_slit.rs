//! Two-slit interference with a tunable which-path environment.
//!
//! The particle register has `screen_bins` levels. Levels 0 and 1 are the
//! slits; the screen bins are the discrete Fourier basis of the register.
//! Each of `N` environment spins rotates by `2θ_e` about `y` only when the
//! particle is in slit 2, so the two path branches carry environment states
//! with overlap `cos^N θ_e` by the screen time.

use std::f64::consts::PI;

use faer::Mat;

use super::ModelSpec;
use crate::error::{Error, Result};
use crate::history::{HistoryGrid, Picture, Projector, ProjectorFamily};
use crate::linalg::{Dynamics, FactorSignature, Hamiltonian, Operator, StateVector, C64};

/// Time of the slit family.
pub const SLIT_TIME: f64 = 0.5;
/// Time of the screen family. The environment overlap is `cos^N θ_e` here.
pub const SCREEN_TIME: f64 = 1.0;

/// How the environment spins are represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnvEncoding {
    /// Qubits for small `N`, collective spin otherwise.
    #[default]
    Auto,
    /// `N` separate qubits, dimension `2^N`.
    Qubits,
    /// The symmetric subspace as a spin `j = N/2`, dimension `N + 1`. Exact
    /// because every spin couples identically and starts in `|0⟩`.
    Collective,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSlitParams {
    pub screen_bins: usize,
    pub a1: C64,
    pub a2: C64,
    pub env_spins: usize,
    /// Per-spin which-path angle `θ_e`.
    pub coupling_angle: f64,
    pub encoding: EnvEncoding,
}

impl Default for TwoSlitParams {
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            screen_bins: 8,
            a1: C64::new(h, 0.0),
            a2: C64::new(h, 0.0),
            env_spins: 0,
            coupling_angle: PI / 3.0,
            encoding: EnvEncoding::Auto,
        }
    }
}

const QUBIT_LIMIT: usize = 4;

/// `J_y` for spin `j = n/2` in the basis `m = j, j-1, …, -j`.
fn collective_jy(n: usize) -> Operator {
    let j = n as f64 / 2.0;
    let mut m = Mat::<C64>::zeros(n + 1, n + 1);
    // index k holds m = j - k; J+ maps k+1 to k
    for k in 0..n {
        let mm = j - (k + 1) as f64;
        let c = (j * (j + 1.0) - mm * (mm + 1.0)).sqrt();
        m[(k, k + 1)] = C64::new(0.0, -c / 2.0);
        m[(k + 1, k)] = C64::new(0.0, c / 2.0);
    }
    Operator::from_mat(m).hermitian()
}

/// `Σ_k Y_k / 2` on `n` qubits.
fn qubit_jy(n: usize) -> Operator {
    let d = 1usize << n;
    let mut sum = Operator::zeros(d);
    for k in 0..n {
        let mut term = Operator::identity(1);
        for q in 0..n {
            term = term.tensor(&if q == k { crate::linalg::pauli::y() } else { Operator::identity(2) });
        }
        sum = &sum + &term;
    }
    sum.scale(C64::new(0.5, 0.0)).hermitian()
}

pub fn build_two_slit(p: &TwoSlitParams) -> Result<ModelSpec> {
    let l = p.screen_bins;
    if l < 2 {
        return Err(Error::Parameter(format!("screen_bins must be at least 2, got {l}")));
    }
    if !p.coupling_angle.is_finite() {
        return Err(Error::Parameter("coupling_angle must be finite".into()));
    }
    let psi_path = StateVector::new(
        (0..l).map(|i| match i {
            0 => p.a1,
            1 => p.a2,
            _ => C64::new(0.0, 0.0),
        })
        .collect(),
    )?;
    if !psi_path.is_normalized() {
        return Err(Error::Parameter(format!("slit amplitudes must satisfy |a1|^2 + |a2|^2 = 1, got {}", psi_path.norm_sqr())));
    }

    let n = p.env_spins;
    let collective = match p.encoding {
        EnvEncoding::Auto => n > QUBIT_LIMIT,
        EnvEncoding::Qubits => false,
        EnvEncoding::Collective => true,
    };
    let (jy, env_labels): (Operator, Vec<String>) = if collective {
        let j = n as f64 / 2.0;
        (collective_jy(n), (0..=n).map(|k| format!("m={}", j - k as f64)).collect())
    } else {
        let d = 1usize << n;
        (qubit_jy(n), (0..d).map(|i| format!("{i:0w$b}", w = n.max(1))).collect())
    };
    let de = jy.dim();

    let mut factors = vec![l];
    let mut factor_labels = vec!["path".to_string()];
    let mut basis_labels = vec![(0..l).map(|i| format!("L{i}")).collect::<Vec<_>>()];
    if de > 1 {
        factors.push(de);
        factor_labels.push("env".into());
        basis_labels.push(env_labels);
    }
    let sig = FactorSignature::new(factors)?;

    let slit2 = Operator::basis_projector(l, &[1]);
    let g = jy.scale(C64::new(2.0 * p.coupling_angle / SCREEN_TIME, 0.0));
    let h = if de > 1 { slit2.tensor(&g).hermitian() } else { Operator::zeros(l).hermitian() };
    let dynamics = Dynamics::new(Hamiltonian::new(&h)?);
    let psi0 = if de > 1 { psi_path.tensor(&StateVector::basis(de, 0)) } else { psi_path };

    let id_env = Operator::identity(de);
    let lift = |path_classes: &[Vec<usize>]| -> Vec<Vec<usize>> {
        path_classes.iter().map(|c| c.iter().flat_map(|&i| (0..de).map(move |e| i * de + e)).collect()).collect()
    };
    let mut slit_classes = vec![vec![0], vec![1]];
    let mut slit_labels = vec!["slit1".to_string(), "slit2".to_string()];
    if l > 2 {
        slit_classes.push((2..l).collect());
        slit_labels.push("elsewhere".into());
    }
    let slits = ProjectorFamily::from_basis_classes(SLIT_TIME, sig.dim(), &lift(&slit_classes), slit_labels)?;

    let norm = 1.0 / (l as f64).sqrt();
    let bins = (0..l)
        .map(|b| {
            let x = StateVector::new(
                (0..l).map(|j| C64::from_polar(norm, 2.0 * PI * (b * j % l) as f64 / l as f64)).collect(),
            )?;
            Projector::from_operator(Operator::outer(&x, &x).tensor(&id_env))
        })
        .collect::<Result<Vec<_>>>()?;
    let screen =
        ProjectorFamily::new(SCREEN_TIME, Picture::Schrodinger, bins, (0..l).map(|b| format!("bin{b}")).collect())?;

    ModelSpec {
        name: "two_slit".into(),
        dynamics,
        psi0,
        sig,
        factor_labels,
        basis_labels,
        grids: vec![
            ("slit-screen".into(), HistoryGrid::new(vec![slits.clone(), screen.clone()])?),
            ("screen".into(), HistoryGrid::new(vec![screen])?),
            ("slit".into(), HistoryGrid::new(vec![slits])?),
        ],
    }
    .check()
}
