//! A spin singlet whose halves are recorded locally along axes `a` and `b`.
//!
//! Factors are `spinA ⊗ spinB ⊗ recA ⊗ recB`. At `t = 1` each record qubit
//! flips when its spin is found anti-aligned with the local axis. Record A is
//! read at `t = 2` and record B at `t = 3`.

use super::ModelSpec;
use crate::error::{Error, Result};
use crate::history::{evaluate, probabilities, EvalOptions, HistoryGrid, ProjectorFamily};
use crate::linalg::{pauli, Dynamics, FactorSignature, Hamiltonian, Kick, Operator, StateVector, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprParams {
    pub a: [f64; 3],
    pub b: [f64; 3],
    /// Number of extra `b` axes, evenly spaced in the `x–z` plane, used to
    /// test that A's marginal does not depend on B's setting.
    pub sweep: usize,
}

impl Default for EprParams {
    fn default() -> Self {
        Self { a: [0.0, 0.0, 1.0], b: [1.0, 0.0, 0.0], sweep: 8 }
    }
}

/// A's marginal under every `b` axis tried, and the correlation at `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoSignalingReport {
    pub b_axes: Vec<[f64; 3]>,
    /// `p(A = +)` for each entry of `b_axes`.
    pub a_marginals: Vec<f64>,
    /// `max - min` of `a_marginals`.
    pub max_variation: f64,
    /// `E(a, b) = Σ s_A s_B p(s_A, s_B)` at the configured `b`.
    pub correlation: f64,
}

#[derive(Debug, Clone)]
pub struct EprModel {
    pub spec: ModelSpec,
    pub report: NoSignalingReport,
}

fn unit(n: [f64; 3], name: &str) -> Result<[f64; 3]> {
    let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Parameter(format!("axis {name} must be a unit vector, |{name}| = {norm}")));
    }
    Ok(n)
}

/// `P₊ ⊗ I + P₋ ⊗ X`, acting on (spin, record).
fn local_measurement(axis: [f64; 3]) -> Operator {
    let i2 = Operator::identity(2);
    let s = pauli::along(axis);
    let plus = (&i2 + &s).scale(C64::new(0.5, 0.0));
    let minus = (&i2 - &s).scale(C64::new(0.5, 0.0));
    &plus.tensor(&i2) + &minus.tensor(&pauli::x())
}

fn model(a: [f64; 3], b: [f64; 3]) -> Result<ModelSpec> {
    let sig = FactorSignature::new(vec![2, 2, 2, 2])?;
    let d = sig.dim();
    let ka = local_measurement(a);
    let kb = local_measurement(b);
    // reorder (sA, rA, sB, rB) -> (sA, sB, rA, rB)
    let joint = ka.tensor(&kb);
    let perm = |i: usize| {
        let x = sig.digits(i);
        x[0] * 8 + x[2] * 4 + x[1] * 2 + x[3]
    };
    let k = Operator::from_mat(faer::Mat::from_fn(d, d, |i, j| joint.get(perm(i), perm(j))));
    let dynamics = Dynamics::with_kicks(
        Hamiltonian::zero(d),
        vec![Kick { time: 1.0, unitary: k.unitary(), label: "local records".into() }],
    )?;

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = StateVector::from_real(&[0.0, h, -h, 0.0])?;
    let psi0 = singlet.tensor(&StateVector::basis(4, 0));

    let record = |factor: usize, t: f64, tag: &str| {
        let on = |v| (0..d).filter(|&i| sig.digits(i)[factor] == v).collect::<Vec<_>>();
        ProjectorFamily::from_basis_classes(t, d, &[on(0), on(1)], vec![format!("{tag}+"), format!("{tag}-")])
    };

    let grids = vec![("records".into(), HistoryGrid::new(vec![record(2, 2.0, "A")?, record(3, 3.0, "B")?])?)];
    ModelSpec {
        name: "epr".into(),
        dynamics,
        psi0,
        sig,
        factor_labels: vec!["spinA".into(), "spinB".into(), "recA".into(), "recB".into()],
        basis_labels: vec![
            vec!["0".into(), "1".into()],
            vec!["0".into(), "1".into()],
            vec!["+".into(), "-".into()],
            vec!["+".into(), "-".into()],
        ],
        grids,
    }
    .check()
}

/// Joint record probabilities `[p(++), p(+-), p(-+), p(--)]`.
fn joint(spec: &ModelSpec) -> Result<[f64; 4]> {
    let (_, report) = evaluate(spec.default_grid(), &spec.dynamics, &spec.psi0, &EvalOptions::default())?;
    let p = probabilities(&report)?;
    Ok([p[0], p[1], p[2], p[3]])
}

pub fn build_epr_pair(p: &EprParams) -> Result<EprModel> {
    let a = unit(p.a, "a")?;
    let b = unit(p.b, "b")?;
    let spec = model(a, b)?;
    let j = joint(&spec)?;
    let correlation = j[0] - j[1] - j[2] + j[3];

    let mut b_axes = vec![b];
    b_axes.extend((0..p.sweep).map(|k| {
        let phi = 2.0 * std::f64::consts::PI * k as f64 / p.sweep as f64;
        [phi.sin(), 0.0, phi.cos()]
    }));
    let a_marginals = b_axes
        .iter()
        .map(|&bk| joint(&model(a, bk)?).map(|j| j[0] + j[1]))
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = a_marginals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));

    Ok(EprModel { spec, report: NoSignalingReport { b_axes, a_marginals, max_variation: hi - lo, correlation } })
}
