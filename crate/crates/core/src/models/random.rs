use faer::Mat;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::ModelSpec;
use crate::error::{Error, Result};
use crate::history::{HistoryGrid, Picture, Projector, ProjectorFamily};
use crate::linalg::{Dynamics, FactorSignature, Hamiltonian, Operator, StateVector, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomParams {
    pub dim: usize,
    /// Number of equally spaced family times, starting at 1.
    pub times: usize,
    /// Members per family.
    pub members: usize,
    pub seed: u64,
}

impl Default for RandomParams {
    fn default() -> Self {
        Self { dim: 6, times: 3, members: 3, seed: 7 }
    }
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A normalized state with i.i.d. complex Gaussian amplitudes.
pub fn random_state(rng: &mut impl Rng, dim: usize) -> StateVector {
    loop {
        let amps = (0..dim).map(|_| gaussian(rng)).collect();
        if let Ok(psi) = StateVector::normalized_from(amps) {
            return psi;
        }
    }
}

/// `(A + A†)/2` for a complex Gaussian `A`.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> Operator {
    let a = Mat::<C64>::from_fn(dim, dim, |_, _| gaussian(rng));
    Operator::from_mat(Mat::from_fn(dim, dim, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)).hermitian()
}

/// `e^{-iH}` for a random hermitian `H`.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> Operator {
    let h = random_hermitian(rng, dim);
    Hamiltonian::new(&h).expect("hermitian by construction").propagator(1.0)
}

/// Families at `times`, each the image under a fresh random unitary of a
/// random split of the computational basis into `members` non-empty classes.
pub fn random_grid(rng: &mut impl Rng, dim: usize, times: &[f64], members: usize) -> Result<HistoryGrid> {
    if members == 0 || members > dim {
        return Err(Error::Parameter(format!("cannot split dimension {dim} into {members} classes")));
    }
    let families = times
        .iter()
        .map(|&t| {
            let mut order: Vec<usize> = (0..dim).collect();
            order.shuffle(rng);
            let mut classes = vec![Vec::new(); members];
            for (k, &i) in order.iter().enumerate() {
                let slot = if k < members { k } else { rng.random_range(0..members) };
                classes[slot].push(i);
            }
            let v = random_unitary(rng, dim);
            let projectors = classes
                .iter()
                .map(|c| {
                    let cols: Vec<StateVector> =
                        c.iter().map(|&j| StateVector::new((0..dim).map(|i| v.get(i, j)).collect()).unwrap()).collect();
                    Projector::onto_vectors(&cols)
                })
                .collect::<Result<Vec<_>>>()?;
            let labels = (0..members).map(|k| format!("q{k}")).collect();
            ProjectorFamily::new(t, Picture::Schrodinger, projectors, labels)
        })
        .collect::<Result<Vec<_>>>()?;
    HistoryGrid::new(families)
}

/// Seeded random theory on a flat register with one random grid.
pub fn build_random(p: &RandomParams) -> Result<ModelSpec> {
    if p.dim < 2 || p.times == 0 {
        return Err(Error::Parameter("random model needs dim >= 2 and at least one time".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let h = random_hermitian(&mut rng, p.dim);
    let psi0 = random_state(&mut rng, p.dim);
    let times: Vec<f64> = (1..=p.times).map(|k| k as f64).collect();
    let grid = random_grid(&mut rng, p.dim, &times, p.members)?;
    ModelSpec {
        name: "random".into(),
        dynamics: Dynamics::from_operator(&h)?,
        psi0,
        sig: FactorSignature::flat(p.dim),
        factor_labels: vec!["system".into()],
        basis_labels: vec![(0..p.dim).map(|i| i.to_string()).collect()],
        grids: vec![("random".into(), grid)],
    }
    .check()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_builds_are_reproducible() {
        let a = build_random(&RandomParams::default()).unwrap();
        let b = build_random(&RandomParams::default()).unwrap();
        assert_eq!(a.psi0, b.psi0);
        assert_eq!(a.default_grid(), b.default_grid());
        let c = build_random(&RandomParams { seed: 8, ..Default::default() }).unwrap();
        assert_ne!(a.psi0, c.psi0);
    }

    #[test]
    fn unitary_and_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(random_unitary(&mut rng, 5).unitary_defect() < 1e-12);
        assert!(random_hermitian(&mut rng, 5).hermitian_defect() == 0.0);
        assert!(random_grid(&mut rng, 3, &[1.0], 4).is_err());
    }
}
