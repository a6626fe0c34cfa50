use histories::linalg::{propagator, FactorSignature, Hamiltonian, Operator, StateVector, C64};
use histories::models::{random_hermitian, random_state};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `e^{-iHt}` by scaling and squaring a truncated Taylor series.
fn expm_series(h: &Operator, t: f64) -> Operator {
    let norm: f64 = (0..h.dim()).map(|i| (0..h.dim()).map(|j| h.get(i, j).norm()).sum::<f64>()).fold(0.0, f64::max);
    let scale = (norm * t.abs()).max(1.0).log2().ceil() as i32 + 1;
    let a = h.scale(C64::new(0.0, -t / 2f64.powi(scale)));
    let mut term = Operator::identity(h.dim());
    let mut sum = term.clone();
    for k in 1..=30 {
        term = (&term * &a).scale(C64::new(1.0 / k as f64, 0.0));
        sum = &sum + &term;
    }
    for _ in 0..scale {
        sum = &sum * &sum;
    }
    sum
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn eigen_propagator_matches_series() {
    let mut r = rng(1);
    for dim in [2, 3, 7, 16] {
        let h = random_hermitian(&mut r, dim);
        for t in [-1.3, 0.2, 2.5] {
            let u = propagator(&h, t).unwrap();
            assert!(u.max_abs_diff(&expm_series(&h, t)) < 1e-10, "dim {dim}, t {t}");
            assert!(u.unitary_defect() < 1e-12);
        }
    }
}

#[test]
fn pauli_rotation_closed_form() {
    let x = histories::linalg::pauli::x();
    let t = 0.7;
    let u = propagator(&x, t).unwrap();
    let expected = Operator::from_rows(&[
        vec![C64::new(t.cos(), 0.0), C64::new(0.0, -t.sin())],
        vec![C64::new(0.0, -t.sin()), C64::new(t.cos(), 0.0)],
    ])
    .unwrap();
    assert!(u.max_abs_diff(&expected) < 1e-14);
}

#[test]
fn bell_state_marginal_is_maximally_mixed() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap();
    let sig = FactorSignature::new(vec![2, 2]).unwrap();
    let rho_a = bell.density().partial_trace(&sig, &[0]).unwrap();
    assert!(rho_a.max_abs_diff(&Operator::identity(2).scale(C64::new(0.5, 0.0))) < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn group_property(seed in any::<u64>(), dim in 1usize..10, t in -3.0f64..3.0, s in -3.0f64..3.0) {
        let mut r = rng(seed);
        let h = Hamiltonian::new(&random_hermitian(&mut r, dim)).unwrap();
        let lhs = h.propagator(t + s);
        let rhs = &h.propagator(t) * &h.propagator(s);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-9);
    }

    #[test]
    fn evolution_preserves_norm(seed in any::<u64>(), dim in 1usize..12, t in -5.0f64..5.0) {
        let mut r = rng(seed);
        let h = Hamiltonian::new(&random_hermitian(&mut r, dim)).unwrap();
        let psi = random_state(&mut r, dim);
        prop_assert!((h.evolve(&psi, t).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_then_trace_recovers_factor(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
        let mut r = rng(seed);
        let a = random_hermitian(&mut r, da);
        let rho_b = random_state(&mut r, db).density();
        let sig = FactorSignature::new(vec![da, db]).unwrap();
        let back = a.tensor(&rho_b).partial_trace(&sig, &[0]).unwrap();
        prop_assert!(back.max_abs_diff(&a) < 1e-11);
        let rho_a = random_state(&mut r, da).density();
        let b = random_hermitian(&mut r, db);
        let back_b = rho_a.tensor(&b).partial_trace(&sig, &[1]).unwrap();
        prop_assert!(back_b.max_abs_diff(&b) < 1e-11);
    }

    #[test]
    fn partial_trace_preserves_trace(seed in any::<u64>(), dims in proptest::collection::vec(1usize..4, 1..4)) {
        let mut r = rng(seed);
        let sig = FactorSignature::new(dims.clone()).unwrap();
        let rho = random_state(&mut r, sig.dim()).density();
        for keep in 0..dims.len() {
            let reduced = rho.partial_trace(&sig, &[keep]).unwrap();
            prop_assert_eq!(reduced.dim(), dims[keep]);
            prop_assert!((reduced.trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
            prop_assert!(reduced.hermitian_defect() < 1e-12);
        }
    }
}
