use std::f64::consts::PI;

use histories::history::{evaluate, probabilities, EvalOptions, History};
use histories::models::{build_cat, build_stern_gerlach, build_two_slit, CatParams, EnvEncoding, SternGerlachParams, TwoSlitParams};
use histories::linalg::C64;

fn slit_interference(p: &TwoSlitParams, bin: usize) -> C64 {
    let m = build_two_slit(p).unwrap();
    let grid = m.grid("slit-screen").unwrap();
    let (_, report) = evaluate(grid, &m.dynamics, &m.psi0, &EvalOptions::default()).unwrap();
    report.entry(grid.flat_index(&History(vec![0, bin])), grid.flat_index(&History(vec![1, bin])))
}

#[test]
fn two_slit_matches_closed_form() {
    let a1 = C64::from_polar(0.6, 0.3);
    let a2 = C64::from_polar(0.8, -1.1);
    for (n, angle) in [(0, 0.0), (2, 0.35), (6, 1.0), (11, PI / 3.0)] {
        let p = TwoSlitParams { a1, a2, env_spins: n, coupling_angle: angle, ..Default::default() };
        let l = p.screen_bins as f64;
        for b in 0..p.screen_bins {
            let expected =
                a1.conj() * a2 * C64::from_polar(1.0 / l, -2.0 * PI * b as f64 / l) * angle.cos().powi(n as i32);
            assert!((slit_interference(&p, b) - expected).norm() < 1e-12, "n {n} bin {b}");
        }
    }
}

#[test]
fn environment_encodings_agree() {
    for n in [1, 3, 4] {
        let base = TwoSlitParams { env_spins: n, coupling_angle: 0.8, ..Default::default() };
        let q = slit_interference(&TwoSlitParams { encoding: EnvEncoding::Qubits, ..base }, 2);
        let c = slit_interference(&TwoSlitParams { encoding: EnvEncoding::Collective, ..base }, 2);
        assert!((q - c).norm() < 1e-13);
    }
}

#[test]
fn full_which_path_record_certifies_the_slit_set() {
    let p = TwoSlitParams { env_spins: 1, coupling_angle: PI / 2.0, ..Default::default() };
    let m = build_two_slit(&p).unwrap();
    let (_, report) = evaluate(m.grid("slit-screen").unwrap(), &m.dynamics, &m.psi0, &EvalOptions::default()).unwrap();
    assert!(report.certified(), "max off-diagonal {}", report.max_offdiag());
    let bare = build_two_slit(&TwoSlitParams::default()).unwrap();
    let (_, report) =
        evaluate(bare.grid("slit-screen").unwrap(), &bare.dynamics, &bare.psi0, &EvalOptions::default()).unwrap();
    assert!(!report.certified());
}

#[test]
fn screen_pattern_without_environment_shows_fringes() {
    let m = build_two_slit(&TwoSlitParams::default()).unwrap();
    let (_, report) = evaluate(m.grid("screen").unwrap(), &m.dynamics, &m.psi0, &EvalOptions::default()).unwrap();
    let p = probabilities(&report).unwrap();
    // |⟨x_b|(|0⟩ + |1⟩)/√2⟩|² = (1 + cos(2πb/L)) / L
    for (b, pb) in p.iter().enumerate() {
        let expected = (1.0 + (2.0 * PI * b as f64 / 8.0).cos()) / 8.0;
        assert!((pb - expected).abs() < 1e-12);
    }
}

#[test]
fn measured_spin_and_record_agree() {
    let theta = 1.2;
    let m = build_stern_gerlach(&SternGerlachParams { theta, precession: 0.9 }).unwrap();
    let (_, report) = evaluate(m.grid("measurement").unwrap(), &m.dynamics, &m.psi0, &EvalOptions::default()).unwrap();
    let p = probabilities(&report).unwrap();
    assert!((p[0] - (theta / 2.0).cos().powi(2)).abs() < 1e-12);
    assert!(p[1].abs() < 1e-15 && p[2].abs() < 1e-15);
}

#[test]
fn cat_outcomes() {
    let beta = C64::from_polar(0.5, 0.4);
    let m = build_cat(&CatParams { beta, env_qubits: 2 }).unwrap();
    let grid = m.grid("alive-dead").unwrap();
    let fam = grid.family(0);
    let product = &fam.members()[0].to_operator() * &fam.members()[1].to_operator();
    assert_eq!(product.max_abs(), 0.0);
    let (_, report) = evaluate(grid, &m.dynamics, &m.psi0, &EvalOptions::default()).unwrap();
    let p = probabilities(&report).unwrap();
    assert!((p[3] - beta.norm_sqr()).abs() < 1e-12, "dead then dead");
    assert!(p[1].abs() < 1e-15 && p[2].abs() < 1e-15);
}

#[test]
fn cat_environment_suppresses_recoherence() {
    let with_env = build_cat(&CatParams { env_qubits: 2, ..Default::default() }).unwrap();
    let bare = build_cat(&CatParams { env_qubits: 0, ..Default::default() }).unwrap();
    let verdict = |m: &histories::models::ModelSpec| {
        let (_, r) = evaluate(m.grid("recoherence").unwrap(), &m.dynamics, &m.psi0, &EvalOptions::default()).unwrap();
        r.certified()
    };
    assert!(verdict(&with_env));
    assert!(!verdict(&bare));
}
