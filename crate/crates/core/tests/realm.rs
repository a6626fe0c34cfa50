use std::f64::consts::PI;

use histories::history::EvalOptions;
use histories::models::{build_two_slit, random_grid, random_hermitian, random_state, TwoSlitParams};
use histories::linalg::Dynamics;
use histories::realm::{bell_number, scan, RankRule};
use histories::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn slit_scan(env_spins: usize, coupling_angle: f64, rule: RankRule) -> histories::realm::ScanReport {
    let m = build_two_slit(&TwoSlitParams { env_spins, coupling_angle, ..Default::default() }).unwrap();
    scan(m.grid("slit-screen").unwrap(), &[0], &m.dynamics, &m.psi0, &EvalOptions::default(), rule).unwrap()
}

fn separates(labels: &[String]) -> bool {
    !labels.iter().any(|c| c.contains("slit1") && c.contains("slit2"))
}

#[test]
fn which_path_record_selects_the_slit_realm() {
    let report = slit_scan(1, PI / 2.0, RankRule::Quasiclassical);
    assert_eq!(report.candidates.len(), 5);
    let best = report.best();
    assert!(best.score.certified);
    assert!(separates(&best.class_labels), "{:?}", best.class_labels);
    assert!((best.score.entropy_bits - (1.0 + 3.0)).abs() < 1e-9);
}

#[test]
fn without_a_record_only_merged_slits_decohere() {
    let report = slit_scan(0, 0.0, RankRule::Quasiclassical);
    for c in &report.candidates {
        assert_eq!(c.score.certified, !separates(&c.class_labels), "{:?}", c.class_labels);
    }
    assert!(!separates(&report.best().class_labels));
}

#[test]
fn least_interference_puts_the_smallest_offdiagonal_first() {
    let report = slit_scan(3, 0.4, RankRule::LeastInterference);
    let min = report.candidates.iter().map(|c| c.score.max_offdiag).fold(f64::INFINITY, f64::min);
    assert!((report.best().score.max_offdiag - min).abs() < 1e-12);
}

#[test]
fn unequal_varied_families_are_rejected() {
    let m = build_two_slit(&TwoSlitParams::default()).unwrap();
    let err = scan(m.grid("slit-screen").unwrap(), &[0, 1], &m.dynamics, &m.psi0, &EvalOptions::default(), RankRule::default());
    assert!(matches!(err, Err(Error::Partition(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn scan_covers_every_partition_in_rank_order(
        seed in any::<u64>(), members in 1usize..5, times in 1usize..3, least in any::<bool>(),
    ) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let dim = 5;
        let h = random_hermitian(&mut r, dim);
        let t: Vec<f64> = (1..=times).map(|k| k as f64).collect();
        let grid = random_grid(&mut r, dim, &t, members).unwrap();
        let psi = random_state(&mut r, dim);
        let rule = if least { RankRule::LeastInterference } else { RankRule::Quasiclassical };
        let varied: Vec<usize> = (0..times).collect();
        let report = scan(&grid, &varied, &Dynamics::from_operator(&h).unwrap(), &psi, &EvalOptions::default(), rule).unwrap();
        prop_assert_eq!(report.candidates.len() as u64, bell_number(members));
        let mut seen: Vec<usize> = report.candidates.iter().map(|c| c.index).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..report.candidates.len()).collect::<Vec<_>>());
        for c in &report.candidates {
            let coarse = (c.score.classes as f64).powi(times as i32);
            prop_assert!(c.score.entropy_bits <= coarse.log2() + 1e-9);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&c.score.persistence));
        }
        for pair in report.candidates.windows(2) {
            prop_assert!(rule.compare(&pair[0].score, &pair[1].score) != std::cmp::Ordering::Greater);
        }
        // the coarsest graining has a single history, which always decoheres
        let coarsest = report.candidates.iter().find(|c| c.index == 0).unwrap();
        prop_assert!(coarsest.score.certified && coarsest.score.entropy_bits.abs() < 1e-12);
    }
}
