//! Search over coarse-grainings of a fine history grid.
//!
//! A candidate realm merges the members of selected families according to a
//! set partition, the same partition at every selected time. Candidates are
//! scored on interference, Shannon entropy and record persistence, then
//! ranked by a [`RankRule`].

use std::fmt;

use crate::error::{Error, Result};
use crate::history::{
    coarse_grain, decoherence_functional, BranchSet, DecoherenceReport, EvalOptions, HistoryGrid, Partition,
};
use crate::linalg::{Dynamics, StateVector};
use crate::tol;

/// Largest fine family the enumerator accepts (`B(12) = 4 213 597` candidates).
pub const MAX_MEMBERS: usize = 12;

/// Number of set partitions of an `n`-element set.
pub fn bell_number(n: usize) -> u64 {
    // Bell triangle
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

/// Set partitions of `0..n` in lexicographic order of their restricted
/// growth strings: the first is the coarsest, the last the finest.
#[derive(Debug, Clone)]
pub struct SetPartitions {
    rgs: Vec<usize>,
    done: bool,
}

impl Iterator for SetPartitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let n = self.rgs.len();
        let blocks = self.rgs.iter().max().map_or(0, |m| m + 1);
        let mut classes = vec![Vec::new(); blocks];
        for (i, &b) in self.rgs.iter().enumerate() {
            classes[b].push(i);
        }
        // advance: bump the rightmost position that may grow
        self.done = true;
        for i in (1..n).rev() {
            let prefix_max = self.rgs[..i].iter().max().copied().unwrap_or(0);
            if self.rgs[i] <= prefix_max {
                self.rgs[i] += 1;
                self.rgs[i + 1..].iter_mut().for_each(|x| *x = 0);
                self.done = false;
                break;
            }
        }
        Some(Partition::new(classes, n).expect("growth strings encode partitions"))
    }
}

/// Every way to merge `members` alternatives into classes, in a fixed order.
pub fn enumerate_grainings(members: usize) -> Result<SetPartitions> {
    if members == 0 || members > MAX_MEMBERS {
        return Err(Error::Partition(format!("can enumerate families of 1..={MAX_MEMBERS} members, got {members}")));
    }
    Ok(SetPartitions { rgs: vec![0; members], done: false })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealmScore {
    pub max_offdiag: f64,
    pub certified: bool,
    /// Shannon entropy, in bits, of the clamped diagonal weights.
    pub entropy_bits: f64,
    /// For each pair of consecutive varied times, the smallest probability
    /// over classes of staying in the same class, averaged over pairs.
    /// Exactly 1 when fewer than two times are varied.
    pub persistence: f64,
    pub classes: usize,
}

/// Scores a coarse-grained set whose histories are laid out on `shape`,
/// with `varied` listing the positions whose classes correspond in time.
pub fn score(report: &DecoherenceReport, shape: &[usize], varied: &[usize]) -> Result<RealmScore> {
    let n: usize = shape.iter().product();
    if n != report.len() {
        return Err(Error::Partition(format!("shape {shape:?} has {n} histories, report has {}", report.len())));
    }
    let weights: Vec<f64> = report.diagonal().into_iter().map(|p| p.max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    let entropy_bits = if total > 0.0 {
        -weights.iter().filter(|&&w| w > 0.0).map(|&w| (w / total) * (w / total).log2()).sum::<f64>()
    } else {
        0.0
    };

    let digits = |mut index: usize| {
        let mut out = vec![0; shape.len()];
        for (slot, &m) in out.iter_mut().zip(shape).rev() {
            *slot = index % m;
            index /= m;
        }
        out
    };
    let mut persistence = 1.0;
    if varied.len() >= 2 {
        let classes = shape[varied[0]];
        let mut sum = 0.0;
        for pair in varied.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let mut stay = vec![0.0; classes];
            let mut mass = vec![0.0; classes];
            for (i, &w) in weights.iter().enumerate() {
                let x = digits(i);
                mass[x[a]] += w;
                if x[a] == x[b] {
                    stay[x[a]] += w;
                }
            }
            let worst = (0..classes)
                .filter(|&c| mass[c] > tol::DIVISION_FLOOR)
                .map(|c| stay[c] / mass[c])
                .fold(f64::INFINITY, f64::min);
            sum += if worst.is_finite() { worst } else { 0.0 };
        }
        persistence = sum / (varied.len() - 1) as f64;
    }

    Ok(RealmScore {
        max_offdiag: report.max_offdiag(),
        certified: report.certified(),
        entropy_bits,
        persistence,
        classes: shape[varied.first().copied().unwrap_or(0)],
    })
}

/// How scanned candidates are ordered, best first. Ties fall back to fewer
/// classes and then to enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankRule {
    /// Certified first, then higher persistence, then higher entropy: the
    /// most refined decoherent description whose records last.
    #[default]
    Quasiclassical,
    /// Smallest off-diagonal interference first.
    LeastInterference,
}

impl fmt::Display for RankRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankRule::Quasiclassical => "certified > persistence desc > entropy desc > classes asc",
            RankRule::LeastInterference => "max_offdiag asc > classes asc",
        })
    }
}

/// Orders `a` before `b` when `a` exceeds `b` by more than rounding noise.
fn desc(a: f64, b: f64) -> std::cmp::Ordering {
    if (a - b).abs() <= RANK_TIE {
        std::cmp::Ordering::Equal
    } else {
        b.total_cmp(&a)
    }
}

/// Scores closer than this rank as tied.
const RANK_TIE: f64 = 1e-12;

impl RankRule {
    /// `Less` when `a` ranks ahead of `b`.
    pub fn compare(self, a: &RealmScore, b: &RealmScore) -> std::cmp::Ordering {
        let primary = match self {
            RankRule::Quasiclassical => b
                .certified
                .cmp(&a.certified)
                .then(desc(a.persistence, b.persistence))
                .then(desc(a.entropy_bits, b.entropy_bits)),
            RankRule::LeastInterference => desc(b.max_offdiag, a.max_offdiag),
        };
        primary.then(a.classes.cmp(&b.classes))
    }
}

#[derive(Debug, Clone)]
pub struct Candidate {
    /// Position in enumeration order.
    pub index: usize,
    pub partition: Partition,
    /// Member labels of each class, joined with `+`.
    pub class_labels: Vec<String>,
    pub score: RealmScore,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub rule: RankRule,
    pub varied: Vec<usize>,
    pub epsilon: f64,
    /// Best first.
    pub candidates: Vec<Candidate>,
}

impl ScanReport {
    pub fn best(&self) -> &Candidate {
        &self.candidates[0]
    }
}

/// Tries every partition of the members of the families at `varied`
/// (applied identically at each) and ranks the results.
///
/// The fine grid is evaluated once; each candidate's branches are sums of
/// fine branches, so no chain is recomputed.
pub fn scan(
    grid: &HistoryGrid,
    varied: &[usize],
    dynamics: &Dynamics,
    psi: &StateVector,
    options: &EvalOptions,
    rule: RankRule,
) -> Result<ScanReport> {
    let mut varied = varied.to_vec();
    varied.sort_unstable();
    varied.dedup();
    if varied.is_empty() {
        return Err(Error::Partition("no families selected for coarse-graining".into()));
    }
    if let Some(&bad) = varied.iter().find(|&&k| k >= grid.len()) {
        return Err(Error::Partition(format!("family index {bad} out of range for {} families", grid.len())));
    }
    let members = grid.family(varied[0]).len();
    if let Some(&k) = varied.iter().find(|&&k| grid.family(k).len() != members) {
        return Err(Error::Partition(format!(
            "varied families must have equal size: family {} has {members} members, family {k} has {}",
            varied[0],
            grid.family(k).len()
        )));
    }
    let fine = BranchSet::build(grid, dynamics, psi, options)?;
    let fine_shape = grid.shape();
    let labels = grid.family(varied[0]).labels();

    let mut candidates = Vec::new();
    for (index, partition) in enumerate_grainings(members)?.enumerate() {
        let mut class_of = vec![0; members];
        for (c, class) in partition.classes().iter().enumerate() {
            for &m in class {
                class_of[m] = c;
            }
        }
        let coarse_shape: Vec<usize> =
            fine_shape.iter().enumerate().map(|(k, &n)| if varied.contains(&k) { partition.len() } else { n }).collect();
        let coarse_count: usize = coarse_shape.iter().product();
        let mut groups = vec![Vec::new(); coarse_count];
        for (i, h) in grid.histories().enumerate() {
            let target = h
                .alternatives()
                .iter()
                .enumerate()
                .zip(&coarse_shape)
                .fold(0, |acc, ((k, &a), &n)| acc * n + if varied.contains(&k) { class_of[a] } else { a });
            groups[target].push(i);
        }
        let merged = coarse_grain(&fine, &Partition::new(groups, fine.len())?)?;
        let report = decoherence_functional(&merged, options.epsilon);
        let class_labels = partition
            .classes()
            .iter()
            .map(|c| c.iter().map(|&m| labels[m].as_str()).collect::<Vec<_>>().join("+"))
            .collect();
        candidates.push(Candidate { index, score: score(&report, &coarse_shape, &varied)?, partition, class_labels });
    }
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    candidates.sort_by(|a, b| rule.compare(&a.score, &b.score).then(a.index.cmp(&b.index)));
    Ok(ScanReport { rule, varied, epsilon: options.epsilon, candidates })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let expected = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597];
        for (n, &b) in expected.iter().enumerate() {
            assert_eq!(bell_number(n), b);
        }
    }

    #[test]
    fn enumeration_counts_and_order() {
        for n in 1..=7 {
            let all: Vec<Partition> = enumerate_grainings(n).unwrap().collect();
            assert_eq!(all.len() as u64, bell_number(n));
            assert_eq!(all[0], Partition::coarsest(n));
            assert_eq!(all.last().unwrap(), &Partition::finest(n));
        }
        let three: Vec<Vec<Vec<usize>>> = enumerate_grainings(3).unwrap().map(|p| p.classes().to_vec()).collect();
        assert_eq!(
            three,
            vec![
                vec![vec![0, 1, 2]],
                vec![vec![0, 1], vec![2]],
                vec![vec![0, 2], vec![1]],
                vec![vec![0], vec![1, 2]],
                vec![vec![0], vec![1], vec![2]],
            ]
        );
        assert!(enumerate_grainings(13).is_err());
        assert!(enumerate_grainings(0).is_err());
    }

    #[test]
    fn apparatus_scan_prefers_pointer_classes() {
        let m = crate::models::build_stern_gerlach(&Default::default()).unwrap();
        let grid = m.grid("apparatus").unwrap();
        let report = scan(grid, &[0, 1, 2], &m.dynamics, &m.psi0, &EvalOptions::default(), RankRule::default()).unwrap();
        assert_eq!(report.candidates.len(), 15);
        let best = report.best();
        assert_eq!(best.class_labels, vec!["p0r0+p0r1", "p1r0+p1r1"]);
        assert!(best.score.certified);
        assert!((best.score.persistence - 1.0).abs() < 1e-12);
    }
}
