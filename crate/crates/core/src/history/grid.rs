use super::ProjectorFamily;
use crate::error::{Error, Result};

/// One alternative per family, `α = (α₁, …, αₙ)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct History(pub Vec<usize>);

impl History {
    pub fn alternatives(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for History {
    fn from(v: Vec<usize>) -> Self {
        History(v)
    }
}

/// Projector families at strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryGrid {
    families: Vec<ProjectorFamily>,
}

impl HistoryGrid {
    pub fn new(families: Vec<ProjectorFamily>) -> Result<Self> {
        let first = families.first().ok_or(Error::EmptyGrid)?;
        let dim = first.dim();
        for (k, fam) in families.iter().enumerate().skip(1) {
            if fam.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: fam.dim() });
            }
            let previous = families[k - 1].time();
            if !(fam.time() > previous) {
                return Err(Error::TimesNotIncreasing { index: k, time: fam.time(), previous });
            }
        }
        Ok(Self { families })
    }

    pub fn families(&self) -> &[ProjectorFamily] {
        &self.families
    }

    pub fn family(&self, k: usize) -> &ProjectorFamily {
        &self.families[k]
    }

    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.families[0].dim()
    }

    pub fn times(&self) -> Vec<f64> {
        self.families.iter().map(|f| f.time()).collect()
    }

    /// Number of alternatives per family.
    pub fn shape(&self) -> Vec<usize> {
        self.families.iter().map(|f| f.len()).collect()
    }

    /// Size of the history index space, saturating instead of overflowing.
    pub fn history_count(&self) -> u128 {
        self.families.iter().fold(1u128, |acc, f| acc.saturating_mul(f.len() as u128))
    }

    /// The history count, or an error if it exceeds `cap`.
    pub fn check_cap(&self, cap: usize) -> Result<usize> {
        let count = self.history_count();
        if count > cap as u128 {
            return Err(Error::HistoryCapExceeded { count, cap });
        }
        Ok(count as usize)
    }

    pub fn contains(&self, h: &History) -> bool {
        h.0.len() == self.len() && h.0.iter().zip(self.shape()).all(|(&a, n)| a < n)
    }

    pub(crate) fn ensure_contains(&self, h: &History) -> Result<()> {
        if self.contains(h) {
            Ok(())
        } else {
            Err(Error::HistoryOutOfRange { history: h.0.clone(), shape: self.shape() })
        }
    }

    /// Position of `h` in [`HistoryGrid::histories`] order (first family most significant).
    pub fn flat_index(&self, h: &History) -> usize {
        h.0.iter().zip(self.shape()).fold(0, |acc, (&a, n)| acc * n + a)
    }

    pub fn history_at(&self, mut index: usize) -> History {
        let shape = self.shape();
        let mut alts = vec![0; shape.len()];
        for (slot, n) in alts.iter_mut().zip(&shape).rev() {
            *slot = index % n;
            index /= n;
        }
        History(alts)
    }

    /// Lazily enumerates every history, last family varying fastest.
    pub fn histories(&self) -> Histories {
        Histories { shape: self.shape(), next: Some(vec![0; self.len()]) }
    }

    pub fn label_path(&self, h: &History) -> Vec<String> {
        h.0.iter().zip(&self.families).map(|(&a, f)| f.labels()[a].clone()).collect()
    }

    /// The grid restricted to the listed families (kept in time order).
    pub fn subgrid(&self, indices: &[usize]) -> Result<HistoryGrid> {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.len()) {
            return Err(Error::Condition(format!("family index {bad} out of range for {} families", self.len())));
        }
        HistoryGrid::new(idx.iter().map(|&i| self.families[i].clone()).collect())
    }
}

/// Odometer over the history index space.
#[derive(Debug, Clone)]
pub struct Histories {
    shape: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for Histories {
    type Item = History;

    fn next(&mut self) -> Option<History> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut k = succ.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            succ[k] += 1;
            if succ[k] < self.shape[k] {
                self.next = Some(succ);
                break;
            }
            succ[k] = 0;
        }
        Some(History(current))
    }
}
