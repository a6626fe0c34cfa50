use faer::Mat;

use super::{BranchSet, History};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// A partition of `0..n` into nonempty disjoint classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    classes: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(classes: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for (k, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::Partition(format!("class {k} is empty")));
            }
            for &i in class {
                if i >= n {
                    return Err(Error::Partition(format!("element {i} out of range 0..{n}")));
                }
                if seen[i] {
                    return Err(Error::Partition(format!("element {i} appears in more than one class")));
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::Partition(format!("element {missing} is not covered")));
        }
        Ok(Self { classes })
    }

    /// Every element in its own class.
    pub fn finest(n: usize) -> Self {
        Self { classes: (0..n).map(|i| vec![i]).collect() }
    }

    /// A single class holding everything.
    pub fn coarsest(n: usize) -> Self {
        Self { classes: vec![(0..n).collect()] }
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Merges branch vectors class by class: `|Ψ_ᾱ⟩ = Σ_{α∈ᾱ} |Ψ_α⟩`.
pub fn coarse_grain(branches: &BranchSet, partition: &Partition) -> Result<BranchSet> {
    if partition.classes().iter().flatten().count() != branches.len() {
        return Err(Error::Partition(format!(
            "partition covers {} histories but the set has {}",
            partition.classes().iter().flatten().count(),
            branches.len()
        )));
    }
    Partition::new(partition.classes().to_vec(), branches.len())?;
    let fine = branches.matrix();
    let d = branches.dim();
    let mut vectors = Mat::<C64>::zeros(d, partition.len());
    for (k, class) in partition.classes().iter().enumerate() {
        let col = vectors.col_as_slice_mut(k);
        for &i in class {
            for (a, x) in col.iter_mut().zip(fine.col_as_slice(i)) {
                *a += x;
            }
        }
    }
    let labels = partition
        .classes()
        .iter()
        .map(|class| {
            let names: Vec<String> = class.iter().map(|&i| branches.labels()[i].join("/")).collect();
            vec![names.join(" | ")]
        })
        .collect();
    let histories = (0..partition.len()).map(|k| History(vec![k])).collect();
    Ok(BranchSet::from_parts(vectors, labels, histories, branches.times().to_vec(), branches.mode(), true))
}
