use std::fmt;

use super::Projector;
use crate::error::{Error, Result};
use crate::linalg::{Dynamics, Operator};
use crate::tol;

/// Which picture a family's operators are written in.
///
/// `Schrodinger` members are the time-0 representatives `P̂`, with
/// `P(t) = U(t)† P̂ U(t)`. `Heisenberg` members are already `P(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    Schrodinger,
    Heisenberg,
}

/// One way a candidate family fails the exhaustive-and-exclusive axioms.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyIssue {
    Empty,
    LabelCount { labels: usize, members: usize },
    Dimension { member: usize, expected: usize, found: usize },
    NotProjector { member: usize, idempotency: f64, asymmetry: f64 },
    Overlap { first: usize, second: usize, defect: f64 },
    Incomplete { defect: f64 },
}

/// Everything wrong with a candidate family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyViolation {
    pub issues: Vec<FamilyIssue>,
}

impl fmt::Display for FamilyIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyIssue::Empty => write!(f, "family has no members"),
            FamilyIssue::LabelCount { labels, members } => write!(f, "{labels} labels for {members} members"),
            FamilyIssue::Dimension { member, expected, found } => {
                write!(f, "member {member} has dim {found}, expected {expected}")
            }
            FamilyIssue::NotProjector { member, idempotency, asymmetry } => write!(
                f,
                "member {member} is not a projector (|P^2-P| = {idempotency:.3e}, |P-P^dagger| = {asymmetry:.3e})"
            ),
            FamilyIssue::Overlap { first, second, defect } => {
                write!(f, "members {first} and {second} are not orthogonal (|P_a P_b| = {defect:.3e})")
            }
            FamilyIssue::Incomplete { defect } => write!(f, "members do not sum to identity (|sum - I| = {defect:.3e})"),
        }
    }
}

impl fmt::Display for FamilyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.issues.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// An exhaustive set of mutually orthogonal projectors attached to a time.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorFamily {
    time: f64,
    picture: Picture,
    members: Vec<Projector>,
    labels: Vec<String>,
}

impl ProjectorFamily {
    pub fn new(time: f64, picture: Picture, members: Vec<Projector>, labels: Vec<String>) -> Result<Self> {
        validate_family(&members, &labels)?;
        if !time.is_finite() {
            return Err(Error::Parameter(format!("family time {time} is not finite")));
        }
        Ok(Self { time, picture, members, labels })
    }

    /// A family of basis-subspace projectors: member `k` spans the basis
    /// states listed in `classes[k]`.
    pub fn from_basis_classes(
        time: f64,
        dim: usize,
        classes: &[Vec<usize>],
        labels: Vec<String>,
    ) -> Result<Self> {
        let members = classes.iter().map(|c| Projector::onto_basis(dim, c.iter().copied())).collect();
        Self::new(time, Picture::Schrodinger, members, labels)
    }

    /// The trivial family `{I}`.
    pub fn identity(time: f64, dim: usize) -> Self {
        Self {
            time,
            picture: Picture::Schrodinger,
            members: vec![Projector::onto_basis(dim, 0..dim)],
            labels: vec!["all".into()],
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    pub fn members(&self) -> &[Projector] {
        &self.members
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// The same alternatives written as Heisenberg operators `P(t)`.
    pub fn heisenberg(&self, dynamics: &Dynamics) -> ProjectorFamily {
        match self.picture {
            Picture::Heisenberg => self.clone(),
            Picture::Schrodinger => ProjectorFamily {
                time: self.time,
                picture: Picture::Heisenberg,
                members: self.members.iter().map(|p| p.heisenberg(dynamics, self.time)).collect(),
                labels: self.labels.clone(),
            },
        }
    }

    /// The same alternatives written as time-0 representatives `P̂`.
    pub fn schrodinger(&self, dynamics: &Dynamics) -> ProjectorFamily {
        match self.picture {
            Picture::Schrodinger => self.clone(),
            Picture::Heisenberg => ProjectorFamily {
                time: self.time,
                picture: Picture::Schrodinger,
                members: self.members.iter().map(|p| p.schrodinger(dynamics, self.time)).collect(),
                labels: self.labels.clone(),
            },
        }
    }

    /// Merges members class by class; `classes` must partition the members.
    pub fn coarsen(&self, classes: &[Vec<usize>]) -> Result<ProjectorFamily> {
        super::Partition::new(classes.to_vec(), self.len())?;
        let members = classes
            .iter()
            .map(|c| Projector::merge(&c.iter().map(|&i| &self.members[i]).collect::<Vec<_>>()))
            .collect();
        let labels =
            classes.iter().map(|c| c.iter().map(|&i| self.labels[i].as_str()).collect::<Vec<_>>().join("+")).collect();
        Ok(ProjectorFamily { time: self.time, picture: self.picture, members, labels })
    }
}

/// Checks completeness `Σ P_α = I` and orthogonality `P_α P_β = δ_αβ P_α`
/// within 1e-10, reporting every failing member and pair.
pub fn validate_family(members: &[Projector], labels: &[String]) -> Result<()> {
    let mut issues = Vec::new();
    if members.is_empty() {
        return Err(Error::Family(FamilyViolation { issues: vec![FamilyIssue::Empty] }));
    }
    if labels.len() != members.len() {
        issues.push(FamilyIssue::LabelCount { labels: labels.len(), members: members.len() });
    }
    let dim = members[0].dim();
    for (k, m) in members.iter().enumerate() {
        if m.dim() != dim {
            issues.push(FamilyIssue::Dimension { member: k, expected: dim, found: m.dim() });
        }
    }
    if !issues.is_empty() {
        return Err(Error::Family(FamilyViolation { issues }));
    }

    if let Some(masks) = members.iter().map(|p| p.basis_mask()).collect::<Option<Vec<_>>>() {
        for a in 0..masks.len() {
            for b in a + 1..masks.len() {
                if (0..dim).any(|i| masks[a][i] && masks[b][i]) {
                    issues.push(FamilyIssue::Overlap { first: a, second: b, defect: 1.0 });
                }
            }
        }
        let defect = (0..dim)
            .map(|i| (masks.iter().filter(|m| m[i]).count() as f64 - 1.0).abs())
            .fold(0.0, f64::max);
        if defect > tol::STRUCTURAL {
            issues.push(FamilyIssue::Incomplete { defect });
        }
    } else {
        let ops: Vec<Operator> = members.iter().map(|p| p.to_operator()).collect();
        for (k, op) in ops.iter().enumerate() {
            let idempotency = op.idempotency_defect();
            let asymmetry = op.hermitian_defect();
            if idempotency > tol::STRUCTURAL || asymmetry > tol::STRUCTURAL {
                issues.push(FamilyIssue::NotProjector { member: k, idempotency, asymmetry });
            }
        }
        for a in 0..ops.len() {
            for b in a + 1..ops.len() {
                let defect = (&ops[a] * &ops[b]).max_abs();
                if defect > tol::STRUCTURAL {
                    issues.push(FamilyIssue::Overlap { first: a, second: b, defect });
                }
            }
        }
        let mut sum = Operator::zeros(dim);
        for op in &ops {
            sum = &sum + op;
        }
        let defect = sum.max_abs_diff(&Operator::identity(dim));
        if defect > tol::STRUCTURAL {
            issues.push(FamilyIssue::Incomplete { defect });
        }
    }

    if issues.is_empty() {
        Ok(())
    } else {
        Err(Error::Family(FamilyViolation { issues }))
    }
}
