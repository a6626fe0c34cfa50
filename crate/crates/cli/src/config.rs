//! JSON run configuration.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major nested arrays
//! of them. Either `model` (a registry builder) or `system` (explicit
//! operators) describes the theory.

use std::collections::BTreeMap;
use std::path::Path;

use histories::history::{HistoryGrid, Picture, Projector, ProjectorFamily};
use histories::inference::Alternative;
use histories::linalg::{Dynamics, FactorSignature, Hamiltonian, Kick, Operator, StateVector, C64};
use histories::models::{self, ModelSpec};
use serde::Deserialize;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    /// Informational; the subcommand decides what runs.
    #[serde(default)]
    pub operation: Option<String>,
    #[serde(default)]
    pub model: Option<ModelRef>,
    #[serde(default)]
    pub system: Option<SystemSpec>,
    #[serde(default)]
    pub grid: Option<GridRef>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub max_histories: Option<usize>,
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub predict: Option<PredictSpec>,
    #[serde(default)]
    pub retrodict: Option<RetrodictSpec>,
    #[serde(default)]
    pub scan: Option<ScanSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelRef {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub dims: Vec<usize>,
    pub hamiltonian: Matrix,
    pub state: Vec<Complex>,
    #[serde(default)]
    pub kicks: Vec<KickSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KickSpec {
    pub time: f64,
    pub unitary: Matrix,
    #[serde(default)]
    pub label: String,
}

/// A suggested grid of the model by name, or explicit families.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GridRef {
    Named(String),
    Families(Vec<FamilySpec>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub time: f64,
    #[serde(default)]
    pub picture: PictureSpec,
    pub members: Vec<MemberSpec>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PictureSpec {
    #[default]
    Schrodinger,
    Heisenberg,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemberSpec {
    /// Computational basis indices spanned by the member.
    Basis(Vec<usize>),
    /// Orthonormal vectors spanning the member.
    Vectors(Vec<Vec<Complex>>),
    Matrix(Matrix),
}

/// An alternative by index or by label.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AltRef {
    Index(usize),
    Label(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlternativeSpec {
    pub family: usize,
    pub alternative: AltRef,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictSpec {
    #[serde(default)]
    pub condition: Vec<AlternativeSpec>,
    pub future: AlternativeSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetrodictSpec {
    pub present: AlternativeSpec,
    #[serde(default)]
    pub past: Vec<AlternativeSpec>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    /// Families to coarse-grain; defaults to every family.
    #[serde(default)]
    pub vary: Option<Vec<usize>>,
    #[serde(default)]
    pub rule: Option<String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Config = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        Ok(config)
    }
}

/// The theory and grid a run operates on.
pub struct Setup {
    pub label: String,
    pub dynamics: Dynamics,
    pub psi: StateVector,
    pub grid: HistoryGrid,
    pub grid_name: String,
}

fn complex(c: &Complex) -> C64 {
    C64::new(c[0], c[1])
}

fn matrix(m: &Matrix, what: &str) -> Result<Operator, CliError> {
    let rows: Vec<Vec<C64>> = m.iter().map(|r| r.iter().map(complex).collect()).collect();
    let op = Operator::from_rows(&rows).map_err(|e| CliError::Config(format!("{what}: {e}")))?;
    if op.dim() != m.len() {
        return Err(CliError::Config(format!("{what}: matrix must be square")));
    }
    Ok(op)
}

fn family(spec: &FamilySpec, dim: usize, k: usize) -> Result<ProjectorFamily, CliError> {
    let members = spec
        .members
        .iter()
        .enumerate()
        .map(|(m, member)| match member {
            MemberSpec::Basis(indices) => {
                if let Some(&bad) = indices.iter().find(|&&i| i >= dim) {
                    return Err(CliError::Config(format!("family {k} member {m}: basis index {bad} >= dim {dim}")));
                }
                Ok(Projector::onto_basis(dim, indices.iter().copied()))
            }
            MemberSpec::Vectors(vs) => {
                let states = vs
                    .iter()
                    .map(|v| StateVector::new(v.iter().map(complex).collect()))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Projector::onto_vectors(&states)?)
            }
            MemberSpec::Matrix(mat) => Ok(Projector::from_operator(matrix(mat, &format!("family {k} member {m}"))?)?),
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let labels = spec.labels.clone().unwrap_or_else(|| (0..members.len()).map(|i| i.to_string()).collect());
    let picture = match spec.picture {
        PictureSpec::Schrodinger => Picture::Schrodinger,
        PictureSpec::Heisenberg => Picture::Heisenberg,
    };
    Ok(ProjectorFamily::new(spec.time, picture, members, labels)?)
}

fn explicit_grid(families: &[FamilySpec], dim: usize) -> Result<HistoryGrid, CliError> {
    let fams = families.iter().enumerate().map(|(k, f)| family(f, dim, k)).collect::<Result<Vec<_>, _>>()?;
    Ok(HistoryGrid::new(fams)?)
}

fn system(spec: &SystemSpec) -> Result<(Dynamics, StateVector), CliError> {
    let sig = FactorSignature::new(spec.dims.clone())?;
    let h = matrix(&spec.hamiltonian, "hamiltonian")?;
    if h.dim() != sig.dim() {
        return Err(CliError::Config(format!("hamiltonian has dim {}, dims multiply to {}", h.dim(), sig.dim())));
    }
    let kicks = spec
        .kicks
        .iter()
        .enumerate()
        .map(|(k, kick)| {
            Ok(Kick { time: kick.time, unitary: matrix(&kick.unitary, &format!("kick {k}"))?, label: kick.label.clone() })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let dynamics = Dynamics::with_kicks(Hamiltonian::new(&h)?, kicks)?;
    let psi = StateVector::new(spec.state.iter().map(complex).collect())?;
    if psi.dim() != sig.dim() {
        return Err(CliError::Config(format!("state has dim {}, dims multiply to {}", psi.dim(), sig.dim())));
    }
    if !psi.is_normalized() {
        return Err(CliError::Config(format!("state must be normalized, norm^2 = {}", psi.norm_sqr())));
    }
    Ok((dynamics, psi))
}

impl Config {
    /// Builds the theory and grid. `seed` replaces the random model's seed.
    pub fn setup(&self, seed: Option<u64>) -> Result<Setup, CliError> {
        match (&self.model, &self.system) {
            (Some(_), Some(_)) => Err(CliError::Config("give either 'model' or 'system', not both".into())),
            (None, None) => Err(CliError::Config("config needs a 'model' or a 'system'".into())),
            (Some(m), None) => {
                let mut params = m.params.clone();
                if let (Some(seed), "random") = (seed, m.name.as_str()) {
                    params.insert("seed".into(), seed as f64);
                }
                let spec: ModelSpec = models::build_named(&m.name, &params)?;
                let (grid_name, grid) = match &self.grid {
                    None => (spec.grids[0].0.clone(), spec.grids[0].1.clone()),
                    Some(GridRef::Named(name)) => {
                        let g = spec.grid(name).ok_or_else(|| {
                            CliError::Config(format!(
                                "model '{}' has no grid '{name}' (available: {})",
                                m.name,
                                spec.grid_names().join(", ")
                            ))
                        })?;
                        (name.clone(), g.clone())
                    }
                    Some(GridRef::Families(f)) => ("explicit".into(), explicit_grid(f, spec.dim())?),
                };
                Ok(Setup { label: m.name.clone(), dynamics: spec.dynamics, psi: spec.psi0, grid, grid_name })
            }
            (None, Some(sys)) => {
                let (dynamics, psi) = system(sys)?;
                let grid = match &self.grid {
                    Some(GridRef::Families(f)) => explicit_grid(f, psi.dim())?,
                    Some(GridRef::Named(n)) => {
                        return Err(CliError::Config(format!("named grid '{n}' needs a model; give families instead")))
                    }
                    None => return Err(CliError::Config("an explicit system needs explicit grid families".into())),
                };
                Ok(Setup { label: "system".into(), dynamics, psi, grid, grid_name: "explicit".into() })
            }
        }
    }
}

/// Resolves a label or index against the grid.
pub fn alternative(grid: &HistoryGrid, spec: &AlternativeSpec) -> Result<Alternative, CliError> {
    if spec.family >= grid.len() {
        return Err(CliError::Config(format!("family {} out of range for {} families", spec.family, grid.len())));
    }
    let fam = grid.family(spec.family);
    let alternative = match &spec.alternative {
        AltRef::Index(i) if *i < fam.len() => *i,
        AltRef::Index(i) => {
            return Err(CliError::Config(format!("alternative {i} out of range for family {}", spec.family)))
        }
        AltRef::Label(l) => fam.label_index(l).ok_or_else(|| {
            CliError::Config(format!("family {} has no alternative '{l}' (labels: {})", spec.family, fam.labels().join(", ")))
        })?,
    };
    Ok(Alternative::new(spec.family, alternative))
}
