use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{codec, CMatrix, CVector, HilbertLayout, StateVector};
use crate::metrology::{pauli_sum, PauliStringTerm, ScalarFn, StateFamily};

/// Default number of points of a theta grid.
pub const DEFAULT_GRID_POINTS: usize = 32;
/// Central-difference step of mixed families.
pub const MIXED_STEP: f64 = 1e-5;

/// Uniform closed grid or explicit points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaGrid {
    Range {
        start: f64,
        end: f64,
        #[serde(default = "default_count")]
        count: usize,
    },
    Points(Vec<f64>),
}

fn default_count() -> usize {
    DEFAULT_GRID_POINTS
}

impl ThetaGrid {
    pub fn range(start: f64, end: f64) -> Self {
        ThetaGrid::Range { start, end, count: DEFAULT_GRID_POINTS }
    }

    /// Grid values; ranges include both endpoints.
    pub fn points(&self) -> Vec<f64> {
        match self {
            ThetaGrid::Points(p) => p.clone(),
            ThetaGrid::Range { start, count: 1, .. } => vec![*start],
            ThetaGrid::Range { start, end, count } => {
                let step = (end - start) / (*count - 1) as f64;
                (0..*count).map(|k| if k + 1 == *count { *end } else { start + step * k as f64 }).collect()
            }
        }
    }
}

/// Generator as Pauli strings (qubit layouts) or a dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HamiltonianSpec {
    Pauli(Vec<PauliStringTerm>),
    Dense(Vec<Vec<[f64; 2]>>),
}

impl HamiltonianSpec {
    pub fn matrix(&self, layout: &HilbertLayout) -> Result<CMatrix> {
        match self {
            HamiltonianSpec::Pauli(terms) => {
                if !layout.is_qubits() {
                    return Err(Error::invalid("Pauli-string generators need a qubit layout"));
                }
                pauli_sum(terms, layout.len())
            }
            HamiltonianSpec::Dense(rows) => codec::matrix_from_rows(rows).map_err(Error::Invalid),
        }
    }
}

/// `weight(theta) * rho`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: ScalarFn,
    pub rho: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum FamilySpec {
    /// `exp(-i theta G) psi_in`
    UnitaryGenerator { psi_in: Vec<[f64; 2]>, hamiltonian: HamiltonianSpec },
    /// `p |psi0><psi0| + (1 - p) |psi1><psi1|`
    RankTwo { psi0: Vec<[f64; 2]>, psi1: Vec<[f64; 2]>, p: ScalarFn },
    /// `sum_k w_k(theta) rho_k`
    Mixed { components: Vec<MixtureComponent> },
}

/// Serializable description of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
    pub layout: Vec<usize>,
    #[serde(flatten)]
    pub family: FamilySpec,
    pub theta_grid: ThetaGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<(f64, f64)>,
}

fn vector(pairs: &[[f64; 2]]) -> Result<CVector> {
    codec::vector_from_pairs(pairs).map_err(Error::Invalid)
}

fn matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    codec::matrix_from_rows(rows).map_err(Error::Invalid)
}

impl ScenarioSpec {
    pub fn build_family(&self) -> Result<StateFamily> {
        let layout = HilbertLayout::new(self.layout.clone())?;
        let family = match &self.family {
            FamilySpec::UnitaryGenerator { psi_in, hamiltonian } => {
                let psi = StateVector::normalized(layout.clone(), vector(psi_in)?)?;
                StateFamily::unitary_generator(layout.clone(), psi, hamiltonian.matrix(&layout)?)?
            }
            FamilySpec::RankTwo { psi0, psi1, p } => StateFamily::rank_two_with(
                layout.clone(),
                StateVector::normalized(layout.clone(), vector(psi0)?)?,
                StateVector::normalized(layout.clone(), vector(psi1)?)?,
                *p,
            )?,
            FamilySpec::Mixed { components } => {
                if components.is_empty() {
                    return Err(Error::invalid("mixed scenario has no components"));
                }
                let parts = components
                    .iter()
                    .map(|c| {
                        let m = matrix(&c.rho)?;
                        if m.nrows() != layout.total() || m.ncols() != layout.total() {
                            return Err(Error::dim("mixture component does not match the layout"));
                        }
                        Ok((c.weight, m))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let d = layout.total();
                let rho = Arc::new(move |t: f64| {
                    Ok(parts.iter().fold(CMatrix::zeros(d, d), |acc, (w, m)| acc + m.scale(w.value(t))))
                });
                StateFamily::mixed(layout, rho, MIXED_STEP)?
            }
        };
        Ok(match self.domain {
            Some((lo, hi)) => family.with_domain(lo, hi),
            None => family,
        })
    }
}

/// A named family with its theta grid.
#[derive(Debug, Clone)]
pub struct Scenario {
    spec: ScenarioSpec,
    family: StateFamily,
}

impl Scenario {
    pub fn from_spec(spec: ScenarioSpec) -> Result<Self> {
        let family = spec.build_family()?;
        let s = Self { spec, family };
        if s.theta_grid().is_empty() {
            return Err(Error::invalid("scenario theta grid is empty"));
        }
        Ok(s)
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn family(&self) -> &StateFamily {
        &self.family
    }

    pub fn theta_grid(&self) -> Vec<f64> {
        self.spec.theta_grid.points()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.spec)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_spec(serde_json::from_str(s)?)
    }
}
