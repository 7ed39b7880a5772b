//! JSON model descriptors.

use serde::{Deserialize, Serialize};

use super::clauses::{ClauseModel, ClauseRow, ClauseSystem, Generator, DEFAULT_ROW_BOUND};
use super::cylinder::{CylRelation, CylinderModel};
use super::finite::{FiniteBasis, FinitePosetModel, FiniteRelation};
use super::ModelError;
use crate::finite_space::{FinitePoset, PosetJson};

fn default_bound() -> usize {
    DEFAULT_ROW_BOUND
}

fn default_cyl_relation() -> CylRelation {
    CylRelation::Containment
}

fn default_basis() -> FiniteBasis {
    FiniteBasis::Principal
}

fn default_fin_relation() -> FiniteRelation {
    FiniteRelation::Inclusion
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Pn {},
    Pinf {},
    Clauses {
        #[serde(default)]
        rows: Vec<ClauseRow>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generator: Option<Generator>,
        #[serde(default = "default_bound")]
        bound: usize,
    },
    Cylinder {
        alphabet: u8,
        #[serde(default = "default_cyl_relation")]
        relation: CylRelation,
    },
    Poset {
        poset: PosetJson,
        #[serde(default = "default_basis")]
        basis: FiniteBasis,
        #[serde(default = "default_fin_relation")]
        relation: FiniteRelation,
    },
}

/// Upper limit on examined clause rows, keeping generated systems cheap.
pub const MAX_ROW_BOUND: usize = 4096;

impl ModelSpec {
    pub fn from_json(s: &str) -> Result<Self, ModelError> {
        let spec: ModelSpec =
            serde_json::from_str(s).map_err(|e| ModelError::Invalid(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            ModelSpec::Clauses { bound, .. } if *bound > MAX_ROW_BOUND => Err(ModelError::Invalid(
                format!("bound {bound} exceeds {MAX_ROW_BOUND}"),
            )),
            ModelSpec::Cylinder { alphabet, relation } => {
                CylinderModel::new(*alphabet, *relation).map(|_| ())
            }
            ModelSpec::Poset { poset, .. } => FinitePoset::from_json_value(poset)
                .map(|_| ())
                .map_err(|e| ModelError::Invalid(e.to_string())),
            _ => Ok(()),
        }
    }

    pub fn clause_model(&self) -> Option<ClauseModel> {
        match self {
            ModelSpec::Clauses {
                rows,
                generator,
                bound,
            } => Some(ClauseModel {
                sys: ClauseSystem {
                    rows: rows.clone(),
                    generator: *generator,
                    bound: *bound,
                },
            }),
            _ => None,
        }
    }

    pub fn cylinder_model(&self) -> Option<CylinderModel> {
        match self {
            ModelSpec::Cylinder { alphabet, relation } => {
                CylinderModel::new(*alphabet, *relation).ok()
            }
            _ => None,
        }
    }

    pub fn poset_model(&self) -> Option<FinitePosetModel> {
        match self {
            ModelSpec::Poset {
                poset,
                basis,
                relation,
            } => {
                let p = FinitePoset::from_json_value(poset).ok()?;
                Some(FinitePosetModel::new(p, *basis, *relation))
            }
            _ => None,
        }
    }
}
