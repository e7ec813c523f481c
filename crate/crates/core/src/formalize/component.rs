//! Component specification: the interchange file between formalization and
//! monitor generation.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::smv::{parse_smv, SmvError};
use super::{to_ptmtl, FormalizeError, MtlFormula, Rate};
use crate::reqlang::{validate, SourceRequirement, VarDecl};

#[derive(Debug, Clone, PartialEq)]
pub struct FormalRequirement {
    pub id: String,
    pub smv_formula: String,
    pub ptmtl: MtlFormula,
    pub raw_text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSpec {
    pub component: String,
    pub requirements: Vec<FormalRequirement>,
    /// Declarations of the variables the formulas reference, in
    /// declaration-file order.
    pub variables: Vec<VarDecl>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFileError {
    #[error("malformed component specification: {0}")]
    Json(String),
    #[error("requirement `{id}`: {source}")]
    Formula {
        id: String,
        #[source]
        source: SmvError,
    },
    #[error("requirement `{id}` references undeclared variable `{name}`")]
    UndeclaredVariable { id: String, name: String },
    #[error("duplicate requirement id `{0}`")]
    DuplicateRequirement(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    component: String,
    requirements: Vec<RequirementEntry>,
    variables: Vec<VarDecl>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RequirementEntry {
    id: String,
    text: String,
    #[serde(rename = "ptLTL")]
    ptltl: String,
}

/// Formalizes validated requirements of one component.
///
/// The variable list keeps only the declarations some formula references.
pub fn make_component_spec(
    reqs: &[SourceRequirement],
    decls: &[VarDecl],
    rate: Rate,
) -> Result<ComponentSpec, FormalizeError> {
    let component = reqs.first().map(|r| r.component.clone()).unwrap_or_default();
    let mut seen = HashSet::new();
    let mut requirements = Vec::with_capacity(reqs.len());
    for req in reqs {
        if req.component != component {
            return Err(FormalizeError::MixedComponents {
                expected: component,
                found: req.component.clone(),
                id: req.id.clone(),
            });
        }
        if !seen.insert(req.id.as_str()) {
            return Err(FormalizeError::DuplicateRequirement(req.id.clone()));
        }
        let errors = validate(req, decls);
        if !errors.is_empty() {
            return Err(FormalizeError::Validation {
                id: req.id.clone(),
                errors,
            });
        }
        let ptmtl = to_ptmtl(req, rate)?;
        requirements.push(FormalRequirement {
            id: req.id.clone(),
            smv_formula: ptmtl.to_smv_string(),
            ptmtl,
            raw_text: req.raw_text.clone(),
        });
    }
    let used: HashSet<String> = requirements
        .iter()
        .flat_map(|r| r.ptmtl.variables())
        .collect();
    let mut variables: Vec<VarDecl> = Vec::new();
    for d in decls {
        if used.contains(&d.name) && !variables.iter().any(|v| v.name == d.name) {
            variables.push(d.clone());
        }
    }
    Ok(ComponentSpec {
        component,
        requirements,
        variables,
    })
}

impl ComponentSpec {
    /// Pretty JSON with a trailing newline; byte-stable for a given spec.
    pub fn to_json(&self) -> String {
        let file = SpecFile {
            component: self.component.clone(),
            requirements: self
                .requirements
                .iter()
                .map(|r| RequirementEntry {
                    id: r.id.clone(),
                    text: r.raw_text.clone(),
                    ptltl: r.smv_formula.clone(),
                })
                .collect(),
            variables: self.variables.clone(),
        };
        let mut out = serde_json::to_string_pretty(&file).expect("spec serializes");
        out.push('\n');
        out
    }

    /// Loads a specification file, re-parsing every formula string.
    pub fn from_json(src: &str) -> Result<Self, SpecFileError> {
        let file: SpecFile =
            serde_json::from_str(src).map_err(|e| SpecFileError::Json(e.to_string()))?;
        let mut names = HashSet::new();
        for v in &file.variables {
            if !names.insert(v.name.as_str()) {
                return Err(SpecFileError::DuplicateVariable(v.name.clone()));
            }
        }
        let mut ids = HashSet::new();
        let mut requirements = Vec::with_capacity(file.requirements.len());
        for entry in file.requirements {
            if !ids.insert(entry.id.clone()) {
                return Err(SpecFileError::DuplicateRequirement(entry.id));
            }
            let ptmtl = parse_smv(&entry.ptltl).map_err(|source| SpecFileError::Formula {
                id: entry.id.clone(),
                source,
            })?;
            if let Some(name) = ptmtl
                .variables()
                .into_iter()
                .find(|v| !names.contains(v.as_str()))
            {
                return Err(SpecFileError::UndeclaredVariable { id: entry.id, name });
            }
            requirements.push(FormalRequirement {
                id: entry.id,
                smv_formula: entry.ptltl,
                ptmtl,
                raw_text: entry.text,
            });
        }
        Ok(ComponentSpec {
            component: file.component,
            requirements,
            variables: file.variables,
        })
    }

    /// One specification per requirement, each with only its own variables.
    pub fn split(&self) -> Vec<ComponentSpec> {
        self.requirements
            .iter()
            .map(|r| {
                let used = r.ptmtl.variables();
                ComponentSpec {
                    component: self.component.clone(),
                    requirements: vec![r.clone()],
                    variables: self
                        .variables
                        .iter()
                        .filter(|v| used.contains(&v.name))
                        .cloned()
                        .collect(),
                }
            })
            .collect()
    }
}
