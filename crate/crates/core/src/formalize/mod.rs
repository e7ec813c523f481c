//! Translation of requirements into pure past-time MTL.

mod component;
mod formula;
mod smv;
mod translate;

use thiserror::Error;

use crate::reqlang::TypeError;

pub use component::{make_component_spec, ComponentSpec, FormalRequirement, SpecFileError};
pub use formula::{Interval, IntervalError, MtlFormula};
pub use smv::{parse_smv, SmvError};
pub use translate::{desugar_at_rate, desugar_persisted, to_ptmtl, trigger_formula, Rate};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormalizeError {
    #[error("requirement `{id}`: only the null scope is supported")]
    UnsupportedScope { id: String },
    #[error("requirement `{id}`: {}", errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Validation { id: String, errors: Vec<TypeError> },
    #[error("requirement `{id}` is levied on `{found}`, expected component `{expected}`")]
    MixedComponents {
        expected: String,
        found: String,
        id: String,
    },
    #[error("duplicate requirement id `{0}`")]
    DuplicateRequirement(String),
    #[error("rate must be at least 1 step per time unit")]
    InvalidRate,
    #[error("bound of {units} time units at {rate} steps per unit overflows")]
    BoundOverflow { units: u32, rate: u32 },
}
