//! Compiles structured natural-language requirements into constant-memory
//! runtime monitors.
//!
//! The pipeline runs in stages, one module each:
//!
//! 1. [`reqlang`] parses requirement sentences and type-checks them.
//! 2. [`formalize`] translates them into past-time MTL and builds the
//!    component specification interchange file.
//! 3. [`streamc`] compiles formulas into a stream monitor with static ring
//!    buffers and runs it online; [`mtlcore`] is the brute-force reference
//!    semantics it is tested against.
//! 4. [`cgen`] emits the monitor as C99, and [`nodegen`] wraps it in a ROS2
//!    package with a monitoring node and a logging node.
//! 5. [`simbus`] hosts interpreted monitors on a deterministic in-process
//!    publish-subscribe bus to replay recorded traces.

pub mod cgen;
pub mod formalize;
pub mod mtlcore;
pub mod nodegen;
pub mod reqlang;
pub mod simbus;
pub mod streamc;
pub mod testgen;

pub use formalize::{ComponentSpec, Interval, MtlFormula};
pub use mtlcore::{Trace, Value};
pub use reqlang::{Expr, SourceRequirement, VarDecl, VarKind};
pub use streamc::{MonitorSpec, MonitorState};
