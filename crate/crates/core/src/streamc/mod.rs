//! Compilation of past-time formulas into stream monitors.
//!
//! A [`MonitorSpec`] is a topologically ordered list of boolean streams over
//! the monitor's extern inputs. Temporal operators read from fixed-size ring
//! buffers whose lengths are known at compile time, so a running monitor
//! uses the same memory after one step as after a million.

mod compile;
mod state;

use serde::Serialize;
use thiserror::Error;

use crate::formalize::Interval;
use crate::mtlcore::Value;
use crate::reqlang::{ArithOp, BoolOp, CmpOp, VarKind};

pub use compile::{compile_monitor, derive_handler_name, RESERVED_C_NAMES};
pub use state::MonitorState;

/// Index of a stream within [`MonitorSpec::streams`].
pub type StreamId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExternDecl {
    pub name: String,
    pub kind: VarKind,
}

/// Pointwise expression over the current extern values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Pointwise {
    Extern(usize),
    Num(f64),
    Bool(bool),
    Neg(Box<Pointwise>),
    Arith(ArithOp, Box<Pointwise>, Box<Pointwise>),
    Cmp(CmpOp, Box<Pointwise>, Box<Pointwise>),
    Not(Box<Pointwise>),
    Logic(BoolOp, Box<Pointwise>, Box<Pointwise>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum StreamOp {
    Const(bool),
    /// Boolean pointwise expression, kind-checked at compile time.
    Sample(Pointwise),
    First,
    Not(StreamId),
    And(StreamId, StreamId),
    Or(StreamId, StreamId),
    Implies(StreamId, StreamId),
    Yesterday(StreamId),
    Once {
        input: StreamId,
        window: Interval,
    },
    Historically {
        input: StreamId,
        window: Interval,
    },
    Since {
        lhs: StreamId,
        rhs: StreamId,
        window: Interval,
    },
}

impl StreamOp {
    /// Ring buffer length for each operand this stream keeps history of.
    pub fn buffer_len(&self) -> Option<usize> {
        match self {
            StreamOp::Yesterday(_) => Some(2),
            StreamOp::Once { window, .. }
            | StreamOp::Historically { window, .. }
            | StreamOp::Since { window, .. } => Some(window.hi() as usize + 1),
            _ => None,
        }
    }

    /// Operands whose history is buffered, in buffer order.
    pub fn buffered_inputs(&self) -> Vec<StreamId> {
        match self {
            StreamOp::Yesterday(a)
            | StreamOp::Once { input: a, .. }
            | StreamOp::Historically { input: a, .. } => vec![*a],
            StreamOp::Since { lhs, rhs, .. } => vec![*lhs, *rhs],
            _ => vec![],
        }
    }

    pub fn inputs(&self) -> Vec<StreamId> {
        match self {
            StreamOp::Const(_) | StreamOp::Sample(_) | StreamOp::First => vec![],
            StreamOp::Not(a) => vec![*a],
            StreamOp::And(a, b) | StreamOp::Or(a, b) | StreamOp::Implies(a, b) => vec![*a, *b],
            _ => self.buffered_inputs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trigger {
    pub handler_name: String,
    /// True at the steps where the requirement is violated.
    pub guard: StreamId,
    pub requirement_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorSpec {
    pub externs: Vec<ExternDecl>,
    pub streams: Vec<StreamOp>,
    pub triggers: Vec<Trigger>,
}

impl MonitorSpec {
    pub fn extern_index(&self, name: &str) -> Option<usize> {
        self.externs.iter().position(|e| e.name == name)
    }

    /// Total ring buffer cells. A static function of the spec.
    pub fn buffer_cells(&self) -> usize {
        self.streams
            .iter()
            .map(|s| s.buffer_len().unwrap_or(0) * s.buffered_inputs().len())
            .sum()
    }

    /// Debug dump; the format is not stable.
    pub fn to_debug_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("monitor spec serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("requirement `{id}` references `{name}`, which is not a declared variable")]
    UnknownVariable { id: String, name: String },
    #[error("requirement `{id}`: kind mismatch in `{expr}`")]
    KindMismatch { id: String, expr: String },
    #[error("requirement `{id}`: unsupported operator in `{expr}`")]
    UnsupportedOperator { id: String, expr: String },
    #[error("variable name `{0}` is reserved in generated code")]
    ReservedName(String),
    #[error("requirements `{first}` and `{second}` map to the same handler `{handler}`")]
    DuplicateHandler {
        handler: String,
        first: String,
        second: String,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonitorError {
    #[error("`{0}` is not an input of this monitor")]
    UnknownExtern(String),
    #[error("input `{name}` is {expected}, got a {found} value")]
    KindMismatch {
        name: String,
        expected: VarKind,
        found: VarKind,
    },
    #[error("input `{0}` has not been set")]
    UninitializedExtern(String),
}

/// Evaluates a pointwise expression. Kinds were checked at compile time and
/// inputs are kind-checked on write, so mismatches cannot occur here.
pub(crate) fn eval_pointwise(p: &Pointwise, inputs: &[Value]) -> Value {
    let num = |x: &Pointwise| match eval_pointwise(x, inputs) {
        Value::Num(n) => n,
        Value::Bool(b) => f64::from(u8::from(b)),
    };
    let boolean = |x: &Pointwise| match eval_pointwise(x, inputs) {
        Value::Bool(b) => b,
        Value::Num(n) => n != 0.0,
    };
    match p {
        Pointwise::Extern(i) => inputs[*i],
        Pointwise::Num(n) => Value::Num(*n),
        Pointwise::Bool(b) => Value::Bool(*b),
        Pointwise::Neg(a) => Value::Num(-num(a)),
        Pointwise::Arith(op, a, b) => Value::Num(op.apply(num(a), num(b))),
        Pointwise::Cmp(op, a, b) => Value::Bool(op.apply(num(a), num(b))),
        Pointwise::Not(a) => Value::Bool(!boolean(a)),
        Pointwise::Logic(op, a, b) => Value::Bool(op.apply(boolean(a), boolean(b))),
    }
}
