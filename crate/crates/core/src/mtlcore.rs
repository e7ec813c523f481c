//! Reference semantics of past-time MTL over finite traces.
//!
//! This is the oracle for the online monitors: every operator is evaluated
//! straight from its quantifier definition, with no incremental state.
//!
//! Conventions at the start of the trace:
//! - `Historically[a,b] p` is false while its window `[t-b, t-a]` reaches
//!   before step 0, so `persisted(n, p)` needs `n+1` actual samples.
//! - `Once[a,b] p` and `Since[a,b]` quantify over the part of the window
//!   that lies inside the trace.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formalize::MtlFormula;
use crate::reqlang::{Expr, VarKind};

/// One sample of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Num(f64),
}

impl Value {
    pub fn kind(self) -> VarKind {
        match self {
            Value::Bool(_) => VarKind::Boolean,
            Value::Num(_) => VarKind::Numeric,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Num(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("column `{name}` has {found} samples, expected {expected}")]
    LengthMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
}

/// Finite trace: per-variable sample sequences of equal length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    len: usize,
    columns: BTreeMap<String, Vec<Value>>,
}

impl Trace {
    /// A trace with `len` steps and no variables.
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            columns: BTreeMap::new(),
        }
    }

    pub fn from_columns<I, S>(columns: I) -> Result<Self, TraceError>
    where
        I: IntoIterator<Item = (S, Vec<Value>)>,
        S: Into<String>,
    {
        let mut iter = columns.into_iter().peekable();
        let len = iter.peek().map_or(0, |(_, v)| v.len());
        let mut trace = Trace::empty(len);
        for (name, values) in iter {
            trace.insert(name, values)?;
        }
        Ok(trace)
    }

    /// Adds or replaces a column.
    pub fn insert(&mut self, name: impl Into<String>, values: Vec<Value>) -> Result<(), TraceError> {
        let name = name.into();
        if values.len() != self.len {
            return Err(TraceError::LengthMismatch {
                name,
                expected: self.len,
                found: values.len(),
            });
        }
        self.columns.insert(name, values);
        Ok(())
    }

    pub fn with_bools(mut self, name: &str, values: &[bool]) -> Result<Self, TraceError> {
        self.insert(name, values.iter().map(|b| Value::Bool(*b)).collect())?;
        Ok(self)
    }

    pub fn with_nums(mut self, name: &str, values: &[f64]) -> Result<Self, TraceError> {
        self.insert(name, values.iter().map(|n| Value::Num(*n)).collect())?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, name: &str, t: usize) -> Option<Value> {
        self.columns.get(name).and_then(|c| c.get(t)).copied()
    }

    pub fn column(&self, name: &str) -> Option<&[Value]> {
        self.columns.get(name).map(Vec::as_slice)
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    pub fn column_mut(&mut self, name: &str) -> Option<&mut [Value]> {
        self.columns.get_mut(name).map(Vec::as_mut_slice)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("step {t} out of range for trace of length {len}")]
    IndexOutOfRange { t: usize, len: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("kind mismatch evaluating `{0}`")]
    KindMismatch(String),
    #[error("temporal operator inside an atom: `{0}`")]
    TemporalInAtom(String),
}

/// Evaluates a non-temporal expression against a variable lookup.
pub fn eval_expr(
    e: &Expr,
    lookup: &impl Fn(&str) -> Option<Value>,
) -> Result<Value, EvalError> {
    let num = |x: &Expr| match eval_expr(x, lookup)? {
        Value::Num(n) => Ok(n),
        Value::Bool(_) => Err(EvalError::KindMismatch(x.to_string())),
    };
    let boolean = |x: &Expr| match eval_expr(x, lookup)? {
        Value::Bool(b) => Ok(b),
        Value::Num(_) => Err(EvalError::KindMismatch(x.to_string())),
    };
    Ok(match e {
        Expr::Var(v) => lookup(v).ok_or_else(|| EvalError::UnknownVariable(v.clone()))?,
        Expr::Num(n) => Value::Num(*n),
        Expr::Bool(b) => Value::Bool(*b),
        Expr::Neg(a) => Value::Num(-num(a)?),
        Expr::Arith(op, a, b) => Value::Num(op.apply(num(a)?, num(b)?)),
        Expr::Cmp(op, a, b) => Value::Bool(op.apply(num(a)?, num(b)?)),
        Expr::Not(a) => Value::Bool(!boolean(a)?),
        Expr::Logic(op, a, b) => Value::Bool(op.apply(boolean(a)?, boolean(b)?)),
        Expr::Persisted(..) => return Err(EvalError::TemporalInAtom(e.to_string())),
    })
}

fn eval_atom(e: &Expr, tr: &Trace, t: usize) -> Result<bool, EvalError> {
    match eval_expr(e, &|name| tr.get(name, t))? {
        Value::Bool(b) => Ok(b),
        Value::Num(_) => Err(EvalError::KindMismatch(e.to_string())),
    }
}

/// Truth value of `f` at step `t`, by direct recursion on the definitions.
pub fn eval_at(f: &MtlFormula, tr: &Trace, t: usize) -> Result<bool, EvalError> {
    if t >= tr.len() {
        return Err(EvalError::IndexOutOfRange { t, len: tr.len() });
    }
    eval_rec(f, tr, t)
}

fn eval_rec(f: &MtlFormula, tr: &Trace, t: usize) -> Result<bool, EvalError> {
    Ok(match f {
        MtlFormula::Atom(e) => eval_atom(e, tr, t)?,
        MtlFormula::Not(a) => !eval_rec(a, tr, t)?,
        MtlFormula::And(a, b) => {
            let (x, y) = (eval_rec(a, tr, t)?, eval_rec(b, tr, t)?);
            x && y
        }
        MtlFormula::Or(a, b) => {
            let (x, y) = (eval_rec(a, tr, t)?, eval_rec(b, tr, t)?);
            x || y
        }
        MtlFormula::Implies(a, b) => {
            let (x, y) = (eval_rec(a, tr, t)?, eval_rec(b, tr, t)?);
            !x || y
        }
        MtlFormula::First => t == 0,
        MtlFormula::Yesterday(a) => t > 0 && eval_rec(a, tr, t - 1)?,
        MtlFormula::Once(i, a) => {
            let (lo, hi) = (i.lo() as usize, i.hi() as usize);
            let mut found = false;
            for s in window(t, lo, hi) {
                found |= eval_rec(a, tr, s)?;
            }
            found
        }
        MtlFormula::Historically(i, a) => {
            let (lo, hi) = (i.lo() as usize, i.hi() as usize);
            let mut all = t >= hi;
            for s in window(t, lo, hi) {
                all &= eval_rec(a, tr, s)?;
            }
            all
        }
        MtlFormula::Since(i, lhs, rhs) => {
            let (lo, hi) = (i.lo() as usize, i.hi() as usize);
            let mut holds = false;
            for s in window(t, lo, hi) {
                let mut ok = eval_rec(rhs, tr, s)?;
                for u in s + 1..=t {
                    ok &= eval_rec(lhs, tr, u)?;
                }
                holds |= ok;
            }
            holds
        }
    })
}

/// In-trace steps of `[t - hi, t - lo]`.
fn window(t: usize, lo: usize, hi: usize) -> std::ops::RangeInclusive<usize> {
    if t < lo {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    t.saturating_sub(hi)..=t - lo
}

/// Truth values at every step.
///
/// Tabulates each subformula over the whole trace, bottom-up, applying the
/// same quantifier definitions as [`eval_at`].
pub fn eval_trace(f: &MtlFormula, tr: &Trace) -> Result<Vec<bool>, EvalError> {
    let n = tr.len();
    Ok(match f {
        MtlFormula::Atom(e) => (0..n).map(|t| eval_atom(e, tr, t)).collect::<Result<_, _>>()?,
        MtlFormula::Not(a) => eval_trace(a, tr)?.into_iter().map(|x| !x).collect(),
        MtlFormula::And(a, b) => zip(eval_trace(a, tr)?, eval_trace(b, tr)?, |x, y| x && y),
        MtlFormula::Or(a, b) => zip(eval_trace(a, tr)?, eval_trace(b, tr)?, |x, y| x || y),
        MtlFormula::Implies(a, b) => zip(eval_trace(a, tr)?, eval_trace(b, tr)?, |x, y| !x || y),
        MtlFormula::First => (0..n).map(|t| t == 0).collect(),
        MtlFormula::Yesterday(a) => {
            let v = eval_trace(a, tr)?;
            (0..n).map(|t| t > 0 && v[t - 1]).collect()
        }
        MtlFormula::Once(i, a) => {
            let v = eval_trace(a, tr)?;
            let (lo, hi) = (i.lo() as usize, i.hi() as usize);
            (0..n).map(|t| window(t, lo, hi).any(|s| v[s])).collect()
        }
        MtlFormula::Historically(i, a) => {
            let v = eval_trace(a, tr)?;
            let (lo, hi) = (i.lo() as usize, i.hi() as usize);
            (0..n)
                .map(|t| t >= hi && window(t, lo, hi).all(|s| v[s]))
                .collect()
        }
        MtlFormula::Since(i, lhs, rhs) => {
            let (l, r) = (eval_trace(lhs, tr)?, eval_trace(rhs, tr)?);
            let (lo, hi) = (i.lo() as usize, i.hi() as usize);
            (0..n)
                .map(|t| window(t, lo, hi).any(|s| r[s] && (s + 1..=t).all(|u| l[u])))
                .collect()
        }
    })
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// Steps at which `f` is false.
pub fn false_steps(f: &MtlFormula, tr: &Trace) -> Result<Vec<usize>, EvalError> {
    Ok(eval_trace(f, tr)?
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v)
        .map(|(t, _)| t)
        .collect())
}

/// Maximum lookback in steps: the value at `t` depends only on samples in
/// `[t - depth, t]`.
pub fn temporal_depth(f: &MtlFormula) -> u64 {
    match f {
        MtlFormula::Atom(_) | MtlFormula::First => 0,
        MtlFormula::Not(a) => temporal_depth(a),
        MtlFormula::And(a, b) | MtlFormula::Or(a, b) | MtlFormula::Implies(a, b) => {
            temporal_depth(a).max(temporal_depth(b))
        }
        MtlFormula::Yesterday(a) => 1 + temporal_depth(a),
        MtlFormula::Once(i, a) | MtlFormula::Historically(i, a) => {
            u64::from(i.hi()) + temporal_depth(a)
        }
        MtlFormula::Since(i, a, b) => u64::from(i.hi()) + temporal_depth(a).max(temporal_depth(b)),
    }
}
