use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reqlang::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("invalid interval [{lo},{hi}]: lower bound exceeds upper bound")]
pub struct IntervalError {
    pub lo: u32,
    pub hi: u32,
}

/// Closed step interval `[lo, hi]` of a bounded past-time operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(u32, u32)", into = "(u32, u32)")]
pub struct Interval {
    lo: u32,
    hi: u32,
}

impl Interval {
    pub fn new(lo: u32, hi: u32) -> Result<Self, IntervalError> {
        if lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(IntervalError { lo, hi })
        }
    }

    /// `[0, hi]`
    pub fn upto(hi: u32) -> Self {
        Self { lo: 0, hi }
    }

    /// `[n, n]`
    pub fn exactly(n: u32) -> Self {
        Self { lo: n, hi: n }
    }

    pub fn lo(self) -> u32 {
        self.lo
    }

    pub fn hi(self) -> u32 {
        self.hi
    }
}

impl TryFrom<(u32, u32)> for Interval {
    type Error = IntervalError;

    fn try_from((lo, hi): (u32, u32)) -> Result<Self, Self::Error> {
        Interval::new(lo, hi)
    }
}

impl From<Interval> for (u32, u32) {
    fn from(i: Interval) -> Self {
        (i.lo, i.hi)
    }
}

/// Pure past-time MTL formula. Future operators are not representable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MtlFormula {
    /// Non-temporal boolean expression over the current sample.
    Atom(Expr),
    Not(Box<MtlFormula>),
    And(Box<MtlFormula>, Box<MtlFormula>),
    Or(Box<MtlFormula>, Box<MtlFormula>),
    Implies(Box<MtlFormula>, Box<MtlFormula>),
    /// True only at the first step of the trace.
    First,
    Yesterday(Box<MtlFormula>),
    Once(Interval, Box<MtlFormula>),
    Historically(Interval, Box<MtlFormula>),
    /// `Since(i, lhs, rhs)`: `rhs` held at some step in the window and
    /// `lhs` has held at every step after it.
    Since(Interval, Box<MtlFormula>, Box<MtlFormula>),
}

impl MtlFormula {
    pub fn atom(e: Expr) -> Self {
        MtlFormula::Atom(e)
    }

    pub fn var(name: &str) -> Self {
        MtlFormula::Atom(Expr::var(name))
    }

    pub fn truth(value: bool) -> Self {
        MtlFormula::Atom(Expr::Bool(value))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: MtlFormula) -> Self {
        MtlFormula::Not(Box::new(f))
    }

    pub fn and(a: MtlFormula, b: MtlFormula) -> Self {
        MtlFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: MtlFormula, b: MtlFormula) -> Self {
        MtlFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: MtlFormula, b: MtlFormula) -> Self {
        MtlFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn yesterday(f: MtlFormula) -> Self {
        MtlFormula::Yesterday(Box::new(f))
    }

    pub fn once(i: Interval, f: MtlFormula) -> Self {
        MtlFormula::Once(i, Box::new(f))
    }

    pub fn historically(i: Interval, f: MtlFormula) -> Self {
        MtlFormula::Historically(i, Box::new(f))
    }

    pub fn since(i: Interval, lhs: MtlFormula, rhs: MtlFormula) -> Self {
        MtlFormula::Since(i, Box::new(lhs), Box::new(rhs))
    }

    /// Distinct variable names in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit(&mut |f| {
            if let MtlFormula::Atom(e) = f {
                for v in e.variables() {
                    if !out.iter().any(|o| o == v) {
                        out.push(v.to_string());
                    }
                }
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a MtlFormula)) {
        f(self);
        match self {
            MtlFormula::Atom(_) | MtlFormula::First => {}
            MtlFormula::Not(a)
            | MtlFormula::Yesterday(a)
            | MtlFormula::Once(_, a)
            | MtlFormula::Historically(_, a) => a.visit(f),
            MtlFormula::And(a, b)
            | MtlFormula::Or(a, b)
            | MtlFormula::Implies(a, b)
            | MtlFormula::Since(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Renders the SMV-style string: fully parenthesized, `!`, `&`, `|`,
    /// `->`, `Y`, `H[a,b]`, `O[a,b]`, `S[a,b]` and `FTP`.
    pub fn to_smv_string(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MtlFormula::Atom(e) => write!(f, "({e})"),
            MtlFormula::Not(a) => write!(f, "(! {a})"),
            MtlFormula::And(a, b) => write!(f, "({a} & {b})"),
            MtlFormula::Or(a, b) => write!(f, "({a} | {b})"),
            MtlFormula::Implies(a, b) => write!(f, "({a} -> {b})"),
            MtlFormula::First => f.write_str("FTP"),
            MtlFormula::Yesterday(a) => write!(f, "(Y {a})"),
            MtlFormula::Once(i, a) => write!(f, "(O[{},{}] {a})", i.lo, i.hi),
            MtlFormula::Historically(i, a) => write!(f, "(H[{},{}] {a})", i.lo, i.hi),
            MtlFormula::Since(i, a, b) => write!(f, "({a} S[{},{}] {b})", i.lo, i.hi),
        }
    }
}
