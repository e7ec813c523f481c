//! Seeded random formulas, traces and replays for differential testing
//! and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::formalize::{Interval, MtlFormula};
use crate::mtlcore::{Trace, Value};
use crate::reqlang::{CmpOp, Expr, VarDecl, VarKind};
use crate::simbus::{ReplayEvent, ReplayTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    /// Maximum operator nesting; atoms have depth 0.
    pub max_depth: u32,
    /// Maximum interval upper bound.
    pub max_bound: u32,
    /// Number of variables, at most 4 of each kind.
    pub vars: usize,
    pub max_len: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            max_depth: 4,
            max_bound: 8,
            vars: 4,
            max_len: 200,
        }
    }
}

/// `vars` declarations alternating boolean `b<i>` and numeric `n<i>`.
pub fn declarations(vars: usize) -> Vec<VarDecl> {
    (0..vars)
        .map(|i| {
            if i % 2 == 0 {
                VarDecl::new(format!("b{}", i / 2), VarKind::Boolean)
            } else {
                VarDecl::new(format!("n{}", i / 2), VarKind::Numeric)
            }
        })
        .collect()
}

const CMP_OPS: [CmpOp; 6] = [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Eq, CmpOp::Ne];

fn random_atom<R: Rng + ?Sized>(rng: &mut R, decls: &[VarDecl]) -> MtlFormula {
    if decls.is_empty() || rng.gen_ratio(1, 12) {
        return MtlFormula::truth(rng.gen());
    }
    let d = decls.choose(rng).expect("non-empty");
    match d.kind {
        VarKind::Boolean => MtlFormula::var(&d.name),
        VarKind::Numeric => {
            let op = *CMP_OPS.choose(rng).expect("non-empty");
            // Negative constants are written as negations, as the parser
            // produces them.
            let c = rng.gen_range(-2i32..=2);
            let mut rhs = Expr::Num(f64::from(c.abs()));
            if c < 0 {
                rhs = Expr::Neg(Box::new(rhs));
            }
            MtlFormula::atom(Expr::Cmp(op, Box::new(Expr::Var(d.name.clone())), Box::new(rhs)))
        }
    }
}

fn random_interval<R: Rng + ?Sized>(rng: &mut R, max_bound: u32) -> Interval {
    let hi = rng.gen_range(0..=max_bound);
    let lo = rng.gen_range(0..=hi);
    Interval::new(lo, hi).expect("lo <= hi")
}

/// A random pure past-time formula over `decls`.
pub fn random_formula<R: Rng + ?Sized>(
    rng: &mut R,
    decls: &[VarDecl],
    cfg: &GenConfig,
) -> MtlFormula {
    formula_at(rng, decls, cfg, cfg.max_depth)
}

fn formula_at<R: Rng + ?Sized>(
    rng: &mut R,
    decls: &[VarDecl],
    cfg: &GenConfig,
    depth: u32,
) -> MtlFormula {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return if rng.gen_ratio(1, 10) {
            MtlFormula::First
        } else {
            random_atom(rng, decls)
        };
    }
    let sub = |rng: &mut R| formula_at(rng, decls, cfg, depth - 1);
    match rng.gen_range(0..8) {
        0 => MtlFormula::not(sub(rng)),
        1 => MtlFormula::and(sub(rng), sub(rng)),
        2 => MtlFormula::or(sub(rng), sub(rng)),
        3 => MtlFormula::implies(sub(rng), sub(rng)),
        4 => MtlFormula::yesterday(sub(rng)),
        5 => {
            let i = random_interval(rng, cfg.max_bound);
            MtlFormula::once(i, sub(rng))
        }
        6 => {
            let i = random_interval(rng, cfg.max_bound);
            MtlFormula::historically(i, sub(rng))
        }
        _ => {
            let i = random_interval(rng, cfg.max_bound);
            MtlFormula::since(i, sub(rng), sub(rng))
        }
    }
}

/// A random trace of exactly `len` steps. Booleans are biased towards
/// `true` so that long windows occasionally hold; numbers are small
/// integers so comparisons against the generated constants flip often.
pub fn random_trace<R: Rng + ?Sized>(rng: &mut R, decls: &[VarDecl], len: usize) -> Trace {
    let mut tr = Trace::empty(len);
    for d in decls {
        let column = (0..len)
            .map(|_| match d.kind {
                VarKind::Boolean => Value::Bool(rng.gen_ratio(3, 4)),
                VarKind::Numeric => Value::Num(f64::from(rng.gen_range(-3i32..=3))),
            })
            .collect();
        tr.insert(d.name.clone(), column).expect("column has trace length");
    }
    tr
}

/// Lock-step replay: at time `r` one message per `(variable, topic)` pair,
/// carrying the variable's value at step `r`.
pub fn lockstep_replay(tr: &Trace, topics: &[(String, String)]) -> ReplayTrace {
    let mut events = Vec::with_capacity(tr.len() * topics.len());
    for t in 0..tr.len() {
        for (var, topic) in topics {
            let value = tr.get(var, t).expect("trace covers every mapped variable");
            events.push(ReplayEvent {
                time: t as f64,
                topic: topic.clone(),
                value,
            });
        }
    }
    ReplayTrace::new(events).expect("times are non-decreasing")
}
