use super::{FormalizeError, Interval, MtlFormula};
use crate::reqlang::{BoolOp, Expr, ScopeSpec, SourceRequirement, TimingSpec};

/// Monitor steps per abstract time unit. Always at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rate(u32);

impl Rate {
    pub const ONE: Rate = Rate(1);

    pub fn new(steps_per_unit: u32) -> Result<Self, FormalizeError> {
        if steps_per_unit == 0 {
            Err(FormalizeError::InvalidRate)
        } else {
            Ok(Rate(steps_per_unit))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    fn scale(self, units: u32) -> Result<u32, FormalizeError> {
        units
            .checked_mul(self.0)
            .ok_or(FormalizeError::BoundOverflow { units, rate: self.0 })
    }
}

impl Default for Rate {
    fn default() -> Self {
        Rate::ONE
    }
}

/// Replaces every `persisted(n, p)` by `Historically[0,n]` over the
/// translated `p`, lifting boolean connectives into formula connectives.
pub fn desugar_persisted(e: &Expr) -> MtlFormula {
    desugar_at_rate(e, Rate::ONE).expect("rate 1 never overflows")
}

/// Like [`desugar_persisted`], with `persisted` durations given in time
/// units and scaled to steps.
pub fn desugar_at_rate(e: &Expr, rate: Rate) -> Result<MtlFormula, FormalizeError> {
    Ok(match e {
        Expr::Not(a) => MtlFormula::not(desugar_at_rate(a, rate)?),
        Expr::Logic(op, a, b) => {
            let (a, b) = (desugar_at_rate(a, rate)?, desugar_at_rate(b, rate)?);
            match op {
                BoolOp::And => MtlFormula::and(a, b),
                BoolOp::Or => MtlFormula::or(a, b),
                BoolOp::Implies => MtlFormula::implies(a, b),
            }
        }
        Expr::Persisted(n, a) => {
            MtlFormula::historically(Interval::upto(rate.scale(*n)?), desugar_at_rate(a, rate)?)
        }
        other => MtlFormula::Atom(other.clone()),
    })
}

/// Rising edge of `cond`, or `cond` at the first step.
pub fn trigger_formula(cond: MtlFormula) -> MtlFormula {
    let edge = MtlFormula::or(
        MtlFormula::First,
        MtlFormula::yesterday(MtlFormula::not(cond.clone())),
    );
    MtlFormula::and(cond, edge)
}

/// Translates a validated requirement into a past-time formula that is
/// false exactly at the steps where a violation becomes detectable.
///
/// With a condition and `within N`: a violation is reported `N` steps after
/// a trigger if the response never held at the trigger or since.
pub fn to_ptmtl(req: &SourceRequirement, rate: Rate) -> Result<MtlFormula, FormalizeError> {
    if req.scope != ScopeSpec::Null {
        return Err(FormalizeError::UnsupportedScope {
            id: req.id.clone(),
        });
    }
    let response = desugar_at_rate(&req.response, rate)?;
    let trigger = match &req.condition {
        Some(cond) => Some(trigger_formula(desugar_at_rate(cond, rate)?)),
        None => None,
    };
    Ok(match (&req.timing, trigger) {
        (TimingSpec::Immediate, None) => response,
        (TimingSpec::Immediate, Some(trigger)) => {
            MtlFormula::not(MtlFormula::and(trigger, MtlFormula::not(response)))
        }
        (TimingSpec::Within { bound, .. }, trigger) => {
            let steps = rate.scale(*bound)?;
            let pending = MtlFormula::not(response);
            // Without a condition every step is a trigger.
            let start = match trigger {
                Some(t) => MtlFormula::and(t, pending.clone()),
                None => pending.clone(),
            };
            MtlFormula::not(MtlFormula::since(Interval::exactly(steps), pending, start))
        }
    })
}
