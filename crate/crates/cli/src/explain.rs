use std::fmt::Write as _;

use reqmon_core::formalize::{to_ptmtl, FormalizeError, Rate};
use reqmon_core::reqlang::{Expr, TimingSpec};
use reqmon_core::SourceRequirement;

fn plural(n: u64) -> &'static str {
    if n == 1 {
        ""
    } else {
        "s"
    }
}

fn persisted_terms<'a>(e: &'a Expr, out: &mut Vec<(u32, &'a Expr)>) {
    match e {
        Expr::Persisted(n, inner) => {
            out.push((*n, inner));
            persisted_terms(inner, out);
        }
        Expr::Neg(a) | Expr::Not(a) => persisted_terms(a, out),
        Expr::Arith(_, a, b) | Expr::Cmp(_, a, b) | Expr::Logic(_, a, b) => {
            persisted_terms(a, out);
            persisted_terms(b, out);
        }
        Expr::Var(_) | Expr::Num(_) | Expr::Bool(_) => {}
    }
}

/// Plain-language semantics of one requirement at `rate` steps per time unit.
pub fn explain_requirement(req: &SourceRequirement, rate: Rate) -> Result<String, FormalizeError> {
    let formula = to_ptmtl(req, rate)?;
    let r = u64::from(rate.get());
    let mut s = String::new();
    let _ = writeln!(s, "{} (component {})", req.id, req.component);

    let mut windows = Vec::new();
    if let Some(c) = &req.condition {
        persisted_terms(c, &mut windows);
    }
    persisted_terms(&req.response, &mut windows);

    match &req.condition {
        Some(c) => {
            let _ = writeln!(s, "  Condition: {c}");
        }
        None => {
            let _ = writeln!(s, "  Condition: none, so every step is a trigger");
        }
    }
    for (n, inner) in &windows {
        let steps = u64::from(*n) * r;
        let _ = writeln!(
            s,
            "    {steps}-step persistence: `{inner}` has held at the current step and at each of the {steps} step{} before it",
            plural(steps)
        );
    }
    if req.condition.is_some() {
        let _ = writeln!(
            s,
            "  Trigger: a step where the condition holds and either the trace starts or the condition did not hold one step earlier"
        );
    }
    let _ = writeln!(s, "  Response: {}", req.response);
    match (&req.timing, &req.condition) {
        (TimingSpec::Immediate, None) => {
            let _ = writeln!(s, "  The response must hold at every step.");
            let _ = writeln!(s, "  Violation: any step at which the response is false");
        }
        (TimingSpec::Immediate, Some(_)) => {
            let _ = writeln!(s, "  Deadline: none; the response must hold at each trigger step");
            let _ = writeln!(s, "  Violation: a trigger step at which the response is false");
        }
        (TimingSpec::Within { bound, unit }, _) => {
            let steps = u64::from(*bound) * r;
            let _ = writeln!(
                s,
                "  Deadline: {steps}-step deadline ({bound} {unit} at {r} step{} per unit); the response must hold at the trigger step or within the {steps} step{} after it",
                plural(r),
                plural(steps)
            );
            let _ = writeln!(
                s,
                "  Violation: reported {steps} step{} after a trigger when the response held at none of those steps",
                plural(steps)
            );
        }
    }
    let _ = writeln!(s, "  Formula: {}", formula.to_smv_string());
    Ok(s)
}
