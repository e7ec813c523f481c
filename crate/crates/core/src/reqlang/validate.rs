use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::ast::{Expr, SourceRequirement, VarDecl, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("{context}: expected {expected} expression, found {found} `{expr}`")]
    KindMismatch {
        context: String,
        expected: VarKind,
        found: VarKind,
        expr: String,
    },
}

/// Checks variable usage and expression kinds of a requirement.
///
/// Errors come in pre-order (condition before response); each undeclared
/// name is reported once.
pub fn validate(req: &SourceRequirement, decls: &[VarDecl]) -> Vec<TypeError> {
    let mut checker = Checker {
        kinds: decls.iter().rev().map(|d| (d.name.as_str(), d.kind)).collect(),
        reported: BTreeSet::new(),
        errors: Vec::new(),
    };
    if let Some(cond) = &req.condition {
        checker.check(cond, VarKind::Boolean, "condition");
    }
    checker.check(&req.response, VarKind::Boolean, "response");
    checker.errors
}

/// Natural kind of an expression node, independent of its operands.
fn node_kind(e: &Expr, kinds: &HashMap<&str, VarKind>) -> Option<VarKind> {
    match e {
        Expr::Var(v) => kinds.get(v.as_str()).copied(),
        Expr::Num(_) | Expr::Neg(_) | Expr::Arith(..) => Some(VarKind::Numeric),
        Expr::Bool(_) | Expr::Cmp(..) | Expr::Not(_) | Expr::Logic(..) | Expr::Persisted(..) => {
            Some(VarKind::Boolean)
        }
    }
}

struct Checker<'a> {
    kinds: HashMap<&'a str, VarKind>,
    reported: BTreeSet<String>,
    errors: Vec<TypeError>,
}

impl Checker<'_> {
    fn check(&mut self, e: &Expr, expected: VarKind, context: &str) {
        if let Expr::Var(v) = e {
            if !self.kinds.contains_key(v.as_str()) {
                if self.reported.insert(v.clone()) {
                    self.errors.push(TypeError::UndeclaredVariable(v.clone()));
                }
                return;
            }
        }
        if let Some(found) = node_kind(e, &self.kinds) {
            if found != expected {
                self.errors.push(TypeError::KindMismatch {
                    context: context.to_string(),
                    expected,
                    found,
                    expr: e.to_string(),
                });
            }
        }
        match e {
            Expr::Var(_) | Expr::Num(_) | Expr::Bool(_) => {}
            Expr::Neg(a) => self.check(a, VarKind::Numeric, context),
            Expr::Arith(_, a, b) | Expr::Cmp(_, a, b) => {
                self.check(a, VarKind::Numeric, context);
                self.check(b, VarKind::Numeric, context);
            }
            Expr::Not(a) | Expr::Persisted(_, a) => self.check(a, VarKind::Boolean, context),
            Expr::Logic(_, a, b) => {
                self.check(a, VarKind::Boolean, context);
                self.check(b, VarKind::Boolean, context);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reqlang::parse_requirement;

    const ROS_001: &str = "if persisted(10, current_consumption > cc_t & wind_speed > ws_t) \
                           ROS_component shall within 10 seconds satisfy current_consumption <= cc_t";

    fn numeric(names: &[&str]) -> Vec<VarDecl> {
        names
            .iter()
            .map(|n| VarDecl::new(*n, VarKind::Numeric))
            .collect()
    }

    #[test]
    fn running_example_is_well_typed() {
        let req = parse_requirement(ROS_001, "ROS-001").unwrap();
        let decls = numeric(&["current_consumption", "wind_speed", "cc_t", "ws_t"]);
        assert_eq!(validate(&req, &decls), vec![]);
    }

    #[test]
    fn undeclared_threshold() {
        let req = parse_requirement(ROS_001, "ROS-001").unwrap();
        let decls = numeric(&["current_consumption", "wind_speed", "cc_t"]);
        assert_eq!(
            validate(&req, &decls),
            vec![TypeError::UndeclaredVariable("ws_t".into())]
        );
    }

    #[test]
    fn numeric_response() {
        let req = parse_requirement("sys shall satisfy x + 1", "R").unwrap();
        for decls in [numeric(&["x"]), numeric(&["x", "y"])] {
            let errs = validate(&req, &decls);
            assert_eq!(errs.len(), 1);
            assert!(matches!(
                &errs[0],
                TypeError::KindMismatch { context, expected: VarKind::Boolean, found: VarKind::Numeric, .. }
                    if context == "response"
            ));
        }
    }

    #[test]
    fn preorder_and_dedup() {
        let req = parse_requirement("if u > 0 & !b sys shall satisfy u < v & b & w", "R").unwrap();
        let decls = vec![
            VarDecl::new("b", VarKind::Numeric),
            VarDecl::new("v", VarKind::Numeric),
        ];
        let errs = validate(&req, &decls);
        assert_eq!(
            errs,
            vec![
                TypeError::UndeclaredVariable("u".into()),
                TypeError::KindMismatch {
                    context: "condition".into(),
                    expected: VarKind::Boolean,
                    found: VarKind::Numeric,
                    expr: "b".into(),
                },
                TypeError::KindMismatch {
                    context: "response".into(),
                    expected: VarKind::Boolean,
                    found: VarKind::Numeric,
                    expr: "b".into(),
                },
                TypeError::UndeclaredVariable("w".into()),
            ]
        );
    }

    #[test]
    fn persisted_needs_boolean_operand() {
        let req = parse_requirement("if persisted(3, x) sys shall satisfy true", "R").unwrap();
        let errs = validate(&req, &numeric(&["x"]));
        assert_eq!(errs.len(), 1);
    }
}
