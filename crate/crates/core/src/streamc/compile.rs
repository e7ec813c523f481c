use std::collections::HashMap;

use super::{CompileError, ExternDecl, MonitorSpec, Pointwise, StreamId, StreamOp, Trigger};
use crate::formalize::{ComponentSpec, MtlFormula};
use crate::reqlang::{Expr, VarKind};

/// Identifiers an extern may not use because the generated C or C++ would
/// break. Names starting with `mon_` are reserved as well.
pub const RESERVED_C_NAMES: &[&str] = &[
    // C99
    "auto", "bool", "break", "case", "char", "const", "continue", "default", "do", "double",
    "else", "enum", "extern", "false", "float", "for", "goto", "if", "inline", "int", "long",
    "register", "restrict", "return", "short", "signed", "sizeof", "static", "struct",
    "switch", "true", "typedef", "union", "unsigned", "void", "volatile", "while",
    // C++
    "alignas", "alignof", "and", "and_eq", "asm", "bitand", "bitor", "catch", "class",
    "compl", "concept", "consteval", "constexpr", "constinit", "const_cast", "co_await",
    "co_return", "co_yield", "decltype", "delete", "dynamic_cast", "explicit", "export",
    "friend", "mutable", "namespace", "new", "noexcept", "not", "not_eq", "nullptr",
    "operator", "or", "or_eq", "private", "protected", "public", "reinterpret_cast",
    "requires", "static_assert", "static_cast", "template", "this", "thread_local", "throw",
    "try", "typeid", "typename", "using", "virtual", "wchar_t", "xor", "xor_eq",
    // Generated globals and runtime names
    "main", "step", "uint32_t", "uint64_t", "std", "std_msgs", "rclcpp", "active_node",
    "MonitorNode", "LoggerNode",
];

/// `handlerprop` followed by the id with non-alphanumerics replaced by `_`.
pub fn derive_handler_name(req_id: &str) -> String {
    let mut name = String::from("handlerprop");
    name.extend(
        req_id
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }),
    );
    name
}

/// Compiles every requirement of a component specification into one
/// monitor with one trigger per requirement.
///
/// Equal subformulas within a requirement share a stream; streams are not
/// shared across requirements.
pub fn compile_monitor(spec: &ComponentSpec) -> Result<MonitorSpec, CompileError> {
    let externs: Vec<ExternDecl> = spec
        .variables
        .iter()
        .map(|v| ExternDecl {
            name: v.name.clone(),
            kind: v.kind,
        })
        .collect();
    for e in &externs {
        if RESERVED_C_NAMES.contains(&e.name.as_str()) || e.name.starts_with("mon_") {
            return Err(CompileError::ReservedName(e.name.clone()));
        }
    }

    let mut streams = Vec::new();
    let mut triggers: Vec<Trigger> = Vec::new();
    for req in &spec.requirements {
        let handler_name = derive_handler_name(&req.id);
        if let Some(prev) = triggers.iter().find(|t| t.handler_name == handler_name) {
            return Err(CompileError::DuplicateHandler {
                handler: handler_name,
                first: prev.requirement_id.clone(),
                second: req.id.clone(),
            });
        }
        if externs.iter().any(|e| e.name == handler_name) {
            return Err(CompileError::ReservedName(handler_name));
        }
        let mut builder = Builder {
            id: &req.id,
            externs: &externs,
            streams: &mut streams,
            memo: HashMap::new(),
        };
        let root = builder.formula(&req.ptmtl)?;
        let guard = match builder.streams[root] {
            // The root is the newest stream and nothing else reads it.
            StreamOp::Not(inner) if root + 1 == builder.streams.len() => {
                builder.streams.pop();
                inner
            }
            _ => builder.push(StreamOp::Not(root)),
        };
        triggers.push(Trigger {
            handler_name,
            guard,
            requirement_id: req.id.clone(),
        });
    }
    Ok(MonitorSpec {
        externs,
        streams,
        triggers,
    })
}

struct Builder<'a> {
    id: &'a str,
    externs: &'a [ExternDecl],
    streams: &'a mut Vec<StreamOp>,
    /// Keyed by the rendered formula.
    memo: HashMap<String, StreamId>,
}

impl Builder<'_> {
    fn push(&mut self, op: StreamOp) -> StreamId {
        self.streams.push(op);
        self.streams.len() - 1
    }

    fn formula(&mut self, f: &MtlFormula) -> Result<StreamId, CompileError> {
        let key = f.to_smv_string();
        if let Some(id) = self.memo.get(&key) {
            return Ok(*id);
        }
        let op = match f {
            MtlFormula::Atom(Expr::Bool(b)) => StreamOp::Const(*b),
            MtlFormula::Atom(e) => {
                let (p, kind) = self.pointwise(e)?;
                if kind != VarKind::Boolean {
                    return Err(CompileError::KindMismatch {
                        id: self.id.to_string(),
                        expr: e.to_string(),
                    });
                }
                StreamOp::Sample(p)
            }
            MtlFormula::Not(a) => StreamOp::Not(self.formula(a)?),
            MtlFormula::And(a, b) => StreamOp::And(self.formula(a)?, self.formula(b)?),
            MtlFormula::Or(a, b) => StreamOp::Or(self.formula(a)?, self.formula(b)?),
            MtlFormula::Implies(a, b) => StreamOp::Implies(self.formula(a)?, self.formula(b)?),
            MtlFormula::First => StreamOp::First,
            MtlFormula::Yesterday(a) => StreamOp::Yesterday(self.formula(a)?),
            MtlFormula::Once(window, a) => StreamOp::Once {
                input: self.formula(a)?,
                window: *window,
            },
            MtlFormula::Historically(window, a) => StreamOp::Historically {
                input: self.formula(a)?,
                window: *window,
            },
            MtlFormula::Since(window, lhs, rhs) => StreamOp::Since {
                lhs: self.formula(lhs)?,
                rhs: self.formula(rhs)?,
                window: *window,
            },
        };
        let id = self.push(op);
        self.memo.insert(key, id);
        Ok(id)
    }

    fn pointwise(&self, e: &Expr) -> Result<(Pointwise, VarKind), CompileError> {
        use VarKind::{Boolean, Numeric};
        let mismatch = || CompileError::KindMismatch {
            id: self.id.to_string(),
            expr: e.to_string(),
        };
        let typed = |x: &Expr, want: VarKind| -> Result<Pointwise, CompileError> {
            let (p, kind) = self.pointwise(x)?;
            if kind == want {
                Ok(p)
            } else {
                Err(mismatch())
            }
        };
        Ok(match e {
            Expr::Var(name) => {
                let idx = self
                    .externs
                    .iter()
                    .position(|x| &x.name == name)
                    .ok_or_else(|| CompileError::UnknownVariable {
                        id: self.id.to_string(),
                        name: name.clone(),
                    })?;
                (Pointwise::Extern(idx), self.externs[idx].kind)
            }
            Expr::Num(n) => (Pointwise::Num(*n), Numeric),
            Expr::Bool(b) => (Pointwise::Bool(*b), Boolean),
            Expr::Neg(a) => (Pointwise::Neg(Box::new(typed(a, Numeric)?)), Numeric),
            Expr::Arith(op, a, b) => (
                Pointwise::Arith(*op, Box::new(typed(a, Numeric)?), Box::new(typed(b, Numeric)?)),
                Numeric,
            ),
            Expr::Cmp(op, a, b) => (
                Pointwise::Cmp(*op, Box::new(typed(a, Numeric)?), Box::new(typed(b, Numeric)?)),
                Boolean,
            ),
            Expr::Not(a) => (Pointwise::Not(Box::new(typed(a, Boolean)?)), Boolean),
            Expr::Logic(op, a, b) => (
                Pointwise::Logic(*op, Box::new(typed(a, Boolean)?), Box::new(typed(b, Boolean)?)),
                Boolean,
            ),
            Expr::Persisted(..) => {
                return Err(CompileError::UnsupportedOperator {
                    id: self.id.to_string(),
                    expr: e.to_string(),
                })
            }
        })
    }
}
