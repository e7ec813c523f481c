//! Requirement syntax tree.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Kind of a declared variable or of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Numeric,
    Boolean,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKind::Numeric => f.write_str("numeric"),
            VarKind::Boolean => f.write_str("boolean"),
        }
    }
}

/// A variable declaration from a `.vars` file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
}

impl VarDecl {
    pub fn new(name: impl Into<String>, kind: VarKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    /// Exact IEEE comparison.
    pub fn apply(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    pub fn apply(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            ArithOp::Add => lhs + rhs,
            ArithOp::Sub => lhs - rhs,
            ArithOp::Mul => lhs * rhs,
            ArithOp::Div => lhs / rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoolOp {
    And,
    Or,
    Implies,
}

impl BoolOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BoolOp::And => "&",
            BoolOp::Or => "|",
            BoolOp::Implies => "->",
        }
    }

    pub fn apply(self, lhs: bool, rhs: bool) -> bool {
        match self {
            BoolOp::And => lhs && rhs,
            BoolOp::Or => lhs || rhs,
            BoolOp::Implies => !lhs || rhs,
        }
    }
}

/// Expression appearing in a condition or response field.
///
/// The tree is untyped; [`super::validate`] checks kinds against the
/// variable declarations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Var(String),
    Num(f64),
    Bool(bool),
    Neg(Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Logic(BoolOp, Box<Expr>, Box<Expr>),
    /// `persisted(n, e)`: `e` held at the current step and the `n` before it.
    Persisted(u32, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    pub fn cmp(op: CmpOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Cmp(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn arith(op: ArithOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Arith(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn logic(op: BoolOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Logic(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn and(lhs: Expr, rhs: Expr) -> Self {
        Self::logic(BoolOp::And, lhs, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Self {
        Expr::Not(Box::new(e))
    }

    pub fn persisted(n: u32, e: Expr) -> Self {
        Expr::Persisted(n, Box::new(e))
    }

    /// Variable names in pre-order, with repetitions.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Var(v) => out.push(v),
            Expr::Num(_) | Expr::Bool(_) => {}
            Expr::Neg(e) | Expr::Not(e) | Expr::Persisted(_, e) => e.collect_vars(out),
            Expr::Arith(_, a, b) | Expr::Cmp(_, a, b) | Expr::Logic(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn contains_persisted(&self) -> bool {
        match self {
            Expr::Persisted(..) => true,
            Expr::Var(_) | Expr::Num(_) | Expr::Bool(_) => false,
            Expr::Neg(e) | Expr::Not(e) => e.contains_persisted(),
            Expr::Arith(_, a, b) | Expr::Cmp(_, a, b) | Expr::Logic(_, a, b) => {
                a.contains_persisted() || b.contains_persisted()
            }
        }
    }

    fn is_simple(&self) -> bool {
        matches!(
            self,
            Expr::Var(_) | Expr::Num(_) | Expr::Bool(_) | Expr::Persisted(..)
        )
    }
}

/// Renders in the concrete requirement syntax. Compound subterms are
/// parenthesized so the output reparses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn sub(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
            if e.is_simple() {
                write!(f, "{e}")
            } else {
                write!(f, "({e})")
            }
        }
        match self {
            Expr::Var(v) => f.write_str(v),
            Expr::Num(n) => write!(f, "{n}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                sub(f, e)
            }
            Expr::Not(e) => {
                f.write_str("!")?;
                sub(f, e)
            }
            Expr::Arith(op, a, b) => {
                sub(f, a)?;
                write!(f, " {} ", op.symbol())?;
                sub(f, b)
            }
            Expr::Cmp(op, a, b) => {
                sub(f, a)?;
                write!(f, " {} ", op.symbol())?;
                sub(f, b)
            }
            Expr::Logic(op, a, b) => {
                sub(f, a)?;
                write!(f, " {} ", op.symbol())?;
                sub(f, b)
            }
            Expr::Persisted(n, e) => write!(f, "persisted({n}, {e})"),
        }
    }
}

/// The scope field. Only the null scope (whole trace) is supported.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScopeSpec {
    Null,
    /// A mode-based scope such as `in flight mode`; never produced by the
    /// parser, rejected by formalization.
    Mode { keyword: String, mode: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimingSpec {
    Immediate,
    /// `within n <unit>`, with `n >= 1`. The unit is carried opaquely.
    Within { bound: u32, unit: String },
}

/// A parsed six-field requirement. `shall` is implicit in the struct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRequirement {
    pub id: String,
    pub scope: ScopeSpec,
    pub condition: Option<Expr>,
    pub component: String,
    pub timing: TimingSpec,
    pub response: Expr,
    pub raw_text: String,
}

impl SourceRequirement {
    /// Renders the requirement back into a sentence.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        if let Some(cond) = &self.condition {
            out.push_str(&format!("if {cond}, "));
        }
        out.push_str(&self.component);
        out.push_str(" shall ");
        if let TimingSpec::Within { bound, unit } = &self.timing {
            out.push_str(&format!("within {bound} {unit} "));
        }
        out.push_str(&format!("satisfy {}", self.response));
        out
    }
}

/// `[A-Za-z][A-Za-z0-9_-]*`
pub fn is_valid_requirement_id(id: &str) -> bool {
    let mut chars = id.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// `[A-Za-z_][A-Za-z0-9_]*`, excluding keywords.
pub fn is_valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !super::lexer::is_keyword(name)
}
