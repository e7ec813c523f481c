//! Structured requirement language: lexer, parser, type checking and file
//! formats.

mod ast;
mod files;
mod lexer;
mod parser;
mod validate;

use std::fmt;

use thiserror::Error;

pub use ast::{
    is_valid_identifier, is_valid_requirement_id, ArithOp, BoolOp, CmpOp, Expr, ScopeSpec,
    SourceRequirement, TimingSpec, VarDecl, VarKind,
};
pub use files::{
    parse_requirements_file, parse_var_decls, split_requirement_blocks, FileError,
    RequirementBlock,
};
pub use lexer::{is_keyword, Position, KEYWORDS};
pub use parser::{parse_expr, parse_requirement};
pub use validate::{validate, TypeError};

pub(crate) use lexer::{tokenize, TokenKind};
pub(crate) use parser::TokenCursor;

/// Mandatory requirement fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Component,
    Shall,
    Response,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Component => "component",
            Field::Shall => "shall",
            Field::Response => "response",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{pos}: unexpected character {found:?}")]
    Lexical { pos: Position, found: char },
    #[error("{pos}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        pos: Position,
        expected: Vec<String>,
        found: String,
    },
    #[error("{pos}: missing mandatory field `{field}`")]
    MissingField { pos: Position, field: Field },
    #[error("{pos}: {message}")]
    InvalidBound { pos: Position, message: String },
    #[error("{pos}: unsupported scope `{keyword} ...` (only the null scope is supported)")]
    UnsupportedScope { pos: Position, keyword: String },
    #[error("invalid requirement id `{0}`")]
    InvalidId(String),
    #[error("{pos}: expression nested too deeply")]
    TooDeep { pos: Position },
}

impl ParseError {
    pub fn position(&self) -> Option<Position> {
        match self {
            ParseError::Lexical { pos, .. }
            | ParseError::Syntax { pos, .. }
            | ParseError::MissingField { pos, .. }
            | ParseError::InvalidBound { pos, .. }
            | ParseError::UnsupportedScope { pos, .. }
            | ParseError::TooDeep { pos } => Some(*pos),
            ParseError::InvalidId(_) => None,
        }
    }

    pub fn offset_lines(mut self, first_line: usize) -> Self {
        match &mut self {
            ParseError::Lexical { pos, .. }
            | ParseError::Syntax { pos, .. }
            | ParseError::MissingField { pos, .. }
            | ParseError::InvalidBound { pos, .. }
            | ParseError::UnsupportedScope { pos, .. }
            | ParseError::TooDeep { pos } => *pos = pos.offset_lines(first_line),
            ParseError::InvalidId(_) => {}
        }
        self
    }
}
