//! Recursive descent parser for requirement sentences.
//!
//! Sentence shape:
//!
//! ```text
//! [("if" | "upon") <expr> [","]] <component> "shall" ["within" <n> <unit>] "satisfy" <expr>
//! ```
//!
//! Expression precedence, loosest first: `->` (right associative), `|`,
//! `&`, prefix `!`, comparisons (non-associative), `+ -`, `* /`, prefix `-`.

use super::ast::{
    is_valid_requirement_id, ArithOp, BoolOp, CmpOp, Expr, ScopeSpec, SourceRequirement,
    TimingSpec,
};
use super::lexer::{is_keyword, tokenize, Position, Token, TokenKind};
use super::{Field, ParseError};

/// Nesting limit for parenthesized and prefix expressions.
const MAX_DEPTH: usize = 200;

/// Leading words that introduce a (non-null) FRETish scope.
const SCOPE_KEYWORDS: &[&str] = &["after", "before", "during", "in", "notin", "only", "while"];

const PRIMARY_START: &[&str] = &[
    "`(`",
    "`-`",
    "`!`",
    "`false`",
    "`persisted`",
    "`true`",
    "identifier",
    "number",
];

/// Parses one requirement sentence.
pub fn parse_requirement(text: &str, id: &str) -> Result<SourceRequirement, ParseError> {
    if !is_valid_requirement_id(id) {
        return Err(ParseError::InvalidId(id.to_string()));
    }
    let mut p = TokenCursor::new(tokenize(text)?);

    let condition = if p.peek().is_ident("if") || p.peek().is_ident("upon") {
        p.bump();
        let cond = p.parse_expr()?;
        if p.peek() == &TokenKind::Comma {
            p.bump();
        }
        Some(cond)
    } else {
        None
    };

    let component = match p.peek().clone() {
        TokenKind::Ident(name) if name == "shall" => {
            return Err(ParseError::MissingField {
                pos: p.pos(),
                field: Field::Component,
            })
        }
        TokenKind::Ident(name) if !is_keyword(&name) => {
            if condition.is_none()
                && SCOPE_KEYWORDS.contains(&name.as_str())
                && !p.peek_at(1).is_ident("shall")
            {
                return Err(ParseError::UnsupportedScope {
                    pos: p.pos(),
                    keyword: name,
                });
            }
            p.bump();
            name
        }
        TokenKind::Ident(kw) if kw == "within" || kw == "satisfy" => {
            return Err(ParseError::MissingField {
                pos: p.pos(),
                field: Field::Component,
            })
        }
        _ => {
            let expected: &[&str] = if condition.is_some() {
                &["`,`", "component name"]
            } else {
                &["`if`", "`upon`", "component name"]
            };
            return Err(p.syntax_error(expected));
        }
    };

    if !p.peek().is_ident("shall") {
        if p.peek().is_ident("within") || p.peek().is_ident("satisfy") {
            return Err(ParseError::MissingField {
                pos: p.pos(),
                field: Field::Shall,
            });
        }
        return Err(p.syntax_error(&["`shall`"]));
    }
    p.bump();

    let timing = if p.peek().is_ident("within") {
        p.bump();
        let bound_pos = p.pos();
        let bound = p.parse_count(&["positive integer"])?;
        if bound == 0 {
            return Err(ParseError::InvalidBound {
                pos: bound_pos,
                message: "within bound must be >= 1".into(),
            });
        }
        let unit = match p.peek().clone() {
            TokenKind::Ident(u) if !is_keyword(&u) => {
                p.bump();
                u
            }
            _ => return Err(p.syntax_error(&["time unit"])),
        };
        TimingSpec::Within { bound, unit }
    } else {
        TimingSpec::Immediate
    };

    if !p.peek().is_ident("satisfy") {
        let expected: &[&str] = if matches!(timing, TimingSpec::Immediate) {
            &["`satisfy`", "`within`"]
        } else {
            &["`satisfy`"]
        };
        return Err(p.syntax_error(expected));
    }
    p.bump();

    if p.peek() == &TokenKind::Eof {
        return Err(ParseError::MissingField {
            pos: p.pos(),
            field: Field::Response,
        });
    }
    let response = p.parse_expr()?;
    if p.peek() != &TokenKind::Eof {
        return Err(p.syntax_error(&["end of input", "binary operator"]));
    }

    Ok(SourceRequirement {
        id: id.to_string(),
        scope: ScopeSpec::Null,
        condition,
        component,
        timing,
        response,
        raw_text: text.to_string(),
    })
}

/// Parses a standalone expression (the whole input must be consumed).
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = TokenCursor::new(tokenize(text)?);
    let e = p.parse_expr()?;
    if p.peek() != &TokenKind::Eof {
        return Err(p.syntax_error(&["end of input", "binary operator"]));
    }
    Ok(e)
}

/// Token stream with the expression grammar. Shared with the formula
/// parser, which embeds expressions as atoms.
#[derive(Debug, Clone)]
pub(crate) struct TokenCursor {
    tokens: Vec<Token>,
    index: usize,
    depth: usize,
}

impl TokenCursor {
    pub(crate) fn new(tokens: Vec<Token>) -> Self {
        debug_assert!(matches!(tokens.last(), Some(t) if t.kind == TokenKind::Eof));
        Self {
            tokens,
            index: 0,
            depth: 0,
        }
    }

    pub(crate) fn peek(&self) -> &TokenKind {
        &self.tokens[self.index].kind
    }

    pub(crate) fn peek_at(&self, ahead: usize) -> &TokenKind {
        let i = (self.index + ahead).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    pub(crate) fn pos(&self) -> Position {
        self.tokens[self.index].pos
    }

    pub(crate) fn mark(&self) -> (usize, usize) {
        (self.index, self.depth)
    }

    pub(crate) fn reset(&mut self, mark: (usize, usize)) {
        self.index = mark.0;
        self.depth = mark.1;
    }

    pub(crate) fn bump(&mut self) -> TokenKind {
        let kind = self.tokens[self.index].kind.clone();
        if self.index + 1 < self.tokens.len() {
            self.index += 1;
        }
        kind
    }

    pub(crate) fn expect(&mut self, kind: TokenKind, what: &str) -> Result<(), ParseError> {
        if *self.peek() == kind {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax_error(&[what]))
        }
    }

    pub(crate) fn syntax_error(&self, expected: &[&str]) -> ParseError {
        let mut expected: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        expected.sort();
        expected.dedup();
        ParseError::Syntax {
            pos: self.pos(),
            expected,
            found: self.peek().to_string(),
        }
    }

    pub(crate) fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(ParseError::TooDeep { pos: self.pos() })
        } else {
            Ok(())
        }
    }

    pub(crate) fn leave(&mut self) {
        self.depth -= 1;
    }

    /// Non-negative integer literal that fits in `u32`.
    pub(crate) fn parse_count(&mut self, what: &[&str]) -> Result<u32, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            TokenKind::Number(text, _) => {
                self.bump();
                if text.contains('.') {
                    return Err(ParseError::InvalidBound {
                        pos,
                        message: format!("bound must be an integer, found `{text}`"),
                    });
                }
                text.parse::<u32>().map_err(|_| ParseError::InvalidBound {
                    pos,
                    message: format!("bound `{text}` is too large"),
                })
            }
            _ => Err(self.syntax_error(what)),
        }
    }

    pub(crate) fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let lhs = self.parse_or()?;
        let out = if self.peek() == &TokenKind::Arrow {
            self.bump();
            let rhs = self.parse_expr()?;
            Expr::logic(BoolOp::Implies, lhs, rhs)
        } else {
            lhs
        };
        self.leave();
        Ok(out)
    }

    fn parse_or(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_and()?;
        while self.peek() == &TokenKind::Pipe {
            self.bump();
            let rhs = self.parse_and()?;
            lhs = Expr::logic(BoolOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_not()?;
        while self.peek() == &TokenKind::Amp {
            self.bump();
            let rhs = self.parse_not()?;
            lhs = Expr::logic(BoolOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_not(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == &TokenKind::Bang {
            self.bump();
            self.enter()?;
            let inner = self.parse_not()?;
            self.leave();
            Ok(Expr::not(inner))
        } else {
            self.parse_cmp()
        }
    }

    fn parse_cmp(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.parse_sum()?;
        let op = match self.peek() {
            TokenKind::Lt => CmpOp::Lt,
            TokenKind::Le => CmpOp::Le,
            TokenKind::Gt => CmpOp::Gt,
            TokenKind::Ge => CmpOp::Ge,
            TokenKind::EqEq => CmpOp::Eq,
            TokenKind::Ne => CmpOp::Ne,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.parse_sum()?;
        Ok(Expr::cmp(op, lhs, rhs))
    }

    fn parse_sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_product()?;
        loop {
            let op = match self.peek() {
                TokenKind::Plus => ArithOp::Add,
                TokenKind::Minus => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.parse_product()?;
            lhs = Expr::arith(op, lhs, rhs);
        }
    }

    fn parse_product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.peek() {
                TokenKind::Star => ArithOp::Mul,
                TokenKind::Slash => ArithOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.parse_unary()?;
            lhs = Expr::arith(op, lhs, rhs);
        }
    }

    fn parse_unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == &TokenKind::Minus {
            self.bump();
            self.enter()?;
            let inner = self.parse_unary()?;
            self.leave();
            Ok(Expr::Neg(Box::new(inner)))
        } else {
            self.parse_primary()
        }
    }

    fn parse_primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            TokenKind::Number(_, value) => {
                self.bump();
                Ok(Expr::Num(value))
            }
            TokenKind::LParen => {
                self.bump();
                let e = self.parse_expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(e)
            }
            TokenKind::Ident(name) => match name.as_str() {
                "true" => {
                    self.bump();
                    Ok(Expr::Bool(true))
                }
                "false" => {
                    self.bump();
                    Ok(Expr::Bool(false))
                }
                "persisted" => {
                    self.bump();
                    self.expect(TokenKind::LParen, "`(`")?;
                    let n = self.parse_count(&["non-negative integer"])?;
                    self.expect(TokenKind::Comma, "`,`")?;
                    let e = self.parse_expr()?;
                    self.expect(TokenKind::RParen, "`)`")?;
                    Ok(Expr::persisted(n, e))
                }
                kw if is_keyword(kw) => Err(self.syntax_error(PRIMARY_START)),
                _ => {
                    self.bump();
                    Ok(Expr::Var(name))
                }
            },
            _ => Err(self.syntax_error(PRIMARY_START)),
        }
    }
}
