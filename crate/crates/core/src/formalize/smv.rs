//! Parser for the SMV-style formula strings stored in component
//! specification files.

use thiserror::Error;

use super::{Interval, MtlFormula};
use crate::reqlang::{tokenize, ParseError, Position, TokenCursor, TokenKind};

/// Future-time operator names; seeing one is a hard error.
const FUTURE_OPS: &[&str] = &["F", "G", "X", "U", "V", "R"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SmvError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("{pos}: unsupported operator `{op}` (only past-time operators are allowed)")]
    UnsupportedOperator { pos: Position, op: String },
    #[error("{pos}: invalid interval [{lo},{hi}]")]
    InvalidInterval { pos: Position, lo: u32, hi: u32 },
}

impl SmvError {
    fn position(&self) -> Option<Position> {
        match self {
            SmvError::Syntax(e) => e.position(),
            SmvError::UnsupportedOperator { pos, .. } | SmvError::InvalidInterval { pos, .. } => {
                Some(*pos)
            }
        }
    }

    fn rank(&self) -> (bool, Option<Position>) {
        (
            matches!(
                self,
                SmvError::UnsupportedOperator { .. } | SmvError::InvalidInterval { .. }
            ),
            self.position(),
        )
    }
}

/// Parses a formula rendered by [`MtlFormula::to_smv_string`].
pub fn parse_smv(src: &str) -> Result<MtlFormula, SmvError> {
    let mut p = SmvParser {
        cur: TokenCursor::new(tokenize(src)?),
    };
    let f = p.formula()?;
    if p.cur.peek() != &TokenKind::Eof {
        return Err(p.cur.syntax_error(&["end of input"]).into());
    }
    Ok(f)
}

struct SmvParser {
    cur: TokenCursor,
}

#[derive(Clone, Copy)]
enum Binary {
    And,
    Or,
    Implies,
    Since(Interval),
}

impl SmvParser {
    fn formula(&mut self) -> Result<MtlFormula, SmvError> {
        match self.cur.peek() {
            TokenKind::Ident(s) if s == "FTP" => {
                self.cur.bump();
                Ok(MtlFormula::First)
            }
            TokenKind::LParen => {
                self.cur.enter()?;
                let f = self.parenthesized();
                self.cur.leave();
                f
            }
            TokenKind::Ident(s) if FUTURE_OPS.contains(&s.as_str()) => {
                Err(SmvError::UnsupportedOperator {
                    pos: self.cur.pos(),
                    op: s.clone(),
                })
            }
            _ => Err(self.cur.syntax_error(&["`(`", "`FTP`"]).into()),
        }
    }

    /// `( ... )`: tries a prefix operator, then a binary formula, then an
    /// atom, backtracking between alternatives.
    fn parenthesized(&mut self) -> Result<MtlFormula, SmvError> {
        self.cur.bump();
        let start = self.cur.mark();
        let mut best: Option<SmvError> = None;
        let keep = |err: SmvError, best: &mut Option<SmvError>| {
            if best.as_ref().is_none_or(|b| err.rank() > b.rank()) {
                *best = Some(err);
            }
        };

        for alt in 0..3 {
            self.cur.reset(start);
            let attempt = match alt {
                0 => self.prefix(),
                1 => self.binary(),
                _ => self.atom(),
            };
            match attempt {
                Ok(Some(f)) => match self.cur.expect(TokenKind::RParen, "`)`") {
                    Ok(()) => return Ok(f),
                    Err(e) => keep(e.into(), &mut best),
                },
                Ok(None) => {}
                Err(e) => keep(e, &mut best),
            }
        }
        Err(best.expect("at least one alternative applies"))
    }

    fn prefix(&mut self) -> Result<Option<MtlFormula>, SmvError> {
        let f = match self.cur.peek().clone() {
            TokenKind::Bang => {
                self.cur.bump();
                MtlFormula::not(self.formula()?)
            }
            TokenKind::Ident(op) if op == "Y" && self.starts_formula(1) => {
                self.cur.bump();
                MtlFormula::yesterday(self.formula()?)
            }
            TokenKind::Ident(op)
                if (op == "H" || op == "O") && self.cur.peek_at(1) == &TokenKind::LBracket =>
            {
                self.cur.bump();
                let window = self.interval()?;
                let inner = self.formula()?;
                if op == "H" {
                    MtlFormula::historically(window, inner)
                } else {
                    MtlFormula::once(window, inner)
                }
            }
            TokenKind::Ident(op)
                if FUTURE_OPS.contains(&op.as_str())
                    && (self.starts_formula(1) || self.cur.peek_at(1) == &TokenKind::LBracket) =>
            {
                return Err(SmvError::UnsupportedOperator {
                    pos: self.cur.pos(),
                    op,
                })
            }
            _ => return Ok(None),
        };
        Ok(Some(f))
    }

    fn binary(&mut self) -> Result<Option<MtlFormula>, SmvError> {
        if !self.starts_formula(0) {
            return Ok(None);
        }
        let lhs = self.formula()?;
        let op = match self.cur.peek().clone() {
            TokenKind::Amp => Binary::And,
            TokenKind::Pipe => Binary::Or,
            TokenKind::Arrow => Binary::Implies,
            TokenKind::Ident(s) if s == "S" && self.cur.peek_at(1) == &TokenKind::LBracket => {
                self.cur.bump();
                Binary::Since(self.interval()?)
            }
            TokenKind::Ident(s) if FUTURE_OPS.contains(&s.as_str()) => {
                return Err(SmvError::UnsupportedOperator {
                    pos: self.cur.pos(),
                    op: s,
                })
            }
            _ => {
                return Err(self
                    .cur
                    .syntax_error(&["`&`", "`|`", "`->`", "`S[a,b]`"])
                    .into())
            }
        };
        if !matches!(op, Binary::Since(_)) {
            self.cur.bump();
        }
        let rhs = self.formula()?;
        Ok(Some(match op {
            Binary::And => MtlFormula::and(lhs, rhs),
            Binary::Or => MtlFormula::or(lhs, rhs),
            Binary::Implies => MtlFormula::implies(lhs, rhs),
            Binary::Since(i) => MtlFormula::since(i, lhs, rhs),
        }))
    }

    fn atom(&mut self) -> Result<Option<MtlFormula>, SmvError> {
        let e = self.cur.parse_expr()?;
        if e.contains_persisted() {
            return Err(SmvError::UnsupportedOperator {
                pos: self.cur.pos(),
                op: "persisted".into(),
            });
        }
        Ok(Some(MtlFormula::Atom(e)))
    }

    fn starts_formula(&self, ahead: usize) -> bool {
        match self.cur.peek_at(ahead) {
            TokenKind::LParen => true,
            TokenKind::Ident(s) => s == "FTP",
            _ => false,
        }
    }

    fn interval(&mut self) -> Result<Interval, SmvError> {
        let pos = self.cur.pos();
        self.cur.expect(TokenKind::LBracket, "`[`")?;
        let lo = self.cur.parse_count(&["lower bound"])?;
        self.cur.expect(TokenKind::Comma, "`,`")?;
        let hi = self.cur.parse_count(&["upper bound"])?;
        self.cur.expect(TokenKind::RBracket, "`]`")?;
        Interval::new(lo, hi).map_err(|_| SmvError::InvalidInterval { pos, lo, hi })
    }
}
