//! Requirement (`# id: <ID>` blocks) and variable declaration (`.vars`) files.

use std::collections::HashSet;

use thiserror::Error;

use super::ast::{is_valid_identifier, VarDecl, VarKind};
use super::{parse_requirement, ParseError, SourceRequirement};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FileError {
    #[error("line {line}: text outside of a requirement block (missing `# id: <ID>` header)")]
    TextOutsideBlock { line: usize },
    #[error("line {line}: empty requirement `{id}`")]
    EmptyBlock { line: usize, id: String },
    #[error("line {line}: duplicate requirement id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("requirement `{id}`: {source}")]
    Requirement {
        id: String,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: expected `<name> : numeric|boolean`")]
    MalformedDecl { line: usize },
    #[error("line {line}: invalid variable name `{name}`")]
    InvalidVarName { line: usize, name: String },
    #[error("line {line}: unknown kind `{kind}` (expected numeric or boolean)")]
    UnknownKind { line: usize, kind: String },
    #[error("line {line}: variable `{name}` declared twice")]
    DuplicateVariable { line: usize, name: String },
}

/// One `# id:` block of a requirement file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementBlock {
    pub id: String,
    pub text: String,
    /// File line of the first text line.
    pub first_line: usize,
}

impl RequirementBlock {
    /// Parses the block, reporting positions in file coordinates.
    pub fn parse(&self) -> Result<SourceRequirement, FileError> {
        parse_requirement(&self.text, &self.id).map_err(|e| FileError::Requirement {
            id: self.id.clone(),
            source: e.offset_lines(self.first_line),
        })
    }
}

fn id_header(line: &str) -> Option<&str> {
    let rest = line.trim().strip_prefix('#')?.trim_start();
    let rest = rest.strip_prefix("id:")?;
    Some(rest.trim())
}

/// Splits a requirement file into blocks. Other `#` lines are comments.
pub fn split_requirement_blocks(src: &str) -> Result<Vec<RequirementBlock>, FileError> {
    let mut blocks: Vec<(RequirementBlock, usize)> = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in src.lines().enumerate() {
        let lineno = idx + 1;
        if let Some(id) = id_header(line) {
            if !seen.insert(id.to_string()) {
                return Err(FileError::DuplicateId {
                    line: lineno,
                    id: id.to_string(),
                });
            }
            blocks.push((
                RequirementBlock {
                    id: id.to_string(),
                    text: String::new(),
                    first_line: lineno + 1,
                },
                lineno,
            ));
            continue;
        }
        let trimmed = line.trim();
        if trimmed.starts_with('#') {
            continue;
        }
        match blocks.last_mut() {
            None if trimmed.is_empty() => {}
            None => return Err(FileError::TextOutsideBlock { line: lineno }),
            Some((block, _)) => {
                if block.text.is_empty() {
                    if trimmed.is_empty() {
                        continue;
                    }
                    block.first_line = lineno;
                } else {
                    block.text.push('\n');
                }
                block.text.push_str(line);
            }
        }
    }
    blocks
        .into_iter()
        .map(|(mut block, header_line)| {
            block.text = block.text.trim_end().to_string();
            if block.text.is_empty() {
                Err(FileError::EmptyBlock {
                    line: header_line,
                    id: block.id,
                })
            } else {
                Ok(block)
            }
        })
        .collect()
}

/// Parses a whole requirement file, stopping at the first error.
pub fn parse_requirements_file(src: &str) -> Result<Vec<SourceRequirement>, FileError> {
    split_requirement_blocks(src)?
        .iter()
        .map(RequirementBlock::parse)
        .collect()
}

/// Parses a `.vars` file: one `name : numeric|boolean` per line, `#` comments.
pub fn parse_var_decls(src: &str) -> Result<Vec<VarDecl>, FileError> {
    let mut decls: Vec<VarDecl> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let (name, kind) = text
            .split_once(':')
            .ok_or(FileError::MalformedDecl { line })?;
        let (name, kind) = (name.trim(), kind.trim());
        if !is_valid_identifier(name) {
            return Err(FileError::InvalidVarName {
                line,
                name: name.to_string(),
            });
        }
        let kind = match kind {
            "numeric" => VarKind::Numeric,
            "boolean" => VarKind::Boolean,
            other => {
                return Err(FileError::UnknownKind {
                    line,
                    kind: other.to_string(),
                })
            }
        };
        if decls.iter().any(|d| d.name == name) {
            return Err(FileError::DuplicateVariable {
                line,
                name: name.to_string(),
            });
        }
        decls.push(VarDecl::new(name, kind));
    }
    Ok(decls)
}
