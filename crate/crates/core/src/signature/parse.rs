//! Textual signature format.
//!
//! ```text
//! # comments run to end of line
//! sort X
//! sort Y (x : X)
//! fun f (x : X) (y : Y x) : Y x; fun c : X
//! ```
//!
//! Declarations are separated by newlines or `;`. Binder names shadow
//! declaration names. Names of the form `v0`, `v1`, ... are reserved for the
//! printer and cannot be declared.

use std::fmt;

use thiserror::Error;

use super::{DeclKind, Declaration, Signature, Span};
use crate::syntax::read::{lex, Reader, Tok};
use crate::syntax::Scope;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    /// The declaration being read, when its name was reached.
    pub declaration: Option<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.col)?;
        if let Some(d) = &self.declaration {
            write!(f, "in declaration `{d}`: ")?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
pub struct ParseErrors(pub Vec<ParseError>);

pub(crate) fn is_reserved_name(name: &str) -> bool {
    name.len() > 1 && name.starts_with('v') && name[1..].bytes().all(|b| b.is_ascii_digit())
}

/// Parses a signature without typechecking it; see
/// [`validate_signature`](super::validate_signature).
pub fn parse_signature(source: &str) -> Result<Signature, ParseErrors> {
    let mut sig = Signature::new();
    let mut errors = Vec::new();
    for (line_idx, raw) in source.lines().enumerate() {
        let line = line_idx + 1;
        let text = raw.split('#').next().unwrap_or("");
        let mut offset = 0;
        for segment in text.split(';') {
            let seg_len = segment.chars().count();
            if !segment.trim().is_empty() {
                if let Err(e) = parse_declaration(&mut sig, segment, line, offset) {
                    errors.push(e);
                }
            }
            offset += seg_len + 1;
        }
    }
    if errors.is_empty() {
        Ok(sig)
    } else {
        Err(ParseErrors(errors))
    }
}

fn parse_declaration(sig: &mut Signature, src: &str, line: usize, offset: usize) -> Result<(), ParseError> {
    let err = |col: usize, declaration: Option<&str>, message: String| ParseError {
        line,
        col: col + offset,
        declaration: declaration.map(str::to_string),
        message,
    };
    let toks = lex(src).map_err(|e| err(e.col, None, e.message))?;
    let first_col = toks.first().map(|(_, c)| *c).unwrap_or(1);
    let end_col = src.chars().count() + 1;
    let mut r = Reader::from_tokens(sig, toks, end_col);

    let kind = match r.bump() {
        Some(Tok::Ident(k)) if k == "sort" => DeclKind::Sort,
        Some(Tok::Ident(k)) if k == "fun" => DeclKind::Fun,
        Some(t) => return Err(err(first_col, None, format!("expected `sort` or `fun`, found {t}"))),
        None => return Ok(()),
    };
    let name_col = r.col();
    let name = r.ident().map_err(|e| err(e.col, None, e.message))?;
    let in_decl = |e: crate::syntax::ReadError| err(e.col, Some(&name), e.message);
    if is_reserved_name(&name) || name == "sort" || name == "fun" {
        return Err(err(name_col, Some(&name), format!("`{name}` is a reserved name")));
    }

    let mut scope = Scope::new();
    let (boundary, binders) = r.binders(&mut scope).map_err(in_decl)?;
    let output = match kind {
        DeclKind::Sort => None,
        DeclKind::Fun => {
            r.expect(Tok::Colon).map_err(in_decl)?;
            Some(r.ty(&scope).map_err(in_decl)?)
        }
    };
    r.finish().map_err(in_decl)?;

    let decl = Declaration {
        name: name.clone(),
        kind,
        boundary,
        output,
        binders,
        span: Some(Span { line, col: first_col + offset }),
    };
    sig.push_unchecked(decl)
        .map_err(|e| err(name_col, Some(&name), e.to_string()))?;
    Ok(())
}
