//! Reader for the textual item syntax: applicative terms such as
//! `g (f1 v0) v1`, types such as `Y (f1 v0)`, substitutions `[t, u]` and
//! telescopes `(x : X) (y : Y x)`.

use std::fmt;

use thiserror::Error;

use super::{DeclId, Subst, Telescope, Term, Type};
use crate::signature::{DeclKind, Signature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("column {col}: {message}")]
pub struct ReadError {
    pub col: usize,
    pub message: String,
}

impl ReadError {
    fn new(col: usize, message: impl Into<String>) -> ReadError {
        ReadError { col, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Arrow,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Arrow => f.write_str("`=>`"),
        }
    }
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Tokens with their 1-based columns.
pub(crate) fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ReadError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, col));
                i += 1;
            }
            '[' => {
                out.push((Tok::LBracket, col));
                i += 1;
            }
            ']' => {
                out.push((Tok::RBracket, col));
                i += 1;
            }
            ':' => {
                out.push((Tok::Colon, col));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, col));
                i += 1;
            }
            '=' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow, col));
                i += 2;
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            }
            other => return Err(ReadError::new(col, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

/// Variable names in scope, outermost first.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    names: Vec<String>,
}

impl Scope {
    pub fn new() -> Scope {
        Scope::default()
    }

    pub fn from_names<I, S>(names: I) -> Scope
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Scope { names: names.into_iter().map(Into::into).collect() }
    }

    pub fn push(&mut self, name: impl Into<String>) {
        self.names.push(name.into());
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Innermost binding wins.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().rev().position(|n| n == name)
    }
}

pub(crate) struct Reader<'a> {
    sig: &'a Signature,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(sig: &'a Signature, src: &str) -> Result<Reader<'a>, ReadError> {
        Ok(Reader { sig, toks: lex(src)?, pos: 0, end_col: src.chars().count() + 1 })
    }

    pub(crate) fn from_tokens(sig: &'a Signature, toks: Vec<(Tok, usize)>, end_col: usize) -> Reader<'a> {
        Reader { sig, toks, pos: 0, end_col }
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    pub(crate) fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    pub(crate) fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    pub(crate) fn expect(&mut self, want: Tok) -> Result<(), ReadError> {
        let col = self.col();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(ReadError::new(col, format!("expected {want}, found {t}"))),
            None => Err(ReadError::new(col, format!("expected {want}, found end of input"))),
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String, ReadError> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(s),
            Some(t) => Err(ReadError::new(col, format!("expected a name, found {t}"))),
            None => Err(ReadError::new(col, "expected a name, found end of input")),
        }
    }

    pub(crate) fn finish(&self) -> Result<(), ReadError> {
        match self.toks.get(self.pos) {
            None => Ok(()),
            Some((t, col)) => Err(ReadError::new(*col, format!("unexpected {t}"))),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::LParen))
    }

    fn resolve_head(&self, name: &str, col: usize, want: DeclKind) -> Result<DeclId, ReadError> {
        let id = self
            .sig
            .id_of(name)
            .ok_or_else(|| ReadError::new(col, format!("undeclared name `{name}`")))?;
        let kind = self.sig.decl(id).kind;
        if kind != want {
            let what = match want {
                DeclKind::Sort => "a sort-former",
                DeclKind::Fun => "a term-former",
            };
            return Err(ReadError::new(col, format!("`{name}` is not {what}")));
        }
        Ok(id)
    }

    /// `term := name atom* | '(' term ')'`
    pub(crate) fn term(&mut self, scope: &Scope) -> Result<Term, ReadError> {
        if self.peek() == Some(&Tok::LParen) {
            self.bump();
            let t = self.term(scope)?;
            self.expect(Tok::RParen)?;
            return Ok(t);
        }
        let col = self.col();
        let name = self.ident()?;
        if let Some(i) = scope.index_of(&name) {
            if self.starts_atom() {
                return Err(ReadError::new(self.col(), format!("variable `{name}` cannot be applied")));
            }
            return Ok(Term::Var(i));
        }
        let head = self.resolve_head(&name, col, DeclKind::Fun)?;
        let mut args = Vec::new();
        while self.starts_atom() {
            args.push(self.atom(scope)?);
        }
        Ok(Term::App(head, args))
    }

    fn atom(&mut self, scope: &Scope) -> Result<Term, ReadError> {
        if self.peek() == Some(&Tok::LParen) {
            self.bump();
            let t = self.term(scope)?;
            self.expect(Tok::RParen)?;
            return Ok(t);
        }
        let col = self.col();
        let name = self.ident()?;
        if let Some(i) = scope.index_of(&name) {
            return Ok(Term::Var(i));
        }
        let head = self.resolve_head(&name, col, DeclKind::Fun)?;
        Ok(Term::App(head, Vec::new()))
    }

    /// `type := sort-name atom* | '(' type ')'`
    pub(crate) fn ty(&mut self, scope: &Scope) -> Result<Type, ReadError> {
        if self.peek() == Some(&Tok::LParen) {
            self.bump();
            let t = self.ty(scope)?;
            self.expect(Tok::RParen)?;
            return Ok(t);
        }
        let col = self.col();
        let name = self.ident()?;
        if scope.index_of(&name).is_some() {
            return Err(ReadError::new(col, format!("variable `{name}` used as a type")));
        }
        let head = self.resolve_head(&name, col, DeclKind::Sort)?;
        let mut args = Vec::new();
        while self.starts_atom() {
            args.push(self.atom(scope)?);
        }
        Ok(Type { head, args })
    }

    /// `subst := '[' (term (',' term)*)? ']'`
    pub(crate) fn subst(&mut self, scope: &Scope) -> Result<Subst, ReadError> {
        self.expect(Tok::LBracket)?;
        let mut terms = Vec::new();
        if self.peek() == Some(&Tok::RBracket) {
            self.bump();
            return Ok(Subst(terms));
        }
        loop {
            terms.push(self.term(scope)?);
            let col = self.col();
            match self.bump() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBracket) => break,
                Some(t) => return Err(ReadError::new(col, format!("expected `,` or `]`, found {t}"))),
                None => return Err(ReadError::new(col, "unterminated substitution")),
            }
        }
        Ok(Subst(terms))
    }

    /// Binders `(x : A)` extending `scope` as they are read. A lone `()`
    /// denotes the empty telescope.
    pub(crate) fn binders(&mut self, scope: &mut Scope) -> Result<(Telescope, Vec<String>), ReadError> {
        let mut tel = Telescope::empty();
        let mut names = Vec::new();
        while self.peek() == Some(&Tok::LParen) {
            self.bump();
            if self.peek() == Some(&Tok::RParen) {
                self.bump();
                continue;
            }
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.ty(scope)?;
            self.expect(Tok::RParen)?;
            scope.push(name.clone());
            names.push(name);
            tel.push(ty);
        }
        Ok((tel, names))
    }
}

pub fn read_term(sig: &Signature, scope: &Scope, src: &str) -> Result<Term, ReadError> {
    let mut r = Reader::new(sig, src)?;
    let t = r.term(scope)?;
    r.finish()?;
    Ok(t)
}

pub fn read_type(sig: &Signature, scope: &Scope, src: &str) -> Result<Type, ReadError> {
    let mut r = Reader::new(sig, src)?;
    let t = r.ty(scope)?;
    r.finish()?;
    Ok(t)
}

pub fn read_subst(sig: &Signature, scope: &Scope, src: &str) -> Result<Subst, ReadError> {
    let mut r = Reader::new(sig, src)?;
    let t = r.subst(scope)?;
    r.finish()?;
    Ok(t)
}

/// Reads a telescope, extending `scope` with its binder names.
pub fn read_telescope(sig: &Signature, scope: &mut Scope, src: &str) -> Result<Telescope, ReadError> {
    let mut r = Reader::new(sig, src)?;
    let (tel, _) = r.binders(scope)?;
    r.finish()?;
    Ok(tel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::load_signature;

    fn sig() -> Signature {
        load_signature("sort X\nsort Y (x : X)\nfun f1 (x : X) : X\nfun f2 (x : X) (y : X) : X\nfun c : X").unwrap()
    }

    #[test]
    fn reads_nested_application() {
        let sig = sig();
        let scope = Scope::from_names(["u", "v"]);
        let t = read_term(&sig, &scope, "f2 (f1 u) v").unwrap();
        let f1 = sig.id_of("f1").unwrap();
        let f2 = sig.id_of("f2").unwrap();
        assert_eq!(t, Term::App(f2, vec![Term::App(f1, vec![Term::Var(1)]), Term::Var(0)]));
    }

    #[test]
    fn constants_are_nullary_applications() {
        let sig = sig();
        let t = read_term(&sig, &Scope::new(), "f1 c").unwrap();
        let c = sig.id_of("c").unwrap();
        assert_eq!(t, Term::App(sig.id_of("f1").unwrap(), vec![Term::App(c, vec![])]));
    }

    #[test]
    fn telescope_extends_scope() {
        let sig = sig();
        let mut scope = Scope::new();
        let tel = read_telescope(&sig, &mut scope, "(x : X) (y : Y (f1 x))").unwrap();
        assert_eq!(tel.len(), 2);
        assert_eq!(scope.names(), ["x", "y"]);
        let empty = read_telescope(&sig, &mut Scope::new(), "()").unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn reports_errors_with_columns() {
        let sig = sig();
        let err = read_term(&sig, &Scope::new(), "f1 zz").unwrap_err();
        assert_eq!(err.col, 4);
        assert!(read_type(&sig, &Scope::new(), "f1").is_err());
        assert!(read_term(&sig, &Scope::from_names(["x"]), "x c").is_err());
        assert!(read_subst(&sig, &Scope::new(), "[c, c").is_err());
    }
}
