//! Signatures of generating sort-formers and term-formers.
//!
//! A signature is a finite stratified list: each declaration's boundary and
//! output type may only mention declarations that precede it. Declarations
//! are referred to internally by their position ([`DeclId`]); names are only
//! used for parsing and printing.

mod parse;

pub use parse::{parse_signature, ParseError, ParseErrors};

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{check_telescope, check_type, DeclId, Telescope, Type, TypeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeclKind {
    Sort,
    Fun,
}

impl fmt::Display for DeclKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeclKind::Sort => f.write_str("sort"),
            DeclKind::Fun => f.write_str("fun"),
        }
    }
}

/// Where a declaration came from, for diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone)]
pub struct Declaration {
    pub name: String,
    pub kind: DeclKind,
    pub boundary: Telescope,
    /// Output type over `boundary`; present exactly for term-formers.
    pub output: Option<Type>,
    /// Display names for the boundary binders.
    pub binders: Vec<String>,
    pub span: Option<Span>,
}

impl PartialEq for Declaration {
    // provenance is not part of the structure
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.kind == other.kind
            && self.boundary == other.boundary
            && self.output == other.output
            && self.binders == other.binders
    }
}

impl Eq for Declaration {}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("duplicate declaration `{0}`")]
    Duplicate(String),
    #[error("`{0}` is not declared")]
    NotFound(String),
    #[error("in declaration `{name}`: {source}")]
    IllTyped {
        name: String,
        #[source]
        source: TypeError,
    },
    #[error("in declaration `{name}`: {message}")]
    Malformed { name: String, message: String },
}

impl SignatureError {
    /// Name of the offending declaration, when the error concerns one.
    pub fn declaration(&self) -> &str {
        match self {
            SignatureError::Duplicate(n) | SignatureError::NotFound(n) => n,
            SignatureError::IllTyped { name, .. } | SignatureError::Malformed { name, .. } => name,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
pub struct ValidationErrors(pub Vec<SignatureError>);

#[derive(Debug, Clone, Default)]
pub struct Signature {
    decls: Vec<Declaration>,
    by_name: HashMap<String, DeclId>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.decls == other.decls
    }
}

impl Eq for Signature {}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn decl(&self, id: DeclId) -> &Declaration {
        &self.decls[id.0]
    }

    pub fn get(&self, id: DeclId) -> Option<&Declaration> {
        self.decls.get(id.0)
    }

    pub fn declarations(&self) -> &[Declaration] {
        &self.decls
    }

    pub fn ids(&self) -> impl Iterator<Item = DeclId> + '_ {
        (0..self.decls.len()).map(DeclId)
    }

    pub fn id_of(&self, name: &str) -> Option<DeclId> {
        self.by_name.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<&Declaration, SignatureError> {
        self.id_of(name)
            .map(|id| self.decl(id))
            .ok_or_else(|| SignatureError::NotFound(name.to_string()))
    }

    pub fn name(&self, id: DeclId) -> &str {
        &self.decls[id.0].name
    }

    /// The prefix of this signature made of the first `len` declarations.
    pub fn prefix(&self, len: usize) -> Signature {
        let mut out = Signature::new();
        for d in &self.decls[..len] {
            out.push_unchecked(d.clone()).expect("prefix of a signature has unique names");
        }
        out
    }

    /// Appends without typechecking; only name uniqueness is enforced.
    pub fn push_unchecked(&mut self, decl: Declaration) -> Result<DeclId, SignatureError> {
        if self.by_name.contains_key(&decl.name) {
            return Err(SignatureError::Duplicate(decl.name));
        }
        let id = DeclId(self.decls.len());
        self.by_name.insert(decl.name.clone(), id);
        self.decls.push(decl);
        Ok(id)
    }

    /// Cellular extension by one declaration, checked against the current
    /// signature.
    pub fn push(&mut self, decl: Declaration) -> Result<DeclId, SignatureError> {
        self.check_declaration(&decl)?;
        self.push_unchecked(decl)
    }

    pub fn declare_sort(&mut self, name: &str, boundary: Telescope) -> Result<DeclId, SignatureError> {
        let binders = default_binders(boundary.len());
        self.push(Declaration {
            name: name.to_string(),
            kind: DeclKind::Sort,
            boundary,
            output: None,
            binders,
            span: None,
        })
    }

    pub fn declare_fun(
        &mut self,
        name: &str,
        boundary: Telescope,
        output: Type,
    ) -> Result<DeclId, SignatureError> {
        let binders = default_binders(boundary.len());
        self.push(Declaration {
            name: name.to_string(),
            kind: DeclKind::Fun,
            boundary,
            output: Some(output),
            binders,
            span: None,
        })
    }

    /// Checks `decl` against this signature taken as its prefix.
    pub fn check_declaration(&self, decl: &Declaration) -> Result<(), SignatureError> {
        let ill = |source| SignatureError::IllTyped { name: decl.name.clone(), source };
        check_telescope(self, &Telescope::empty(), &decl.boundary).map_err(ill)?;
        match (decl.kind, &decl.output) {
            (DeclKind::Sort, None) => Ok(()),
            (DeclKind::Fun, Some(out)) => check_type(self, &decl.boundary, out).map_err(ill),
            (DeclKind::Sort, Some(_)) => Err(SignatureError::Malformed {
                name: decl.name.clone(),
                message: "sort-former with an output type".into(),
            }),
            (DeclKind::Fun, None) => Err(SignatureError::Malformed {
                name: decl.name.clone(),
                message: "term-former without an output type".into(),
            }),
        }
    }

    /// Unused display name derived from `base` (`base`, `base_2`, ...).
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.by_name.contains_key(base) {
            return base.to_string();
        }
        (2..)
            .map(|k| format!("{base}_{k}"))
            .find(|n| !self.by_name.contains_key(n))
            .expect("infinitely many candidates")
    }
}

fn default_binders(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Checks every declaration against the prefix that precedes it. Reports
/// all failures, each naming its declaration.
pub fn validate_signature(sig: &Signature) -> Result<(), ValidationErrors> {
    let mut errors = Vec::new();
    let mut prefix = Signature::new();
    for decl in sig.declarations() {
        if let Err(e) = prefix.check_declaration(decl) {
            errors.push(e);
        }
        // keep going so later declarations are still checked in order
        if let Err(e) = prefix.push_unchecked(decl.clone()) {
            errors.push(e);
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(ValidationErrors(errors))
    }
}

/// Parses and validates in one go.
pub fn load_signature(source: &str) -> Result<Signature, LoadError> {
    let sig = parse_signature(source)?;
    validate_signature(&sig)?;
    Ok(sig)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseErrors),
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),
}

impl fmt::Display for Signature {
    /// Canonical form: one declaration per line, binders fully parenthesized.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for id in self.ids() {
            writeln!(f, "{}", self.render_declaration(id))?;
        }
        Ok(())
    }
}

impl Signature {
    pub fn render_declaration(&self, id: DeclId) -> String {
        use crate::syntax::{Names, Printer};
        let d = self.decl(id);
        let p = Printer::new(self);
        let mut names = Names::new();
        let mut out = format!("{} {}", d.kind, d.name);
        for (ty, binder) in d.boundary.iter().zip(&d.binders) {
            out.push_str(&format!(" ({} : {})", binder, p.ty(&names, ty)));
            names.push(binder.clone());
        }
        if let Some(o) = &d.output {
            out.push_str(&format!(" : {}", p.ty(&names, o)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;

    pub(crate) const WORKED: &str = "sort X\nsort Y (x : X)\nfun f1 (x : X) : X\nfun f2 (x : X) (y : X) : X\nfun g (x : X) (y : Y x) : X\nfun h (x : X) (y : Y x) : Y (f1 x)";

    #[test]
    fn worked_signature_validates() {
        let sig = parse_signature(WORKED).unwrap();
        assert_eq!(sig.len(), 6);
        validate_signature(&sig).unwrap();
        // idempotent
        validate_signature(&sig).unwrap();
    }

    #[test]
    fn lookup_finds_declarations() {
        let sig = load_signature(WORKED).unwrap();
        let g = sig.lookup("g").unwrap();
        assert_eq!(g.kind, DeclKind::Fun);
        let x = sig.id_of("X").unwrap();
        let y = sig.id_of("Y").unwrap();
        assert_eq!(
            g.boundary,
            Telescope(vec![Type::new(x, vec![]), Type::new(y, vec![Term::Var(0)])])
        );
        assert_eq!(g.output, Some(Type::new(x, vec![])));
        let xd = sig.lookup("X").unwrap();
        assert_eq!(xd.kind, DeclKind::Sort);
        assert!(xd.boundary.is_empty());
        assert_eq!(sig.lookup("zzz"), Err(SignatureError::NotFound("zzz".into())));
    }

    #[test]
    fn output_type_may_mention_earlier_term_former() {
        let sig = load_signature(WORKED).unwrap();
        let h = sig.lookup("h").unwrap();
        let f1 = sig.id_of("f1").unwrap();
        assert_eq!(h.output.as_ref().unwrap().args, vec![Term::App(f1, vec![Term::Var(1)])]);
    }

    #[test]
    fn unbound_variable_in_boundary_names_the_declaration() {
        let mut sig = load_signature(WORKED).unwrap();
        let y = sig.id_of("Y").unwrap();
        let f1 = sig.id_of("f1").unwrap();
        let x = sig.id_of("X").unwrap();
        // fun k (y : Y (f1 x)) : X  with x unbound
        sig.push_unchecked(Declaration {
            name: "k".into(),
            kind: DeclKind::Fun,
            boundary: Telescope(vec![Type::new(y, vec![Term::App(f1, vec![Term::Var(0)])])]),
            output: Some(Type::new(x, vec![])),
            binders: vec!["y".into()],
            span: None,
        })
        .unwrap();
        let errs = validate_signature(&sig).unwrap_err();
        assert_eq!(errs.0.len(), 1);
        assert_eq!(errs.0[0].declaration(), "k");
        assert!(matches!(errs.0[0], SignatureError::IllTyped { source: TypeError::InvalidIndex { .. }, .. }));
    }

    #[test]
    fn ill_typed_output_is_reported() {
        let mut sig = load_signature("sort X\nsort Y (x : X)").unwrap();
        let y = sig.id_of("Y").unwrap();
        let x = sig.id_of("X").unwrap();
        // output Y applied to a variable of type Y x
        let err = sig
            .declare_fun(
                "bad",
                Telescope(vec![Type::new(x, vec![]), Type::new(y, vec![Term::Var(0)])]),
                Type::new(y, vec![Term::Var(0)]),
            )
            .unwrap_err();
        assert_eq!(err.declaration(), "bad");
        assert_eq!(sig.len(), 2);
    }

    #[test]
    fn canonical_print_round_trips() {
        let sig = load_signature(WORKED).unwrap();
        let printed = sig.to_string();
        assert_eq!(printed.lines().count(), 6);
        assert_eq!(printed.lines().nth(5).unwrap(), "fun h (x : X) (y : Y x) : Y (f1 x)");
        assert_eq!(load_signature(&printed).unwrap(), sig);
    }

    #[test]
    fn extension_by_valid_declaration_stays_valid() {
        let mut sig = load_signature(WORKED).unwrap();
        let x = sig.id_of("X").unwrap();
        sig.declare_fun("c", Telescope::empty(), Type::new(x, vec![])).unwrap();
        validate_signature(&sig).unwrap();
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let sig = load_signature("sort Id1\nsort Id1_2").unwrap();
        assert_eq!(sig.fresh_name("Id1"), "Id1_3");
        assert_eq!(sig.fresh_name("refl1"), "refl1");
    }
}
