//! Normal-form syntax over a signature.
//!
//! Variables are de Bruijn indices: `Var(0)` is the last entry of the ambient
//! context. A context is a closed [`Telescope`]; a [`Subst`] from `Δ` to `Γ`
//! is stored as one term over `Δ` per entry of `Γ`, in `Γ`'s order. Since the
//! theories carry no equations, every value built here is already in normal
//! form and equality is structural.

mod print;
pub(crate) mod read;
mod support;
mod typecheck;

pub use print::{Names, Printer};
pub use read::{read_subst, read_telescope, read_term, read_type, ReadError, Scope};
pub use support::{
    close_levels, reorder, split_by_support, strengthen, support, DependsOnRigid, Reordering, Split,
};
pub use typecheck::{
    check_context, check_subst, check_telescope, check_term, check_type, infer_term, var_type,
    TypeError,
};

use std::collections::BTreeSet;

/// Stable identifier of a declaration: its position in the signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeclId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(usize),
    /// A term-former applied to a full argument vector for its boundary.
    App(DeclId, Vec<Term>),
}

/// A sort-former applied to a full argument vector for its boundary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Type {
    pub head: DeclId,
    pub args: Vec<Term>,
}

/// Dependency-ordered sequence of types; entry `i` lives over the ambient
/// context extended by entries `0..i`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Telescope(pub Vec<Type>);

/// Explicit substitution `Δ → Γ`: one term over `Δ` per entry of `Γ`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subst(pub Vec<Term>);

/// Term for the variable at de Bruijn *level* `level` in a context of length `len`.
pub fn var_at_level(len: usize, level: usize) -> Term {
    debug_assert!(level < len, "level {level} out of context of length {len}");
    Term::Var(len - 1 - level)
}

impl Term {
    pub fn app(head: DeclId, args: Vec<Term>) -> Term {
        Term::App(head, args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Restriction along `s`. `s` must have one component per entry of the
    /// term's context; a dangling index is an invariant violation.
    pub fn subst(&self, s: &Subst) -> Term {
        match self {
            Term::Var(i) => {
                let n = s.0.len();
                assert!(*i < n, "variable {i} out of range for substitution of length {n}");
                s.0[n - 1 - i].clone()
            }
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| a.subst(s)).collect()),
        }
    }

    /// Weakening: shift every index `>= cutoff` up by `by`.
    pub fn shift_from(&self, cutoff: usize, by: usize) -> Term {
        match self {
            Term::Var(i) if *i >= cutoff => Term::Var(i + by),
            Term::Var(i) => Term::Var(*i),
            Term::App(f, args) => {
                Term::App(*f, args.iter().map(|a| a.shift_from(cutoff, by)).collect())
            }
        }
    }

    pub fn shift(&self, by: usize) -> Term {
        self.shift_from(0, by)
    }

    /// Renames indices through `f`; `None` from `f` aborts the whole rename.
    pub fn rename(&self, f: &dyn Fn(usize) -> Option<usize>) -> Option<Term> {
        match self {
            Term::Var(i) => f(*i).map(Term::Var),
            Term::App(h, args) => {
                let args = args.iter().map(|a| a.rename(f)).collect::<Option<Vec<_>>>()?;
                Some(Term::App(*h, args))
            }
        }
    }

    /// Indices occurring in the term, in left-to-right order (with repeats).
    pub fn for_each_var(&self, visit: &mut dyn FnMut(usize)) {
        match self {
            Term::Var(i) => visit(*i),
            Term::App(_, args) => args.iter().for_each(|a| a.for_each_var(visit)),
        }
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.for_each_var(&mut |i| {
            out.insert(i);
        });
        out
    }

    pub fn occurs(&self, index: usize) -> bool {
        match self {
            Term::Var(i) => *i == index,
            Term::App(_, args) => args.iter().any(|a| a.occurs(index)),
        }
    }

    /// Height of the tree; variables and constants have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn heads(&self, out: &mut BTreeSet<DeclId>) {
        if let Term::App(f, args) = self {
            out.insert(*f);
            args.iter().for_each(|a| a.heads(out));
        }
    }
}

impl Type {
    pub fn new(head: DeclId, args: Vec<Term>) -> Type {
        Type { head, args }
    }

    pub fn subst(&self, s: &Subst) -> Type {
        Type { head: self.head, args: self.args.iter().map(|a| a.subst(s)).collect() }
    }

    pub fn shift_from(&self, cutoff: usize, by: usize) -> Type {
        Type { head: self.head, args: self.args.iter().map(|a| a.shift_from(cutoff, by)).collect() }
    }

    pub fn shift(&self, by: usize) -> Type {
        self.shift_from(0, by)
    }

    pub fn rename(&self, f: &dyn Fn(usize) -> Option<usize>) -> Option<Type> {
        let args = self.args.iter().map(|a| a.rename(f)).collect::<Option<Vec<_>>>()?;
        Some(Type { head: self.head, args })
    }

    pub fn for_each_var(&self, visit: &mut dyn FnMut(usize)) {
        self.args.iter().for_each(|a| a.for_each_var(visit));
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.for_each_var(&mut |i| {
            out.insert(i);
        });
        out
    }

    pub fn occurs(&self, index: usize) -> bool {
        self.args.iter().any(|a| a.occurs(index))
    }

    pub fn depth(&self) -> usize {
        1 + self.args.iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn heads(&self, out: &mut BTreeSet<DeclId>) {
        out.insert(self.head);
        self.args.iter().for_each(|a| a.heads(out));
    }
}

impl Telescope {
    pub fn empty() -> Telescope {
        Telescope(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Type> {
        self.0.iter()
    }

    pub fn push(&mut self, ty: Type) {
        self.0.push(ty);
    }

    pub fn extended(&self, ty: Type) -> Telescope {
        let mut out = self.clone();
        out.push(ty);
        out
    }

    /// `self.other` where `other` lives over `self`.
    pub fn concat(&self, other: &Telescope) -> Telescope {
        let mut out = self.clone();
        out.0.extend(other.0.iter().cloned());
        out
    }

    pub fn prefix(&self, len: usize) -> Telescope {
        Telescope(self.0[..len].to_vec())
    }

    /// The suffix starting at `from`, as a telescope over `self.prefix(from)`.
    pub fn suffix(&self, from: usize) -> Telescope {
        Telescope(self.0[from..].to_vec())
    }

    /// Restriction of an open telescope along `s : Θ → Γ`, where the
    /// telescope lives over `Γ`.
    pub fn subst(&self, s: &Subst) -> Telescope {
        Telescope(self.0.iter().enumerate().map(|(i, ty)| ty.subst(&s.lift(i))).collect())
    }

    /// Weakening of an open telescope that lives over a context into which
    /// `by` entries have been inserted at the end.
    pub fn shift(&self, by: usize) -> Telescope {
        Telescope(self.0.iter().enumerate().map(|(i, ty)| ty.shift_from(i, by)).collect())
    }

    /// Type of the variable `Var(index)` in this (closed) context, as a type
    /// over the whole context.
    pub fn var_type(&self, index: usize) -> Option<Type> {
        let n = self.len();
        (index < n).then(|| self.0[n - 1 - index].shift(index + 1))
    }

    /// Identity substitution on this context.
    pub fn identity(&self) -> Subst {
        Subst::identity(self.len())
    }
}

impl FromIterator<Type> for Telescope {
    fn from_iter<I: IntoIterator<Item = Type>>(iter: I) -> Self {
        Telescope(iter.into_iter().collect())
    }
}

impl Subst {
    pub fn empty() -> Subst {
        Subst(Vec::new())
    }

    pub fn identity(len: usize) -> Subst {
        Subst((0..len).rev().map(Term::Var).collect())
    }

    /// Projection `Γ.Δ → Γ` with `|Γ| = len` and `|Δ| = by`.
    pub fn weakening(len: usize, by: usize) -> Subst {
        Subst((0..len).rev().map(|i| Term::Var(i + by)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.0
    }

    pub fn push(&mut self, t: Term) {
        self.0.push(t);
    }

    pub fn extended(&self, t: Term) -> Subst {
        let mut out = self.clone();
        out.push(t);
        out
    }

    /// Whether this is the identity on a context of its own length.
    pub fn is_identity(&self) -> bool {
        let n = self.len();
        self.0.iter().enumerate().all(|(k, t)| *t == Term::Var(n - 1 - k))
    }

    /// `self ∘ other`: restrict every component of `self` along `other`.
    pub fn compose(&self, other: &Subst) -> Subst {
        Subst(self.0.iter().map(|t| t.subst(other)).collect())
    }

    /// Alias of [`Subst::compose`] reading as restriction.
    pub fn subst(&self, other: &Subst) -> Subst {
        self.compose(other)
    }

    /// `ρ⁺` over a telescope of length `by`: components are weakened past
    /// the telescope and its variables are mapped to themselves.
    pub fn lift(&self, by: usize) -> Subst {
        if by == 0 {
            return self.clone();
        }
        let mut terms: Vec<Term> = self.0.iter().map(|t| t.shift(by)).collect();
        terms.extend((0..by).rev().map(Term::Var));
        Subst(terms)
    }

    pub fn shift(&self, by: usize) -> Subst {
        Subst(self.0.iter().map(|t| t.shift(by)).collect())
    }

    pub fn shift_from(&self, cutoff: usize, by: usize) -> Subst {
        Subst(self.0.iter().map(|t| t.shift_from(cutoff, by)).collect())
    }

    pub fn rename(&self, f: &dyn Fn(usize) -> Option<usize>) -> Option<Subst> {
        self.0.iter().map(|t| t.rename(f)).collect::<Option<Vec<_>>>().map(Subst)
    }

    pub fn for_each_var(&self, visit: &mut dyn FnMut(usize)) {
        self.0.iter().for_each(|t| t.for_each_var(visit));
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.for_each_var(&mut |i| {
            out.insert(i);
        });
        out
    }

    pub fn depth(&self) -> usize {
        self.0.iter().map(Term::depth).max().unwrap_or(0)
    }
}

impl FromIterator<Term> for Subst {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        Subst(iter.into_iter().collect())
    }
}

/// Any of the three kinds of syntactic object the calculus manipulates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Item {
    Type(Type),
    Term(Term),
    Subst(Subst),
}

impl Item {
    pub fn subst(&self, s: &Subst) -> Item {
        match self {
            Item::Type(t) => Item::Type(t.subst(s)),
            Item::Term(t) => Item::Term(t.subst(s)),
            Item::Subst(t) => Item::Subst(t.compose(s)),
        }
    }

    pub fn shift(&self, by: usize) -> Item {
        match self {
            Item::Type(t) => Item::Type(t.shift(by)),
            Item::Term(t) => Item::Term(t.shift(by)),
            Item::Subst(t) => Item::Subst(t.shift(by)),
        }
    }

    pub fn rename(&self, f: &dyn Fn(usize) -> Option<usize>) -> Option<Item> {
        Some(match self {
            Item::Type(t) => Item::Type(t.rename(f)?),
            Item::Term(t) => Item::Term(t.rename(f)?),
            Item::Subst(t) => Item::Subst(t.rename(f)?),
        })
    }

    pub fn for_each_var(&self, visit: &mut dyn FnMut(usize)) {
        match self {
            Item::Type(t) => t.for_each_var(visit),
            Item::Term(t) => t.for_each_var(visit),
            Item::Subst(t) => t.for_each_var(visit),
        }
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.for_each_var(&mut |i| {
            out.insert(i);
        });
        out
    }

    pub fn heads(&self) -> BTreeSet<DeclId> {
        let mut out = BTreeSet::new();
        match self {
            Item::Type(t) => t.heads(&mut out),
            Item::Term(t) => t.heads(&mut out),
            Item::Subst(s) => s.0.iter().for_each(|t| t.heads(&mut out)),
        }
        out
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Item::Type(_) => "type",
            Item::Term(_) => "term",
            Item::Subst(_) => "subst",
        }
    }
}
