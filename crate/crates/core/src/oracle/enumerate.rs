//! Exhaustive, deterministic enumeration of syntax within a depth bound.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use super::Exhausted;
use crate::signature::{DeclKind, Declaration, Signature};
use crate::syntax::{DeclId, Item, Subst, Telescope, Term, Type};

/// Indices at or above this mark stand for not-yet-chosen components of a
/// partial substitution.
const MARK: usize = usize::MAX / 2;

fn is_mark(t: &Term) -> bool {
    matches!(t, Term::Var(i) if *i >= MARK)
}

/// Whether two terms can still become equal once their marked holes are
/// filled.
pub(crate) fn compatible(a: &Term, b: &Term) -> bool {
    if is_mark(a) || is_mark(b) {
        return true;
    }
    match (a, b) {
        (Term::Var(i), Term::Var(j)) => i == j,
        (Term::App(f, xs), Term::App(g, ys)) => f == g && xs.iter().zip(ys).all(|(x, y)| compatible(x, y)),
        _ => false,
    }
}

/// `prefix` padded with holes up to `len` components.
pub(crate) fn with_holes(prefix: &[Term], len: usize) -> Subst {
    let mut s = prefix.to_vec();
    s.extend((prefix.len()..len).map(|j| Term::Var(MARK + j)));
    Subst(s)
}

/// Terms and types over one fixed context, memoized by classifier and depth.
pub(crate) struct TermSpace<'a> {
    sig: &'a Signature,
    ctx: Telescope,
    limit: usize,
    terms: HashMap<(Type, usize), Rc<Vec<Term>>>,
    members: HashMap<(Type, usize), Rc<HashSet<Term>>>,
    types: HashMap<usize, Rc<Vec<Type>>>,
}

impl<'a> TermSpace<'a> {
    pub(crate) fn new(sig: &'a Signature, ctx: &Telescope, limit: usize) -> TermSpace<'a> {
        TermSpace { sig, ctx: ctx.clone(), limit, terms: HashMap::new(), members: HashMap::new(), types: HashMap::new() }
    }

    fn overflow(&self, what: &str) -> Exhausted {
        Exhausted { what: what.to_string(), limit: self.limit }
    }

    /// Terms of `ty` of depth at most `depth`: variables in context order,
    /// then applications in declaration order.
    pub(crate) fn terms(&mut self, ty: &Type, depth: usize) -> Result<Rc<Vec<Term>>, Exhausted> {
        if let Some(found) = self.terms.get(&(ty.clone(), depth)) {
            return Ok(found.clone());
        }
        let mut out = Vec::new();
        if depth > 0 {
            let n = self.ctx.len();
            for level in 0..n {
                let index = n - 1 - level;
                if self.ctx.var_type(index).as_ref() == Some(ty) {
                    out.push(Term::Var(index));
                }
            }
            for id in self.sig.ids() {
                let decl = self.sig.decl(id);
                let Some(output) = &decl.output else { continue };
                if output.head != ty.head || (depth < 2 && !decl.boundary.is_empty()) {
                    continue;
                }
                for args in self.arguments(id, depth - 1)?.iter() {
                    if &output.subst(&Subst(args.clone())) == ty {
                        out.push(Term::App(id, args.clone()));
                    }
                }
                if out.len() > self.limit {
                    return Err(self.overflow("terms"));
                }
            }
        }
        let out = Rc::new(out);
        self.terms.insert((ty.clone(), depth), out.clone());
        Ok(out)
    }

    /// Whether `t` is among [`TermSpace::terms`] of `ty` and `depth`.
    pub(crate) fn contains(&mut self, ty: &Type, depth: usize, t: &Term) -> Result<bool, Exhausted> {
        let key = (ty.clone(), depth);
        if let Some(set) = self.members.get(&key) {
            return Ok(set.contains(t));
        }
        let set: Rc<HashSet<Term>> = Rc::new(self.terms(ty, depth)?.iter().cloned().collect());
        self.members.insert(key, set.clone());
        Ok(set.contains(t))
    }

    /// Types of depth at most `depth`, in declaration order.
    pub(crate) fn types(&mut self, depth: usize) -> Result<Rc<Vec<Type>>, Exhausted> {
        if let Some(found) = self.types.get(&depth) {
            return Ok(found.clone());
        }
        let mut out = Vec::new();
        if depth > 0 {
            for id in self.sig.ids() {
                if self.sig.decl(id).kind != DeclKind::Sort {
                    continue;
                }
                for args in self.arguments(id, depth - 1)?.iter() {
                    out.push(Type::new(id, args.clone()));
                }
                if out.len() > self.limit {
                    return Err(self.overflow("types"));
                }
            }
        }
        let out = Rc::new(out);
        self.types.insert(depth, out.clone());
        Ok(out)
    }

    /// Well-typed argument vectors for the boundary of `id`, left to right.
    fn arguments(&mut self, id: DeclId, depth: usize) -> Result<Vec<Vec<Term>>, Exhausted> {
        let decl: Declaration = self.sig.decl(id).clone();
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.extend_arguments(&decl, depth, &mut prefix, &mut out)?;
        Ok(out)
    }

    fn extend_arguments(
        &mut self,
        decl: &Declaration,
        depth: usize,
        prefix: &mut Vec<Term>,
        out: &mut Vec<Vec<Term>>,
    ) -> Result<(), Exhausted> {
        let i = prefix.len();
        if i == decl.boundary.len() {
            out.push(prefix.clone());
            return if out.len() > self.limit { Err(self.overflow("argument vectors")) } else { Ok(()) };
        }
        let ty = decl.boundary.0[i].subst(&Subst(prefix.clone()));
        for t in self.terms(&ty, depth)?.iter() {
            prefix.push(t.clone());
            self.extend_arguments(decl, depth, prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }
}

/// How the search may fill the next component of a partial substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Choice {
    Any,
    /// Only this term can complete a solution.
    Only(Term),
    /// No completion can be a solution.
    Nothing,
}

impl Choice {
    pub(crate) fn and(self, other: Choice) -> Choice {
        match (self, other) {
            (Choice::Nothing, _) | (_, Choice::Nothing) => Choice::Nothing,
            (Choice::Any, c) | (c, Choice::Any) => c,
            (Choice::Only(a), Choice::Only(b)) => {
                if a == b {
                    Choice::Only(a)
                } else {
                    Choice::Nothing
                }
            }
        }
    }
}

fn hole_free(t: &Term) -> bool {
    match t {
        Term::Var(i) => *i < MARK,
        Term::App(_, args) => args.iter().all(hole_free),
    }
}

/// The hole-free term opposite hole `hole` in `a = b`, if any.
fn opposite<'t>(a: &'t Term, b: &'t Term, hole: usize) -> Option<&'t Term> {
    match (a, b) {
        (Term::Var(i), t) | (t, Term::Var(i)) if *i == hole && hole_free(t) => Some(t),
        (Term::App(f, xs), Term::App(g, ys)) if f == g => xs.iter().zip(ys).find_map(|(x, y)| opposite(x, y, hole)),
        _ => None,
    }
}

fn mentions(t: &Term, v: usize) -> bool {
    match t {
        Term::Var(i) => *i == v,
        Term::App(_, args) => args.iter().any(|a| mentions(a, v)),
    }
}

/// Whether some hole faces an application containing that hole, which no
/// finite filling can equate.
fn cyclic(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Var(h), t @ Term::App(..)) | (t @ Term::App(..), Term::Var(h)) if *h >= MARK => mentions(t, *h),
        (Term::App(f, xs), Term::App(g, ys)) if f == g => xs.iter().zip(ys).any(|(x, y)| cyclic(x, y)),
        _ => false,
    }
}

/// Guidance from equations `a = b` between partially filled terms whose
/// holes sit under `shift` extra variables: `Nothing` on a clash, and
/// `Only` when hole `j` faces a hole-free term.
pub(crate) fn guide(pairs: &[(&Term, &Term)], j: usize, shift: usize) -> Choice {
    if !pairs.iter().all(|(a, b)| compatible(a, b) && !cyclic(a, b)) {
        return Choice::Nothing;
    }
    match pairs.iter().find_map(|(a, b)| opposite(a, b, MARK + j + shift)) {
        None => Choice::Any,
        Some(t) => match t.rename(&|i| i.checked_sub(shift)) {
            Some(t) => Choice::Only(t),
            None => Choice::Nothing,
        },
    }
}

/// Component pairs of two type-or-term-or-substitution items, or `None` if
/// their shapes already differ.
pub(crate) fn item_pairs<'t>(a: &'t Item, b: &'t Item) -> Option<Vec<(&'t Term, &'t Term)>> {
    match (a, b) {
        (Item::Term(x), Item::Term(y)) => Some(vec![(x, y)]),
        (Item::Type(x), Item::Type(y)) if x.head == y.head => Some(x.args.iter().zip(&y.args).collect()),
        (Item::Subst(x), Item::Subst(y)) if x.len() == y.len() => Some(x.0.iter().zip(&y.0).collect()),
        _ => None,
    }
}

/// Depth-first search for substitutions `ctx → target` with components of
/// depth at most `depth`. `guide` sees the partial substitution with holes
/// and the index of the next component; `found` receives complete
/// substitutions and returns `false` to stop the search.
pub(crate) fn search_substs(
    space: &mut TermSpace<'_>,
    target: &Telescope,
    depth: usize,
    guide: &mut dyn FnMut(&Subst, usize) -> Choice,
    found: &mut dyn FnMut(Subst) -> bool,
) -> Result<(), Exhausted> {
    let mut prefix = Vec::new();
    step(space, target, depth, &mut prefix, guide, found).map(|_| ())
}

fn step(
    space: &mut TermSpace<'_>,
    target: &Telescope,
    depth: usize,
    prefix: &mut Vec<Term>,
    guide: &mut dyn FnMut(&Subst, usize) -> Choice,
    found: &mut dyn FnMut(Subst) -> bool,
) -> Result<bool, Exhausted> {
    let i = prefix.len();
    if i == target.len() {
        return Ok(found(Subst(prefix.clone())));
    }
    let ty = target.0[i].subst(&Subst(prefix.clone()));
    let candidates = match guide(&with_holes(prefix, target.len()), i) {
        Choice::Nothing => return Ok(true),
        Choice::Any => space.terms(&ty, depth)?,
        Choice::Only(t) => Rc::new(if space.contains(&ty, depth, &t)? { vec![t] } else { Vec::new() }),
    };
    for t in candidates.iter() {
        prefix.push(t.clone());
        let go_on = step(space, target, depth, prefix, guide, found)?;
        prefix.pop();
        if !go_on {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Closed contexts of length at most `max_len` whose entries have depth at
/// most `depth`, shortest first.
pub(crate) fn contexts(sig: &Signature, max_len: usize, depth: usize, limit: usize) -> Result<Vec<Telescope>, Exhausted> {
    let mut out = vec![Telescope::empty()];
    let mut layer = vec![Telescope::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for ctx in &layer {
            let mut space = TermSpace::new(sig, ctx, limit);
            for ty in space.types(depth)?.iter() {
                next.push(ctx.extended(ty.clone()));
            }
            if out.len() + next.len() > limit {
                return Err(Exhausted { what: "contexts".to_string(), limit });
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    Ok(out)
}
