//! Polynomial sorts: telescopes of monomial sorts `[Δ ⊢ TY]` and
//! `[Δ ⊢ TM(A)]`, and their generalization by left-to-right folding.

use std::fmt;
use std::sync::Arc;

use super::{mgg_term, mgg_type};
use crate::signature::Signature;
use crate::syntax::{Subst, Telescope, Term, Type};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasicSort {
    Ty,
    /// Terms of a type over the ambient context extended by the arity.
    Tm(Type),
}

/// `[arity ⊢ target]` over some ambient context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoSort {
    pub arity: Telescope,
    pub target: BasicSort,
}

impl MonoSort {
    pub fn ty() -> MonoSort {
        MonoSort { arity: Telescope::empty(), target: BasicSort::Ty }
    }

    pub fn tm(ty: Type) -> MonoSort {
        MonoSort { arity: Telescope::empty(), target: BasicSort::Tm(ty) }
    }
}

/// An element of a monomial sort: a type or term over the ambient context
/// extended by the monomial's arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Elem {
    Ty(Type),
    Tm(Term),
}

impl Elem {
    pub fn subst(&self, s: &Subst) -> Elem {
        match self {
            Elem::Ty(t) => Elem::Ty(t.subst(s)),
            Elem::Tm(t) => Elem::Tm(t.subst(s)),
        }
    }

    pub fn as_type(&self) -> &Type {
        match self {
            Elem::Ty(t) => t,
            Elem::Tm(_) => panic!("expected a type element"),
        }
    }

    pub fn as_term(&self) -> &Term {
        match self {
            Elem::Tm(t) => t,
            Elem::Ty(_) => panic!("expected a term element"),
        }
    }
}

type EntryFn = dyn Fn(&Telescope, &[Elem]) -> MonoSort + Send + Sync;

/// A closed polynomial sort. Entry `i` computes its monomial over a context
/// from the elements chosen for entries `0..i`; it must commute with
/// substitution.
#[derive(Clone, Default)]
pub struct PolySort {
    entries: Vec<Arc<EntryFn>>,
}

impl fmt::Debug for PolySort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolySort({} entries)", self.entries.len())
    }
}

impl PolySort {
    pub fn new() -> PolySort {
        PolySort::default()
    }

    pub fn with(mut self, entry: impl Fn(&Telescope, &[Elem]) -> MonoSort + Send + Sync + 'static) -> PolySort {
        self.entries.push(Arc::new(entry));
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The monomial of entry `i` over `ctx`, given earlier elements.
    pub fn monomial(&self, i: usize, ctx: &Telescope, earlier: &[Elem]) -> MonoSort {
        (self.entries[i])(ctx, earlier)
    }

    /// `(A : TY) × (x : TM(A))`, the boundary of identity types.
    pub fn id_boundary() -> PolySort {
        PolySort::new().with(|_, _| MonoSort::ty()).with(|_, e| MonoSort::tm(e[0].as_type().clone()))
    }
}

/// Incremental left-to-right generalization of a tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFold {
    pub gamma0: Telescope,
    /// Generic elements with their arities, over `gamma0`.
    pub elems: Vec<(Telescope, Elem)>,
    /// `Γ → gamma0`.
    pub factor: Subst,
}

impl PolyFold {
    /// Start of a fold for a tuple over `gamma`: nothing generalized yet.
    pub fn start() -> PolyFold {
        PolyFold { gamma0: Telescope::empty(), elems: Vec::new(), factor: Subst::empty() }
    }

    pub fn elems(&self) -> Vec<Elem> {
        self.elems.iter().map(|(_, e)| e.clone()).collect()
    }

    /// Generalizes one more element. `mono` is the next monomial over
    /// `gamma0`; `elem` is the actual element over `Γ.arity[factor]`.
    pub fn step(&mut self, sig: &Signature, mono: &MonoSort, elem: &Elem) {
        let k = mono.arity.len();
        let (gamma1, rho1, elem0, factor) = match (&mono.target, elem) {
            (BasicSort::Ty, Elem::Ty(t)) => {
                let (g, r, t0, f) = mgg_type(sig, &self.gamma0, &mono.arity, &self.factor, t);
                (g, r, Elem::Ty(t0), f)
            }
            (BasicSort::Tm(a), Elem::Tm(t)) => {
                let (g, r, t0, f) = mgg_term(sig, &self.gamma0, &mono.arity, &self.factor, a, t);
                (g, r, Elem::Tm(t0), f)
            }
            _ => panic!("element does not match its monomial sort"),
        };
        for (arity, e) in &mut self.elems {
            *e = e.subst(&rho1.lift(arity.len()));
            *arity = arity.subst(&rho1);
        }
        self.elems.push((mono.arity.subst(&rho1), elem0));
        debug_assert_eq!(self.elems.last().map(|(a, _)| a.len()), Some(k));
        self.gamma0 = gamma1;
        self.factor = factor;
    }
}

/// Result of generalizing a whole tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyGeneralization {
    pub gamma0: Telescope,
    pub elems0: Vec<Elem>,
    /// `Γ → gamma0`, with `elems = elems0[factor]`.
    pub factor: Subst,
}

/// Most general generalization of a tuple `elems` of the closed polynomial
/// sort `poly` over `gamma`.
pub fn mgg_polysort(sig: &Signature, poly: &PolySort, gamma: &Telescope, elems: &[Elem]) -> PolyGeneralization {
    assert_eq!(poly.len(), elems.len(), "tuple length must match the polynomial sort");
    let mut fold = PolyFold::start();
    for (i, e) in elems.iter().enumerate() {
        let mono = poly.monomial(i, &fold.gamma0, &fold.elems());
        if cfg!(debug_assertions) {
            let actual = poly.monomial(i, gamma, &elems[..i]);
            debug_assert_eq!(actual.arity, mono.arity.subst(&fold.factor), "monomial entries must be natural");
        }
        fold.step(sig, &mono, e);
    }
    PolyGeneralization { gamma0: fold.gamma0.clone(), elems0: fold.elems(), factor: fold.factor }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::load_signature;
    use crate::syntax::{read_telescope, read_term, read_type, Names, Printer, Scope};

    const SIG: &str = "sort X\nsort Y (x : X)\nfun c : X\nfun f1 (x : X) : X";

    #[test]
    fn id_boundary_of_closed_type() {
        let sig = load_signature(SIG).unwrap();
        let mut s = Scope::new();
        let gamma = read_telescope(&sig, &mut s, "(x : X)").unwrap();
        let elems = [
            Elem::Ty(read_type(&sig, &s, "X").unwrap()),
            Elem::Tm(read_term(&sig, &s, "f1 x").unwrap()),
        ];
        let g = mgg_polysort(&sig, &PolySort::id_boundary(), &gamma, &elems);
        let p = Printer::new(&sig);
        assert_eq!(p.context(&g.gamma0), "(v0 : X)");
        assert_eq!(g.elems0[1], Elem::Tm(Term::Var(0)));
        assert_eq!(p.subst(&Names::canonical(1), &g.factor), "[f1 v0]");
    }

    #[test]
    fn closed_constant() {
        let sig = load_signature(SIG).unwrap();
        let s = Scope::new();
        let elems = [
            Elem::Ty(read_type(&sig, &s, "X").unwrap()),
            Elem::Tm(read_term(&sig, &s, "c").unwrap()),
        ];
        let g = mgg_polysort(&sig, &PolySort::id_boundary(), &Telescope::empty(), &elems);
        assert_eq!(g.gamma0.len(), 1);
        assert_eq!(g.factor, Subst(vec![read_term(&sig, &s, "c").unwrap()]));
    }

    #[test]
    fn single_type_entry() {
        let sig = load_signature(SIG).unwrap();
        let mut s = Scope::new();
        let gamma = read_telescope(&sig, &mut s, "(x : X)").unwrap();
        let poly = PolySort::new().with(|_, _| MonoSort::ty());
        let g = mgg_polysort(&sig, &poly, &gamma, &[Elem::Ty(read_type(&sig, &s, "Y (f1 x)").unwrap())]);
        let p = Printer::new(&sig);
        assert_eq!(p.context(&g.gamma0), "(v0 : X)");
        assert_eq!(p.ty(&Names::canonical(1), g.elems0[0].as_type()), "Y v0");
    }

    #[test]
    fn dependent_type_family_entry() {
        // (A : TY) × (B : [(a : A) ⊢ TY])
        let sig = load_signature(SIG).unwrap();
        let mut s = Scope::new();
        let gamma = read_telescope(&sig, &mut s, "(x : X)").unwrap();
        let poly = PolySort::new().with(|_, _| MonoSort::ty()).with(|_, e| MonoSort {
            arity: Telescope(vec![e[0].as_type().clone()]),
            target: BasicSort::Ty,
        });
        let mut inner = s.clone();
        inner.push("a");
        let elems = [
            Elem::Ty(read_type(&sig, &s, "Y (f1 x)").unwrap()),
            Elem::Ty(read_type(&sig, &inner, "Y (f1 (f1 x))").unwrap()),
        ];
        let g = mgg_polysort(&sig, &poly, &gamma, &elems);
        assert_eq!(g.gamma0.len(), 2);
        assert_eq!(g.elems0[0].subst(&g.factor), elems[0]);
        assert_eq!(g.elems0[1].subst(&g.factor.lift(1)), elems[1]);
    }
}
