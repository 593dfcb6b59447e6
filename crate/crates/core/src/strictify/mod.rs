//! Identity types: a weakly stable weak structure given per context, and the
//! strictly stable structure obtained by evaluating it at generic contexts.
//!
//! The weak structure is abstract ([`WeakIdentity`]); [`IdStructureTable`]
//! realizes it freely by declaring fresh symbols. [`StrictIdStructure`]
//! derives `Idˢ`, `reflˢ`, `Jˢ` and `Jβˢ`, which commute with substitution
//! on the nose.

mod query;
mod table;

pub use query::{ProbeOutcome, QueryResult, StrictOp, StrictQuery};
pub use table::{IdStructureTable, Renaming};

use thiserror::Error;

use crate::generalize::{mgg_polysort, BasicSort, Elem, MonoSort, PolyFold, PolySort};
use crate::signature::{Signature, SignatureError};
use crate::syntax::{check_subst, Subst, Telescope, Term, Type, TypeError};

/// `(Γ, A, x)`: a type over `Γ` with a point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IdIntro {
    pub gamma: Telescope,
    pub ty: Type,
    pub point: Term,
}

/// `(Δ, γ, P, d)` over an introduction context `(Γ, A, x)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IdElim {
    pub intro: IdIntro,
    pub delta: Telescope,
    /// `Δ → Γ`.
    pub gamma_map: Subst,
    /// Over `Δ.(y : A[γ]).(p : Id(γ, y))`.
    pub motive: Type,
    /// Over `Δ`, of type `P(id, x[γ], refl(γ))`.
    pub base: Term,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrictifyError {
    #[error("elimination context over an unregistered introduction context `{0}`")]
    UnregisteredIntro(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("ill-typed {what}: {source}")]
    IllTyped {
        what: &'static str,
        #[source]
        source: TypeError,
    },
}

/// A weakly stable weak identity structure: operations given separately for
/// every introduction and elimination context, with no naturality.
///
/// * `id(Γ, A, x)` is a type over `Γ.(y : A)`;
/// * `refl(Γ, A, x)` is a term over `Γ` of type `id[id, x]`;
/// * `j(Δ, γ, P, d)` is a term over `Δ.(y : A[γ]).(p : Id(γ, y))` of type `P`;
/// * `jbeta(Δ, γ, P, d)` is a term over `Δ` of type
///   `Id_(Δ, P', d)(id, J(id, x[γ], refl(γ)))` with `P' = P(id, x[γ], refl(γ))`.
pub trait WeakIdentity {
    fn signature(&self) -> &Signature;
    fn id(&mut self, intro: &IdIntro) -> Result<Type, StrictifyError>;
    fn refl(&mut self, intro: &IdIntro) -> Result<Term, StrictifyError>;
    fn j(&mut self, elim: &IdElim) -> Result<Term, StrictifyError>;
    fn jbeta(&mut self, elim: &IdElim) -> Result<Term, StrictifyError>;
}

/// Parameters of a strict elimination: `A`, `x`, the motive `P` over
/// `Γ.(y : A).(p : Idˢ(A, x, y))` and the base case `d : P(x, reflˢ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElimParams {
    pub ty: Type,
    pub point: Term,
    pub motive: Type,
    pub base: Term,
}

impl ElimParams {
    /// Restriction along `sigma : Λ → Γ`.
    pub fn subst(&self, sigma: &Subst) -> ElimParams {
        ElimParams {
            ty: self.ty.subst(sigma),
            point: self.point.subst(sigma),
            motive: self.motive.subst(&sigma.lift(2)),
            base: self.base.subst(sigma),
        }
    }
}

/// Data computed once per strict elimination: the generic elimination
/// context and the factor `g : Γ → Γ1`.
struct GenericElim {
    elim: IdElim,
    /// `refl` of the generic introduction context, restricted to `Γ1`.
    refl1: Term,
    g: Subst,
}

/// The strictly stable identity structure derived from a weak one.
#[derive(Debug, Clone)]
pub struct StrictIdStructure<W> {
    ws: W,
}

impl StrictIdStructure<IdStructureTable> {
    /// Strictification of the free weak structure over `sig`.
    pub fn free(sig: &Signature) -> Self {
        StrictIdStructure { ws: IdStructureTable::new(sig) }
    }
}

impl<W: WeakIdentity> StrictIdStructure<W> {
    pub fn new(ws: W) -> Self {
        StrictIdStructure { ws }
    }

    pub fn weak(&self) -> &W {
        &self.ws
    }

    pub fn into_weak(self) -> W {
        self.ws
    }

    pub fn signature(&self) -> &Signature {
        self.ws.signature()
    }

    /// The generic introduction context of `⟨A, x⟩` and the factor
    /// `f : Γ → Γ0`.
    pub fn generic_intro(&self, gamma: &Telescope, ty: &Type, point: &Term) -> (IdIntro, Subst) {
        let g = mgg_polysort(
            self.ws.signature(),
            &PolySort::id_boundary(),
            gamma,
            &[Elem::Ty(ty.clone()), Elem::Tm(point.clone())],
        );
        let intro = IdIntro { gamma: g.gamma0, ty: g.elems0[0].as_type().clone(), point: g.elems0[1].as_term().clone() };
        (intro, g.factor)
    }

    /// `Idˢ_Γ(A, x, y)`.
    pub fn strict_id(&mut self, gamma: &Telescope, ty: &Type, point: &Term, index: &Term) -> Result<Type, StrictifyError> {
        let (intro, f) = self.generic_intro(gamma, ty, point);
        let id = self.ws.id(&intro)?;
        Ok(id.subst(&f.extended(index.clone())))
    }

    /// `reflˢ_Γ(A, x)`.
    pub fn strict_refl(&mut self, gamma: &Telescope, ty: &Type, point: &Term) -> Result<Term, StrictifyError> {
        let (intro, f) = self.generic_intro(gamma, ty, point);
        Ok(self.ws.refl(&intro)?.subst(&f))
    }

    /// The telescope `(y : A).(p : Idˢ(A, x, y))` over `Γ`, the arity of
    /// motives.
    pub fn motive_arity(&mut self, gamma: &Telescope, ty: &Type, point: &Term) -> Result<Telescope, StrictifyError> {
        let ext = gamma.extended(ty.clone());
        let id = self.strict_id(&ext, &ty.shift(1), &point.shift(1), &Term::Var(0))?;
        Ok(Telescope(vec![ty.clone(), id]))
    }

    /// Generalizes `⟨A, x, P, d⟩` against `∂J` and builds the elimination
    /// context at the generic context.
    fn generic_elim(&mut self, gamma: &Telescope, params: &ElimParams) -> Result<GenericElim, StrictifyError> {
        let mut fold = PolyFold::start();
        fold.step(self.ws.signature(), &MonoSort::ty(), &Elem::Ty(params.ty.clone()));
        let a_c = fold.elems[0].1.as_type().clone();
        fold.step(self.ws.signature(), &MonoSort::tm(a_c), &Elem::Tm(params.point.clone()));

        let (a_c, x_c) = (fold.elems[0].1.as_type().clone(), fold.elems[1].1.as_term().clone());
        let arity = self.motive_arity(&fold.gamma0, &a_c, &x_c)?;
        let mono = MonoSort { arity, target: BasicSort::Ty };
        fold.step(self.ws.signature(), &mono, &Elem::Ty(params.motive.clone()));

        let gamma_c = fold.gamma0.clone();
        let (a_c, x_c) = (fold.elems[0].1.as_type().clone(), fold.elems[1].1.as_term().clone());
        let p_c = fold.elems[2].1.as_type().clone();
        let refl_c = self.strict_refl(&gamma_c, &a_c, &x_c)?;
        let at_refl = Subst::identity(gamma_c.len()).extended(x_c).extended(refl_c);
        fold.step(self.ws.signature(), &MonoSort::tm(p_c.subst(&at_refl)), &Elem::Tm(params.base.clone()));

        let gamma1 = fold.gamma0.clone();
        let elems = fold.elems();
        let (a1, x1, p1, d1) =
            (elems[0].as_type().clone(), elems[1].as_term().clone(), elems[2].as_type().clone(), elems[3].as_term().clone());
        let (intro0, f) = self.generic_intro(&gamma1, &a1, &x1);
        let refl1 = self.ws.refl(&intro0)?.subst(&f);
        debug_assert!(check_subst(self.ws.signature(), gamma, &fold.factor, &gamma1).is_ok());
        let elim = IdElim { intro: intro0, delta: gamma1, gamma_map: f, motive: p1, base: d1 };
        Ok(GenericElim { elim, refl1, g: fold.factor })
    }

    /// `Jˢ_Γ(A, x, P, d, y, p)`.
    pub fn strict_j(
        &mut self,
        gamma: &Telescope,
        params: &ElimParams,
        index: &Term,
        path: &Term,
    ) -> Result<Term, StrictifyError> {
        let ge = self.generic_elim(gamma, params)?;
        let j = self.ws.j(&ge.elim)?;
        Ok(j.subst(&ge.g.extended(index.clone()).extended(path.clone())))
    }

    /// `Jβˢ_Γ(A, x, P, d) : Idˢ(P(x, reflˢ), Jˢ(A, x, P, d, x, reflˢ), d)`.
    ///
    /// The weak `Jβ` at the generic context lives in the weak identity type
    /// of `(Γ1, P1', d1)`; it is carried into the strict identity type by
    /// one weak elimination whose motive is `Idˢ(P1', y, d1)`.
    pub fn strict_jbeta(&mut self, gamma: &Telescope, params: &ElimParams) -> Result<Term, StrictifyError> {
        let ge = self.generic_elim(gamma, params)?;
        let GenericElim { elim, refl1, g } = ge;
        let n1 = elim.delta.len();
        let at_refl = Subst::identity(n1).extended(elim.intro.point.subst(&elim.gamma_map)).extended(refl1);
        let j_at_refl = self.ws.j(&elim)?.subst(&at_refl);
        let jb = self.ws.jbeta(&elim)?;

        let motive1 = elim.motive.subst(&at_refl);
        let target = IdIntro { gamma: elim.delta.clone(), ty: motive1.clone(), point: elim.base.clone() };
        let weak_path = self.ws.id(&target)?;
        let mut q_ctx = elim.delta.clone();
        q_ctx.push(motive1.clone());
        q_ctx.push(weak_path);
        let q = self.strict_id(&q_ctx, &motive1.shift(2), &Term::Var(1), &elim.base.shift(2))?;
        let transport_base = self.strict_refl(&elim.delta, &motive1, &elim.base)?;
        let transport = IdElim {
            intro: target,
            delta: elim.delta.clone(),
            gamma_map: Subst::identity(n1),
            motive: q,
            base: transport_base,
        };
        let t = self.ws.j(&transport)?.subst(&Subst::identity(n1).extended(j_at_refl).extended(jb));
        Ok(t.subst(&g))
    }
}
