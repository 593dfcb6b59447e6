//! First-order unification in unification contexts `Γ.Δ`.
//!
//! Variables of `Γ` are flexible and may be instantiated; variables of the
//! telescope `Δ` are rigid and are preserved by every unifier. A unifier is a
//! substitution `ρ : Ω → Γ` acting on items over `Γ.Δ` through `ρ⁺`.

use std::fmt;

use thiserror::Error;

use crate::signature::Signature;
use crate::syntax::{
    check_subst, check_telescope, check_term, check_type, infer_term, split_by_support, strengthen, support,
    var_at_level, Item, Subst, Telescope, Term, Type, TypeError,
};

/// What a unification problem equates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnifKind {
    /// Two terms of this common type over `Γ.Δ`.
    Term(Type),
    Type,
    /// Two substitutions into this closed telescope.
    Subst(Telescope),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnifProblem {
    pub flexible: Telescope,
    pub rigid: Telescope,
    pub kind: UnifKind,
    pub lhs: Item,
    pub rhs: Item,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProblemError {
    #[error("ill-formed {what}: {source}")]
    IllTyped {
        what: &'static str,
        #[source]
        source: TypeError,
    },
    #[error("{0} does not match the problem kind")]
    KindMismatch(&'static str),
}

impl UnifProblem {
    pub fn ambient(&self) -> Telescope {
        self.flexible.concat(&self.rigid)
    }

    /// Checks that both sides are well typed with the declared classifier.
    pub fn check(&self, sig: &Signature) -> Result<(), ProblemError> {
        let ill = |what| move |source| ProblemError::IllTyped { what, source };
        check_telescope(sig, &Telescope::empty(), &self.flexible).map_err(ill("flexible context"))?;
        check_telescope(sig, &self.flexible, &self.rigid).map_err(ill("rigid telescope"))?;
        let ctx = self.ambient();
        for (what, side) in [("left-hand side", &self.lhs), ("right-hand side", &self.rhs)] {
            match (&self.kind, side) {
                (UnifKind::Term(a), Item::Term(t)) => {
                    check_type(sig, &ctx, a).map_err(ill("term type"))?;
                    check_term(sig, &ctx, t, a).map_err(ill(what))?;
                }
                (UnifKind::Type, Item::Type(t)) => check_type(sig, &ctx, t).map_err(ill(what))?,
                (UnifKind::Subst(xi), Item::Subst(s)) => {
                    check_telescope(sig, &Telescope::empty(), xi).map_err(ill("target telescope"))?;
                    check_subst(sig, &ctx, s, xi).map_err(ill(what))?;
                }
                _ => return Err(ProblemError::KindMismatch(what)),
            }
        }
        Ok(())
    }
}

/// Why no unifier exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    HeadClash,
    Occurs,
    RigidDependency,
    RigidMismatch,
}

impl Reason {
    pub fn code(self) -> &'static str {
        match self {
            Reason::HeadClash => "head-clash",
            Reason::Occurs => "occurs",
            Reason::RigidDependency => "rigid-dependency",
            Reason::RigidMismatch => "rigid-mismatch",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MguResult {
    /// `rho : omega → Γ`.
    Mgu { omega: Telescope, rho: Subst },
    NoUnifier(Reason),
}

impl MguResult {
    pub fn is_unifiable(&self) -> bool {
        matches!(self, MguResult::Mgu { .. })
    }

    pub fn into_result(self) -> Result<(Telescope, Subst), Reason> {
        match self {
            MguResult::Mgu { omega, rho } => Ok((omega, rho)),
            MguResult::NoUnifier(r) => Err(r),
        }
    }
}

/// Result of instantiating one flexible variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instantiation {
    /// `Γ[a := b]`, one entry shorter than `Γ`.
    pub gamma_prime: Telescope,
    /// `Γ[a := b] → Γ`.
    pub rho: Subst,
}

/// Most general unifier of the variable at `level` of `gamma` with `b`, a
/// term over `gamma` of the same type. Fails with [`Reason::Occurs`] when the
/// variable lies in the support of `b`.
pub fn instantiate(gamma: &Telescope, level: usize, b: &Term) -> Result<Instantiation, Reason> {
    let n = gamma.len();
    assert!(level < n, "level {level} out of range for a context of length {n}");
    let supp = support(gamma, &Item::Term(b.clone()));
    if supp.contains(&level) {
        return Err(Reason::Occurs);
    }
    let split = split_by_support(gamma, &supp).expect("support is dependency-closed");
    let re = split.reordering;
    let mut pos = vec![0; n];
    for (j, &l) in re.order.iter().enumerate() {
        pos[l] = j;
    }
    let p = pos[level];

    // `drop(len, count)`: the first `count` components of `Γ[a := b] → Γ'`
    // as terms over the first `len` entries of `Γ[a := b]`.
    let drop = |len: usize, count: usize| -> Subst {
        (0..count)
            .map(|r| {
                if r < p {
                    var_at_level(len, r)
                } else if r == p {
                    b.rename(&|i| Some(len - 1 - pos[n - 1 - i])).expect("total renaming")
                } else {
                    var_at_level(len, r - 1)
                }
            })
            .collect()
    };

    let mut gamma_prime = Telescope::empty();
    for (q, ty) in re.ctx.iter().enumerate() {
        if q < p {
            gamma_prime.push(ty.clone());
        } else if q > p {
            gamma_prime.push(ty.subst(&drop(q - 1, q)));
        }
    }
    let rho = re.fwd.compose(&drop(n - 1, n));
    Ok(Instantiation { gamma_prime, rho })
}

struct State {
    gamma: Telescope,
    delta: Telescope,
}

impl State {
    fn k(&self) -> usize {
        self.delta.len()
    }

    fn apply(&mut self, inst: Instantiation) -> Subst {
        self.delta = self.delta.subst(&inst.rho);
        self.gamma = inst.gamma_prime;
        inst.rho
    }

    /// Returns the unifier found, from the new flexible context to the one
    /// current at the call.
    fn unify_terms(&mut self, s: &Term, t: &Term) -> Result<Subst, Reason> {
        if s == t {
            return Ok(Subst::identity(self.gamma.len()));
        }
        let k = self.k();
        match (s, t) {
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g {
                    return Err(Reason::HeadClash);
                }
                self.unify_seq(xs, ys)
            }
            (Term::Var(i), Term::Var(j)) if *i < k && *j < k => Err(Reason::RigidMismatch),
            (Term::Var(i), Term::App(..)) | (Term::App(..), Term::Var(i)) if *i < k => Err(Reason::RigidMismatch),
            (Term::Var(i), other) if *i >= k => self.flex(*i, other),
            (other, Term::Var(j)) => self.flex(*j, other),
            _ => unreachable!("all term shapes covered"),
        }
    }

    fn flex(&mut self, index: usize, other: &Term) -> Result<Subst, Reason> {
        let k = self.k();
        let n = self.gamma.len();
        let other = match strengthen(&Item::Term(other.clone()), k) {
            Ok(Item::Term(t)) => t,
            Ok(_) => unreachable!("strengthening preserves the item kind"),
            Err(_) => return Err(Reason::RigidDependency),
        };
        let level = n - 1 - (index - k);
        let inst = match other {
            Term::Var(j) => {
                // flex-flex: the later variable is instantiated to the earlier one
                let other_level = n - 1 - j;
                let (hi, lo) = if level > other_level { (level, other_level) } else { (other_level, level) };
                instantiate(&self.gamma, hi, &var_at_level(n, lo))?
            }
            b => instantiate(&self.gamma, level, &b)?,
        };
        Ok(self.apply(inst))
    }

    /// Pairwise unification left to right; each later pair is restricted
    /// along the unifier found so far.
    fn unify_seq(&mut self, xs: &[Term], ys: &[Term]) -> Result<Subst, Reason> {
        debug_assert_eq!(xs.len(), ys.len());
        let k = self.k();
        let mut local = Subst::identity(self.gamma.len());
        for (x, y) in xs.iter().zip(ys) {
            let lifted = local.lift(k);
            let step = self.unify_terms(&x.subst(&lifted), &y.subst(&lifted))?;
            local = local.compose(&step);
        }
        Ok(local)
    }
}

/// First-order matching: finds `σ` from a context of length `src_len` with
/// `pattern ∘ σ = target`, where `pattern` has source length `src_len`.
/// `None` if no such `σ` exists or a source variable is left unconstrained.
pub fn match_subst(pattern: &Subst, target: &Subst, src_len: usize) -> Option<Subst> {
    fn go(p: &Term, t: &Term, a: &mut [Option<Term>]) -> bool {
        match (p, t) {
            (Term::Var(i), _) => match &a[*i] {
                Some(prev) => prev == t,
                None => {
                    a[*i] = Some(t.clone());
                    true
                }
            },
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, a))
            }
            _ => false,
        }
    }
    if pattern.len() != target.len() {
        return None;
    }
    let mut assignment = vec![None; src_len];
    for (p, t) in pattern.terms().iter().zip(target.terms()) {
        if !go(p, t, &mut assignment) {
            return None;
        }
    }
    // index i is the (src_len - 1 - i)-th component
    assignment.into_iter().rev().collect::<Option<Vec<_>>>().map(Subst)
}

/// Most general unifier of a well-formed problem.
pub fn mgu(sig: &Signature, p: &UnifProblem) -> MguResult {
    let result = solve(&p.flexible, &p.rigid, &p.lhs, &p.rhs);
    if cfg!(debug_assertions) {
        if let Ok((omega, rho)) = &result {
            debug_assert!(check_subst(sig, omega, rho, &p.flexible).is_ok(), "mgu produced an ill-typed unifier");
        }
    }
    match result {
        Ok((omega, rho)) => MguResult::Mgu { omega, rho },
        Err(r) => MguResult::NoUnifier(r),
    }
}

fn solve(gamma: &Telescope, delta: &Telescope, lhs: &Item, rhs: &Item) -> Result<(Telescope, Subst), Reason> {
    let mut st = State { gamma: gamma.clone(), delta: delta.clone() };
    let rho = match (lhs, rhs) {
        (Item::Term(s), Item::Term(t)) => st.unify_terms(s, t)?,
        (Item::Type(a), Item::Type(b)) => {
            if a.head != b.head {
                return Err(Reason::HeadClash);
            }
            st.unify_seq(&a.args, &b.args)?
        }
        (Item::Subst(s), Item::Subst(t)) => st.unify_seq(s.terms(), t.terms())?,
        _ => panic!("unification of items of different kinds"),
    };
    Ok((st.gamma, rho))
}

/// Most general unifier of two types over `gamma.delta`.
pub fn mgu_types(gamma: &Telescope, delta: &Telescope, a: &Type, b: &Type) -> MguResult {
    match solve(gamma, delta, &Item::Type(a.clone()), &Item::Type(b.clone())) {
        Ok((omega, rho)) => MguResult::Mgu { omega, rho },
        Err(r) => MguResult::NoUnifier(r),
    }
}

/// Most general unifier of two terms over `gamma.delta` with a common type.
pub fn mgu_terms(gamma: &Telescope, delta: &Telescope, a: &Term, b: &Term) -> MguResult {
    match solve(gamma, delta, &Item::Term(a.clone()), &Item::Term(b.clone())) {
        Ok((omega, rho)) => MguResult::Mgu { omega, rho },
        Err(r) => MguResult::NoUnifier(r),
    }
}

/// Infers the classifier of `lhs` and builds the corresponding problem.
pub fn term_problem(
    sig: &Signature,
    flexible: Telescope,
    rigid: Telescope,
    lhs: Term,
    rhs: Term,
) -> Result<UnifProblem, TypeError> {
    let ty = infer_term(sig, &flexible.concat(&rigid), &lhs)?;
    Ok(UnifProblem { flexible, rigid, kind: UnifKind::Term(ty), lhs: Item::Term(lhs), rhs: Item::Term(rhs) })
}
