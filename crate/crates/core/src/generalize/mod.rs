//! Most general generalizations over free theories.
//!
//! Given `ρ : Γ → Ω`, a telescope `Δ` over `Ω` and an item over `Γ.Δ[ρ]`,
//! [`mgg`] finds a generic context `Γ0` with `ρ0 : Γ0 → Ω`, a most general
//! item over `Γ0.Δ[ρ0]`, and the factor `f : Γ → Γ0` through which the
//! input is recovered: `ρ = ρ0 ∘ f` and `item = item0[f⁺]`.

mod polysort;

pub use polysort::{mgg_polysort, BasicSort, Elem, MonoSort, PolyFold, PolyGeneralization, PolySort};

use thiserror::Error;

use crate::signature::Signature;
use crate::syntax::{
    check_subst, check_telescope, check_term, check_type, strengthen, Item, Subst, Telescope, Term, Type,
    TypeError,
};
use crate::unify::{match_subst, mgu_types};

/// The item to generalize, over `Γ.Δ[ρ]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenItem {
    /// A substitution into the closed telescope `target`.
    Subst { target: Telescope, value: Subst },
    Type(Type),
    /// A term of type `ty[ρ⁺]`, where `ty` lives over `Ω.Δ`.
    Term { ty: Type, value: Term },
}

impl GenItem {
    pub fn item(&self) -> Item {
        match self {
            GenItem::Subst { value, .. } => Item::Subst(value.clone()),
            GenItem::Type(t) => Item::Type(t.clone()),
            GenItem::Term { value, .. } => Item::Term(value.clone()),
        }
    }

    /// Restriction of the item along `s` (which must already be lifted
    /// past `Δ`); the classifier is left unchanged.
    pub fn restrict(&self, s: &Subst) -> GenItem {
        match self {
            GenItem::Subst { target, value } => GenItem::Subst { target: target.clone(), value: value.compose(s) },
            GenItem::Type(t) => GenItem::Type(t.subst(s)),
            GenItem::Term { ty, value } => GenItem::Term { ty: ty.clone(), value: value.subst(s) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenProblem {
    pub omega: Telescope,
    /// Telescope over `omega`.
    pub delta: Telescope,
    pub gamma: Telescope,
    /// `gamma → omega`.
    pub rho: Subst,
    pub item: GenItem,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("ill-formed {what}: {source}")]
pub struct GenProblemError {
    pub what: &'static str,
    #[source]
    pub source: TypeError,
}

impl GenProblem {
    /// `Γ.Δ[ρ]`, the context the item lives in.
    pub fn ambient(&self) -> Telescope {
        self.gamma.concat(&self.delta.subst(&self.rho))
    }

    pub fn check(&self, sig: &Signature) -> Result<(), GenProblemError> {
        let ill = |what| move |source| GenProblemError { what, source };
        let empty = Telescope::empty();
        check_telescope(sig, &empty, &self.omega).map_err(ill("omega"))?;
        check_telescope(sig, &self.omega, &self.delta).map_err(ill("delta"))?;
        check_telescope(sig, &empty, &self.gamma).map_err(ill("gamma"))?;
        check_subst(sig, &self.gamma, &self.rho, &self.omega).map_err(ill("rho"))?;
        let ctx = self.ambient();
        match &self.item {
            GenItem::Subst { target, value } => {
                check_telescope(sig, &empty, target).map_err(ill("target telescope"))?;
                check_subst(sig, &ctx, value, target).map_err(ill("item"))
            }
            GenItem::Type(t) => check_type(sig, &ctx, t).map_err(ill("item")),
            GenItem::Term { ty, value } => {
                check_type(sig, &self.omega.concat(&self.delta), ty).map_err(ill("item type"))?;
                let expected = ty.subst(&self.rho.lift(self.delta.len()));
                check_term(sig, &ctx, value, &expected).map_err(ill("item"))
            }
        }
    }

    /// The same problem restricted along `sigma : lambda → Γ`.
    pub fn restrict(&self, lambda: &Telescope, sigma: &Subst) -> GenProblem {
        GenProblem {
            omega: self.omega.clone(),
            delta: self.delta.clone(),
            gamma: lambda.clone(),
            rho: self.rho.compose(sigma),
            item: self.item.restrict(&sigma.lift(self.delta.len())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizationResult {
    pub gamma0: Telescope,
    /// `gamma0 → Ω`.
    pub rho0: Subst,
    /// Over `gamma0.Δ[rho0]`.
    pub item0: Item,
    /// `Γ → gamma0`.
    pub factor: Subst,
}

impl GeneralizationResult {
    /// Whether `ρ = ρ0 ∘ factor` and `item = item0[factor⁺]`.
    pub fn factors(&self, p: &GenProblem) -> bool {
        self.rho0.compose(&self.factor) == p.rho
            && self.item0.subst(&self.factor.lift(p.delta.len())) == p.item.item()
    }
}

/// Accumulated generic data of a partial generalization.
struct Gen<T> {
    gamma0: Telescope,
    rho0: Subst,
    item0: T,
    factor: Subst,
}

/// Shared parameters: `Ω`, `Δ` and the original `Γ`.
struct Ctx<'a> {
    sig: &'a Signature,
    omega: &'a Telescope,
    delta: &'a Telescope,
}

impl Ctx<'_> {
    fn k(&self) -> usize {
        self.delta.len()
    }

    fn term(&self, rho: &Subst, ty: &Type, a: &Term) -> Gen<Term> {
        let k = self.k();
        let n = self.omega.len();

        // Terms that do not mention Δ become one fresh flexible variable.
        // This case must come first.
        if let Ok(Item::Term(a_strong)) = strengthen(&Item::Term(a.clone()), k) {
            let Ok(Item::Type(ty_strong)) = strengthen(&Item::Type(ty.clone()), k) else {
                panic!("a term free of rigid variables has a type free of them");
            };
            return Gen {
                gamma0: self.omega.extended(ty_strong),
                rho0: Subst::weakening(n, 1),
                item0: Term::Var(k),
                factor: rho.extended(a_strong),
            };
        }

        match a {
            Term::Var(i) => {
                debug_assert!(*i < k, "flexible variables are handled by strengthening");
                let actual = self
                    .omega
                    .concat(self.delta)
                    .var_type(*i)
                    .expect("variable in range");
                if &actual == ty {
                    return Gen {
                        gamma0: self.omega.clone(),
                        rho0: Subst::identity(n),
                        item0: a.clone(),
                        factor: rho.clone(),
                    };
                }
                // The ambient type may be more general than the rigid
                // variable's own type; they are unified by ρ, so repair with
                // their most general unifier.
                let (omega1, rho1) = mgu_types(self.omega, self.delta, ty, &actual)
                    .into_result()
                    .expect("ρ unifies the ambient type with the variable's type");
                let factor = match_subst(&rho1, rho, omega1.len()).expect("ρ factors through the mgu");
                Gen { gamma0: omega1, rho0: rho1, item0: a.clone(), factor }
            }
            Term::App(f, args) => {
                let decl = self.sig.decl(*f);
                let g0 = self.seq(rho, &decl.boundary, args);
                let out = decl.output.as_ref().expect("term-former has an output type");
                let delta0 = self.delta.subst(&g0.rho0);
                let lhs = ty.subst(&g0.rho0.lift(k));
                let rhs = out.subst(&g0.item0);
                if lhs == rhs {
                    return Gen {
                        gamma0: g0.gamma0,
                        rho0: g0.rho0,
                        item0: Term::App(*f, g0.item0.0),
                        factor: g0.factor,
                    };
                }
                let (gamma1, rho1) = mgu_types(&g0.gamma0, &delta0, &lhs, &rhs)
                    .into_result()
                    .expect("the factor unifies the ambient and output types");
                let factor = match_subst(&rho1, &g0.factor, gamma1.len()).expect("factor goes through the mgu");
                let args0 = g0.item0.compose(&rho1.lift(k));
                Gen { gamma0: gamma1, rho0: g0.rho0.compose(&rho1), item0: Term::App(*f, args0.0), factor }
            }
        }
    }

    /// Generalizes a substitution into the closed telescope `target`,
    /// component by component.
    fn seq(&self, rho: &Subst, target: &Telescope, terms: &[Term]) -> Gen<Subst> {
        let k = self.k();
        let mut acc = Gen {
            gamma0: self.omega.clone(),
            rho0: Subst::identity(self.omega.len()),
            item0: Subst::empty(),
            factor: rho.clone(),
        };
        for (b, t) in target.iter().zip(terms) {
            let ambient = b.subst(&acc.item0);
            let delta_c = self.delta.subst(&acc.rho0);
            let sub = Ctx { sig: self.sig, omega: &acc.gamma0, delta: &delta_c };
            let step = sub.term(&acc.factor, &ambient, t);
            let mut item0 = acc.item0.compose(&step.rho0.lift(k));
            item0.push(step.item0);
            acc = Gen {
                gamma0: step.gamma0,
                rho0: acc.rho0.compose(&step.rho0),
                item0,
                factor: step.factor,
            };
        }
        acc
    }

    fn ty(&self, rho: &Subst, ty: &Type) -> Gen<Type> {
        let boundary = &self.sig.decl(ty.head).boundary;
        let g = self.seq(rho, boundary, &ty.args);
        Gen { gamma0: g.gamma0, rho0: g.rho0, item0: Type::new(ty.head, g.item0.0), factor: g.factor }
    }
}

/// Most general generalization of a well-formed problem.
pub fn mgg(sig: &Signature, p: &GenProblem) -> GeneralizationResult {
    let cx = Ctx { sig, omega: &p.omega, delta: &p.delta };
    let (gamma0, rho0, item0, factor) = match &p.item {
        GenItem::Subst { target, value } => {
            let g = cx.seq(&p.rho, target, value.terms());
            (g.gamma0, g.rho0, Item::Subst(g.item0), g.factor)
        }
        GenItem::Type(t) => {
            let g = cx.ty(&p.rho, t);
            (g.gamma0, g.rho0, Item::Type(g.item0), g.factor)
        }
        GenItem::Term { ty, value } => {
            let g = cx.term(&p.rho, ty, value);
            (g.gamma0, g.rho0, Item::Term(g.item0), g.factor)
        }
    };
    GeneralizationResult { gamma0, rho0, item0, factor }
}

/// Generalizes a term-family over `Ω.Δ`-indexed type `ty`; convenience
/// used by the polynomial fold.
pub(crate) fn mgg_term(
    sig: &Signature,
    omega: &Telescope,
    delta: &Telescope,
    rho: &Subst,
    ty: &Type,
    value: &Term,
) -> (Telescope, Subst, Term, Subst) {
    let g = Ctx { sig, omega, delta }.term(rho, ty, value);
    (g.gamma0, g.rho0, g.item0, g.factor)
}

pub(crate) fn mgg_type(
    sig: &Signature,
    omega: &Telescope,
    delta: &Telescope,
    rho: &Subst,
    ty: &Type,
) -> (Telescope, Subst, Type, Subst) {
    let g = Ctx { sig, omega, delta }.ty(rho, ty);
    (g.gamma0, g.rho0, g.item0, g.factor)
}

/// Outcome of comparing a generalization with that of a restricted problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaturalityReport {
    pub same_generic_data: bool,
    pub factor_commutes: bool,
}

impl NaturalityReport {
    pub fn holds(&self) -> bool {
        self.same_generic_data && self.factor_commutes
    }
}

/// Compares `mgg(p)` with `mgg(p[σ])` for `sigma : lambda → Γ`.
pub fn naturality_report(sig: &Signature, p: &GenProblem, lambda: &Telescope, sigma: &Subst) -> NaturalityReport {
    let base = mgg(sig, p);
    let restricted = mgg(sig, &p.restrict(lambda, sigma));
    NaturalityReport {
        same_generic_data: base.gamma0 == restricted.gamma0
            && base.rho0 == restricted.rho0
            && base.item0 == restricted.item0,
        factor_commutes: restricted.factor == base.factor.compose(sigma),
    }
}

/// Whether generalization commutes with restriction along `sigma`.
pub fn mgg_natural_check(sig: &Signature, p: &GenProblem, lambda: &Telescope, sigma: &Subst) -> bool {
    naturality_report(sig, p, lambda, sigma).holds()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::load_signature;
    use crate::syntax::{read_subst, read_telescope, read_type, Names, Printer, Scope};

    const SIG: &str = "sort X\nsort Y (x : X)\nfun f1 (x : X) : X\nfun f2 (x : X) (y : X) : X\nfun g (x : X) (y : Y x) : X\nfun h (x : X) (y : Y x) : Y (f1 x)";

    struct Case {
        sig: Signature,
        p: GenProblem,
    }

    /// Builds a type-generalization problem from its textual pieces.
    fn type_case(omega: &str, delta: &str, gamma: &str, rho: &str, item: &str) -> Case {
        let sig = load_signature(SIG).unwrap();
        let mut so = Scope::new();
        let omega_t = read_telescope(&sig, &mut so, omega).unwrap();
        let mut sd = so.clone();
        let delta_t = read_telescope(&sig, &mut sd, delta).unwrap();
        let mut sg = Scope::new();
        let gamma_t = read_telescope(&sig, &mut sg, gamma).unwrap();
        let rho_s = read_subst(&sig, &sg, rho).unwrap();
        let mut full = sg.clone();
        for name in &sd.names()[so.len()..] {
            full.push(name.clone());
        }
        let ty = read_type(&sig, &full, item).unwrap();
        let p = GenProblem { omega: omega_t, delta: delta_t, gamma: gamma_t, rho: rho_s, item: GenItem::Type(ty) };
        p.check(&sig).unwrap();
        Case { sig, p }
    }

    fn render(sig: &Signature, p: &GenProblem, r: &GeneralizationResult) -> (String, String, String, String) {
        let pr = Printer::new(sig);
        let (ctx, _) = pr.telescope(&Names::new(), &r.gamma0);
        let g0 = Names::canonical(r.gamma0.len());
        let (_, ext) = pr.telescope(&g0, &p.delta.subst(&r.rho0));
        let item = match &r.item0 {
            Item::Type(t) => pr.ty(&ext, t),
            Item::Term(t) => pr.term(&ext, t),
            Item::Subst(s) => pr.subst(&ext, s),
        };
        (ctx, pr.subst(&g0, &r.rho0), item, pr.subst(&Names::canonical(p.gamma.len()), &r.factor))
    }

    fn run(c: &Case) -> (String, String, String, String) {
        let r = mgg(&c.sig, &c.p);
        assert!(r.factors(&c.p));
        render(&c.sig, &c.p, &r)
    }

    #[test]
    fn closed_subterm_is_abstracted() {
        let c = type_case("()", "()", "(x : X)", "[]", "Y (f1 x)");
        assert_eq!(run(&c), ("(v0 : X)".into(), "[]".into(), "Y v0".into(), "[f1 v0]".into()));
    }

    #[test]
    fn rigid_structure_is_kept() {
        let c = type_case("()", "(xr : X)", "()", "[]", "Y (f1 xr)");
        assert_eq!(run(&c), ("()".into(), "[]".into(), "Y (f1 v0)".into(), "[]".into()));
    }

    #[test]
    fn mixed_arguments() {
        let c = type_case("()", "(yr : X)", "(x : X)", "[]", "Y (f2 (f1 x) (f1 yr))");
        assert_eq!(run(&c), ("(v0 : X)".into(), "[]".into(), "Y (f2 v0 (f1 v1))".into(), "[f1 v0]".into()));
    }

    #[test]
    fn rigid_variable_type_is_repaired() {
        let c = type_case("(w : X)", "(yr : Y w)", "(x : X)", "[f1 x]", "Y (g (f1 x) yr)");
        assert_eq!(run(&c), ("(v0 : X)".into(), "[v0]".into(), "Y (g v0 v1)".into(), "[f1 v0]".into()));
    }

    #[test]
    fn typing_constraints_block_pruning() {
        let c = type_case("(w : X)", "(yr : Y w)", "(x : X)", "[x]", "Y (g (f1 x) (h x yr))");
        assert_eq!(run(&c), ("(v0 : X)".into(), "[v0]".into(), "Y (g (f1 v0) (h v0 v1))".into(), "[v0]".into()));
    }

    #[test]
    fn restriction_commutes() {
        let c = type_case("()", "()", "(x : X)", "[]", "Y (f1 x)");
        let mut s = Scope::new();
        let lambda = read_telescope(&c.sig, &mut s, "(u : X) (v : X)").unwrap();
        let sigma = read_subst(&c.sig, &s, "[f2 u v]").unwrap();
        assert!(mgg_natural_check(&c.sig, &c.p, &lambda, &sigma));
        assert!(mgg_natural_check(&c.sig, &c.p, &c.p.gamma, &Subst::identity(1)));
    }

    #[test]
    fn variable_term_stays_natural() {
        let sig = load_signature(SIG).unwrap();
        let x = sig.id_of("X").unwrap();
        let p = GenProblem {
            omega: Telescope::empty(),
            delta: Telescope::empty(),
            gamma: Telescope(vec![Type::new(x, vec![])]),
            rho: Subst::empty(),
            item: GenItem::Term { ty: Type::new(x, vec![]), value: Term::Var(0) },
        };
        let mut s = Scope::new();
        let lambda = read_telescope(&sig, &mut s, "(u : X)").unwrap();
        let sigma = read_subst(&sig, &s, "[f1 u]").unwrap();
        assert!(mgg_natural_check(&sig, &p, &lambda, &sigma));
        let r = mgg(&sig, &p);
        assert_eq!(r.item0, Item::Term(Term::Var(0)));
    }

    #[test]
    fn generalizing_a_generic_item_is_idempotent() {
        let c = type_case("(w : X)", "(yr : Y w)", "(x : X)", "[f1 x]", "Y (g (f1 x) yr)");
        let r = mgg(&c.sig, &c.p);
        let again = GenProblem {
            omega: c.p.omega.clone(),
            delta: c.p.delta.clone(),
            gamma: r.gamma0.clone(),
            rho: r.rho0.clone(),
            item: match &r.item0 {
                Item::Type(t) => GenItem::Type(t.clone()),
                _ => unreachable!(),
            },
        };
        let r2 = mgg(&c.sig, &again);
        assert_eq!(r2.gamma0, r.gamma0);
        assert!(r2.factor.is_identity());
    }

    #[test]
    fn substitution_items_fold_left_to_right() {
        let sig = load_signature(SIG).unwrap();
        let mut s = Scope::new();
        let target = read_telescope(&sig, &mut Scope::new(), "(a : X) (b : Y a)").unwrap();
        let gamma = read_telescope(&sig, &mut s, "(x : X) (y : Y (f1 x))").unwrap();
        let value = read_subst(&sig, &s, "[f1 x, y]").unwrap();
        let p = GenProblem {
            omega: Telescope::empty(),
            delta: Telescope::empty(),
            gamma,
            rho: Subst::empty(),
            item: GenItem::Subst { target, value },
        };
        p.check(&sig).unwrap();
        let r = mgg(&sig, &p);
        assert!(r.factors(&p));
        assert_eq!(render(&sig, &p, &r).0, "(v0 : X) (v1 : Y v0)");
    }
}
