//! Seeded generators of small signatures, well-typed syntax and problems.
//!
//! Sampling draws from the oracle's exhaustive enumerations, so everything
//! produced is well typed by construction and reproducible from the seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::generalize::{GenItem, GenProblem};
use crate::oracle::{enumerate_terms, enumerate_types, EnumBudget};
use crate::signature::{load_signature, Signature};
use crate::syntax::{check_type, infer_term, Item, Subst, Telescope, Term, Type};
use crate::unify::{UnifKind, UnifProblem};

/// Declaration templates in dependency order: `(needs, probability, text)`.
const TEMPLATES: &[(&str, f64, &str)] = &[
    ("", 1.0, "sort X"),
    ("", 0.6, "sort Y (x : X)"),
    ("", 0.25, "sort Z"),
    ("", 0.5, "fun c : X"),
    ("", 1.0, "fun f (x : X) : X"),
    ("", 0.5, "fun p (x : X) (y : X) : X"),
    ("Y", 0.5, "fun s (x : X) : Y x"),
    ("Y", 0.4, "fun g (x : X) (y : Y x) : X"),
    ("Y", 0.4, "fun h (x : X) (y : Y x) : Y (f x)"),
    ("Y", 0.3, "fun k (x : X) : Y (f x)"),
    ("Z", 0.7, "fun z : Z"),
    ("Z", 0.5, "fun m (w : Z) (x : X) : X"),
    ("Z", 0.4, "fun e (x : X) : Z"),
];

/// At most this many declarations per random signature.
pub const MAX_DECLS: usize = 8;

#[derive(Debug, Clone)]
pub struct Generator {
    rng: ChaCha8Rng,
    /// Depth used for sampled terms and context entries.
    pub depth: usize,
}

impl Generator {
    pub fn new(seed: u64) -> Generator {
        Generator { rng: ChaCha8Rng::seed_from_u64(seed), depth: 3 }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn budget(depth: usize) -> EnumBudget {
        EnumBudget::new(depth.max(1), 1, 200_000).expect("positive budget")
    }

    /// A small signature of at most [`MAX_DECLS`] declarations.
    pub fn signature(&mut self) -> Signature {
        let mut lines: Vec<&str> = Vec::new();
        let mut sorts = vec![""];
        for &(needs, prob, text) in TEMPLATES {
            if lines.len() == MAX_DECLS || !sorts.contains(&needs) || !self.rng.gen_bool(prob) {
                continue;
            }
            if let Some(name) = text.strip_prefix("sort ") {
                sorts.push(&name[..1]);
            }
            lines.push(text);
        }
        load_signature(&lines.join("\n")).expect("templates form a valid signature")
    }

    /// A term of `ty` over `ctx` of depth at most `depth`, with shallow terms
    /// as likely as deep ones.
    pub fn term(&mut self, sig: &Signature, ctx: &Telescope, ty: &Type, depth: usize) -> Option<Term> {
        let d = self.rng.gen_range(1..=depth.max(1));
        let mut terms = enumerate_terms(sig, ctx, ty, &Self::budget(d)).ok()?;
        if terms.is_empty() {
            terms = enumerate_terms(sig, ctx, ty, &Self::budget(depth)).ok()?;
        }
        terms.choose(&mut self.rng).cloned()
    }

    /// A type over `ctx` of depth at most `depth`.
    pub fn ty(&mut self, sig: &Signature, ctx: &Telescope, depth: usize) -> Type {
        let d = self.rng.gen_range(1..=depth.max(1));
        let types = enumerate_types(sig, ctx, &Self::budget(d)).expect("small signatures");
        types.choose(&mut self.rng).cloned().expect("every signature declares X")
    }

    /// An inhabited type over `ctx` together with one of its terms.
    pub fn typed_term(&mut self, sig: &Signature, ctx: &Telescope) -> Option<(Type, Term)> {
        for _ in 0..8 {
            let ty = self.ty(sig, ctx, 2);
            if let Some(t) = self.term(sig, ctx, &ty, self.depth) {
                return Some((ty, t));
            }
        }
        None
    }

    /// A telescope of length `len` over `over`, with shallow entries.
    pub fn telescope(&mut self, sig: &Signature, over: &Telescope, len: usize) -> Telescope {
        let mut tel = Telescope::empty();
        for _ in 0..len {
            let ty = self.ty(sig, &over.concat(&tel), 2);
            tel.push(ty);
        }
        tel
    }

    /// A substitution `from → to`, or `None` when some entry of `to` has no
    /// inhabitant over `from` within the depth.
    pub fn subst(&mut self, sig: &Signature, from: &Telescope, to: &Telescope, depth: usize) -> Option<Subst> {
        let mut s = Subst::empty();
        for ty in to.iter() {
            let t = self.term(sig, from, &ty.subst(&s), depth)?;
            s.push(t);
        }
        Some(s)
    }

    /// A random source context `Λ` of length at most `max_len` and a
    /// substitution `Λ → to`.
    pub fn probe(&mut self, sig: &Signature, to: &Telescope, max_len: usize) -> Option<(Telescope, Subst)> {
        for _ in 0..16 {
            let len = self.rng.gen_range(0..=max_len);
            let lambda = self.telescope(sig, &Telescope::empty(), len);
            if let Some(s) = self.subst(sig, &lambda, to, self.depth) {
                return Some((lambda, s));
            }
        }
        None
    }

    /// Replaces random subterms of `t` over `ctx` by flexible variables of
    /// the same type (the first `flex` entries of `ctx`) or by fresh random
    /// terms.
    fn perturb(&mut self, sig: &Signature, ctx: &Telescope, flex: usize, t: &Term) -> Term {
        if self.rng.gen_bool(0.3) {
            let ty = infer_term(sig, ctx, t).expect("well-typed input");
            let n = ctx.len();
            let vars: Vec<Term> = (n - flex..n)
                .filter(|&i| ctx.var_type(i).as_ref() == Some(&ty))
                .map(Term::Var)
                .collect();
            if !vars.is_empty() && self.rng.gen_bool(0.6) {
                return vars.choose(&mut self.rng).cloned().expect("nonempty");
            }
            if let Some(fresh) = self.term(sig, ctx, &ty, 2) {
                return fresh;
            }
        }
        match t {
            Term::Var(i) => Term::Var(*i),
            Term::App(f, args) => {
                // perturbing an argument may change later argument types, so
                // only non-dependent positions are touched
                let decl = sig.decl(*f);
                let independent = |j: usize| {
                    (j + 1..decl.boundary.len()).all(|k| !decl.boundary.0[k].occurs(k - 1 - j))
                        && decl.output.as_ref().is_none_or(|o| !o.occurs(decl.boundary.len() - 1 - j))
                };
                let new = args
                    .iter()
                    .enumerate()
                    .map(|(j, a)| if independent(j) { self.perturb(sig, ctx, flex, a) } else { a.clone() })
                    .collect();
                Term::App(*f, new)
            }
        }
    }

    /// A well-typed unification problem: mostly term pairs where one side
    /// is a perturbation of the other, plus independent pairs, type pairs
    /// and substitution pairs.
    pub fn unify_problem(&mut self, sig: &Signature) -> Option<UnifProblem> {
        let flex_len = self.rng.gen_range(1..=3);
        let flexible = self.telescope(sig, &Telescope::empty(), flex_len);
        let rigid_len = usize::from(self.rng.gen_bool(0.3));
        let rigid = self.telescope(sig, &flexible, rigid_len);
        let ctx = flexible.concat(&rigid);
        let roll = self.rng.gen_range(0..20);
        let (kind, lhs, rhs) = if roll < 15 {
            let (ty, lhs) = self.typed_term(sig, &ctx)?;
            let rhs = if roll < 4 {
                self.term(sig, &ctx, &ty, self.depth)?
            } else {
                let mut r = self.perturb(sig, &ctx, flex_len, &lhs);
                if self.rng.gen_bool(0.5) {
                    r = self.perturb(sig, &ctx, flex_len, &r);
                }
                r
            };
            let (lhs, rhs) = if self.rng.gen_bool(0.5) { (lhs, rhs) } else { (rhs, lhs) };
            (UnifKind::Term(ty), Item::Term(lhs), Item::Term(rhs))
        } else if roll < 18 {
            let a = self.ty(sig, &ctx, 3);
            let args: Vec<Term> = a.args.iter().map(|t| self.perturb(sig, &ctx, flex_len, t)).collect();
            let b = Type::new(a.head, args);
            if check_type(sig, &ctx, &b).is_ok() {
                (UnifKind::Type, Item::Type(a), Item::Type(b))
            } else {
                return None;
            }
        } else {
            let xi_len = self.rng.gen_range(1..=2);
            let xi = self.telescope(sig, &Telescope::empty(), xi_len);
            let l = self.subst(sig, &ctx, &xi, 2)?;
            let r = self.subst(sig, &ctx, &xi, 2)?;
            (UnifKind::Subst(xi), Item::Subst(l), Item::Subst(r))
        };
        let p = UnifProblem { flexible, rigid, kind, lhs, rhs };
        p.check(sig).ok()?;
        Some(p)
    }

    /// A well-typed generalization problem of random kind.
    pub fn gen_problem(&mut self, sig: &Signature) -> Option<GenProblem> {
        let omega_len = self.rng.gen_range(0..=1);
        let omega = self.telescope(sig, &Telescope::empty(), omega_len);
        let delta_len = self.rng.gen_range(0..=1);
        let delta = self.telescope(sig, &omega, delta_len);
        let gamma_len = self.rng.gen_range(1..=3);
        let gamma = self.telescope(sig, &Telescope::empty(), gamma_len);
        let rho = self.subst(sig, &gamma, &omega, 2)?;
        let ctx = gamma.concat(&delta.subst(&rho));
        let roll = self.rng.gen_range(0..10);
        let item = if roll < 5 {
            GenItem::Type(self.ty(sig, &ctx, 3))
        } else if roll < 9 {
            let outer = omega.concat(&delta);
            let mut found = None;
            for _ in 0..8 {
                let ty = self.ty(sig, &outer, 2);
                let at = ty.subst(&rho.lift(delta.len()));
                if let Some(value) = self.term(sig, &ctx, &at, self.depth) {
                    found = Some(GenItem::Term { ty, value });
                    break;
                }
            }
            found?
        } else {
            let target_len = self.rng.gen_range(1..=2);
            let target = self.telescope(sig, &Telescope::empty(), target_len);
            let value = self.subst(sig, &ctx, &target, self.depth)?;
            GenItem::Subst { target, value }
        };
        let p = GenProblem { omega, delta, gamma, rho, item };
        p.check(sig).ok()?;
        Some(p)
    }

    /// A term problem whose item is a flexible variable, with a restriction
    /// that sends that variable to an application: the case where naturality
    /// relies on the strengthening step firing on both sides.
    pub fn variable_case(&mut self, sig: &Signature) -> Option<(GenProblem, Telescope, Subst)> {
        let omega_len = self.rng.gen_range(0..=1);
        let omega = self.telescope(sig, &Telescope::empty(), omega_len);
        let delta_len = self.rng.gen_range(0..=1);
        let delta = self.telescope(sig, &omega, delta_len);
        let gamma_len = self.rng.gen_range(1..=3);
        let gamma = self.telescope(sig, &Telescope::empty(), gamma_len);
        let rho = self.subst(sig, &gamma, &omega, 2)?;
        let k = delta.len();
        // a variable of Γ whose type is closed, so it can be classified by a
        // type over Ω.Δ
        let closed: Vec<usize> = (0..gamma.len()).filter(|&i| gamma.var_type(i).is_some_and(|t| t.args.is_empty())).collect();
        let &i = closed.choose(&mut self.rng)?;
        let ty = gamma.var_type(i).expect("in range");
        let item = GenItem::Term { ty: ty.clone(), value: Term::Var(i + k) };
        let p = GenProblem { omega, delta, gamma, rho, item };
        p.check(sig).ok()?;
        for _ in 0..16 {
            let (lambda, sigma) = self.probe(sig, &p.gamma, 2)?;
            if matches!(sigma.0[p.gamma.len() - 1 - i], Term::App(..)) {
                return Some((p, lambda, sigma));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::validate_signature;

    #[test]
    fn signatures_are_small_and_valid() {
        let mut g = Generator::new(1);
        for _ in 0..50 {
            let sig = g.signature();
            assert!(sig.len() <= MAX_DECLS);
            validate_signature(&sig).unwrap();
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let run = |seed| {
            let mut g = Generator::new(seed);
            let sig = g.signature();
            (0..10).map(|_| g.unify_problem(&sig)).collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
    }

    #[test]
    fn problems_are_well_typed() {
        let mut g = Generator::new(2);
        let mut made = (0, 0, 0);
        for _ in 0..10 {
            let sig = g.signature();
            for _ in 0..10 {
                if let Some(p) = g.unify_problem(&sig) {
                    p.check(&sig).unwrap();
                    made.0 += 1;
                }
                if let Some(p) = g.gen_problem(&sig) {
                    p.check(&sig).unwrap();
                    made.1 += 1;
                }
                if let Some((p, lambda, sigma)) = g.variable_case(&sig) {
                    crate::syntax::check_subst(&sig, &lambda, &sigma, &p.gamma).unwrap();
                    made.2 += 1;
                }
            }
        }
        assert!(made.0 > 50 && made.1 > 50 && made.2 > 20, "{made:?}");
    }
}
