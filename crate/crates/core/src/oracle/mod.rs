//! Bounded brute-force oracle for the universal properties of most general
//! unifiers and most general generalizations.
//!
//! Everything here is exhaustive within an [`EnumBudget`] and deterministic:
//! variables come before applications, declarations are visited in order and
//! arguments left to right. A [`Certificate`] only speaks for the budget it
//! echoes; a [`CounterExample`] is a genuine violation.

mod enumerate;

use std::fmt;

use thiserror::Error;

use crate::generalize::{mgg, GenProblem, GeneralizationResult};
use crate::signature::Signature;
use crate::syntax::{check_subst, Names, Printer, Subst, Telescope, Term, Type, TypeError};
use crate::unify::{MguResult, UnifProblem};

use enumerate::{contexts, guide, item_pairs, search_substs, Choice, TermSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("budget field `{0}` must be positive")]
pub struct BudgetError(pub &'static str);

/// Bounds of an enumeration. Term depth counts variables and constants as
/// depth 1; types count their head as one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnumBudget {
    max_term_depth: usize,
    max_context_len: usize,
    max_results: usize,
}

impl EnumBudget {
    pub fn new(max_term_depth: usize, max_context_len: usize, max_results: usize) -> Result<EnumBudget, BudgetError> {
        for (name, v) in
            [("max_term_depth", max_term_depth), ("max_context_len", max_context_len), ("max_results", max_results)]
        {
            if v == 0 {
                return Err(BudgetError(name));
            }
        }
        Ok(EnumBudget { max_term_depth, max_context_len, max_results })
    }

    pub fn max_term_depth(&self) -> usize {
        self.max_term_depth
    }

    pub fn max_context_len(&self) -> usize {
        self.max_context_len
    }

    pub fn max_results(&self) -> usize {
        self.max_results
    }
}

impl Default for EnumBudget {
    fn default() -> Self {
        EnumBudget { max_term_depth: 3, max_context_len: 3, max_results: 100_000 }
    }
}

impl fmt::Display for EnumBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "depth={} ctx-len={} max={}", self.max_term_depth, self.max_context_len, self.max_results)
    }
}

/// An enumeration outgrew `max_results`; no verdict can be given.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("budget exhausted: more than {limit} {what}")]
pub struct Exhausted {
    pub what: String,
    pub limit: usize,
}

/// Terms of type `ty` over `ctx` up to the budget's depth.
pub fn enumerate_terms(sig: &Signature, ctx: &Telescope, ty: &Type, budget: &EnumBudget) -> Result<Vec<Term>, Exhausted> {
    let mut space = TermSpace::new(sig, ctx, budget.max_results);
    Ok(space.terms(ty, budget.max_term_depth)?.as_ref().clone())
}

/// Types over `ctx` up to the budget's depth.
pub fn enumerate_types(sig: &Signature, ctx: &Telescope, budget: &EnumBudget) -> Result<Vec<Type>, Exhausted> {
    let mut space = TermSpace::new(sig, ctx, budget.max_results);
    Ok(space.types(budget.max_term_depth)?.as_ref().clone())
}

/// Closed contexts up to the budget's length, including the empty one.
pub fn enumerate_contexts(sig: &Signature, budget: &EnumBudget) -> Result<Vec<Telescope>, Exhausted> {
    contexts(sig, budget.max_context_len, budget.max_term_depth, budget.max_results)
}

/// All substitutions `from → to` within the budget's depth.
pub fn enumerate_substs(
    sig: &Signature,
    from: &Telescope,
    to: &Telescope,
    budget: &EnumBudget,
) -> Result<Vec<Subst>, Exhausted> {
    let mut space = TermSpace::new(sig, from, budget.max_results);
    let mut out = Vec::new();
    let limit = budget.max_results;
    let mut overflow = false;
    search_substs(&mut space, to, budget.max_term_depth, &mut |_, _| Choice::Any, &mut |s| {
        out.push(s);
        overflow = out.len() > limit;
        !overflow
    })?;
    if overflow {
        return Err(Exhausted { what: "substitutions".to_string(), limit });
    }
    Ok(out)
}

/// A unifier `sigma : theta → Γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unifier {
    pub theta: Telescope,
    pub sigma: Subst,
}

fn unifies(p: &UnifProblem, sigma: &Subst) -> bool {
    let s = sigma.lift(p.rigid.len());
    p.lhs.subst(&s) == p.rhs.subst(&s)
}

/// Search guidance for component `j` of a partial unifier.
fn unifier_guide(p: &UnifProblem, partial: &Subst, j: usize) -> Choice {
    let k = p.rigid.len();
    let s = partial.lift(k);
    let (l, r) = (p.lhs.subst(&s), p.rhs.subst(&s));
    match item_pairs(&l, &r) {
        Some(pairs) => guide(&pairs, j, k),
        None => Choice::Nothing,
    }
}

/// Extent of a sweep over unifiers.
struct Sweep {
    contexts: usize,
    witnesses: usize,
    /// More than `max_results` unifiers fit the depth and length bounds;
    /// only the first `max_results` were visited.
    truncated: bool,
}

type VisitUnifiers<'a> = &'a mut dyn FnMut(&Telescope, Vec<Subst>) -> Result<bool, Exhausted>;

/// Runs `visit` on the first `max_results` unifiers within the budget, one
/// source context at a time, in enumeration order.
fn for_each_unifier(
    sig: &Signature,
    p: &UnifProblem,
    budget: &EnumBudget,
    visit: VisitUnifiers<'_>,
) -> Result<Sweep, Exhausted> {
    let limit = budget.max_results;
    let thetas = enumerate_contexts(sig, budget)?;
    let mut total = 0;
    let mut truncated = false;
    for theta in &thetas {
        let mut space = TermSpace::new(sig, theta, limit);
        let mut found = Vec::new();
        search_substs(&mut space, &p.flexible, budget.max_term_depth, &mut |s, j| unifier_guide(p, s, j), &mut |s| {
            if unifies(p, &s) {
                found.push(s);
            }
            total + found.len() <= limit
        })?;
        if total + found.len() > limit {
            found.truncate(limit - total);
            truncated = true;
        }
        total += found.len();
        if !found.is_empty() && !visit(theta, found)? {
            break;
        }
        if truncated {
            break;
        }
    }
    Ok(Sweep { contexts: thetas.len(), witnesses: total, truncated })
}

/// All unifiers of `p` within the budget.
pub fn enumerate_unifiers(sig: &Signature, p: &UnifProblem, budget: &EnumBudget) -> Result<Vec<Unifier>, Exhausted> {
    let mut out = Vec::new();
    let sweep = for_each_unifier(sig, p, budget, &mut |theta, sigmas| {
        out.extend(sigmas.into_iter().map(|sigma| Unifier { theta: theta.clone(), sigma }));
        Ok(true)
    })?;
    if sweep.truncated {
        return Err(Exhausted { what: "unifiers".to_string(), limit: budget.max_results });
    }
    Ok(out)
}

/// What a budget-relative certificate covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub budget: EnumBudget,
    /// Source contexts searched.
    pub contexts: usize,
    /// Unifiers, or candidate factors, examined.
    pub witnesses: usize,
    /// Whether more unifiers fit the depth and length bounds than the
    /// `max_results` examined.
    pub witnesses_truncated: bool,
    /// Restrictions along which the generalization was recomputed.
    pub naturality_probes: usize,
    /// Whether the naturality probes stopped at `max_results` before the
    /// enumeration ran out.
    pub naturality_truncated: bool,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "certificate {} contexts={} witnesses={}", self.budget, self.contexts, self.witnesses)?;
        if self.witnesses_truncated {
            f.write_str(" (truncated)")?;
        }
        if self.naturality_probes > 0 || self.naturality_truncated {
            write!(f, " naturality-probes={}", self.naturality_probes)?;
            if self.naturality_truncated {
                f.write_str(" (truncated)")?;
            }
        }
        Ok(())
    }
}

/// A violated universal property, with the offending witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CounterExample {
    /// A component of the result does not typecheck.
    IllTyped { what: &'static str, error: TypeError },
    /// The returned `ρ⁺` does not equate the two sides.
    NotAUnifier,
    /// `ρ` is neither the identity nor shortens the flexible context.
    SizeBound { omega_len: usize, gamma_len: usize },
    /// No unifier was reported, yet `sigma` is one.
    MissedUnifier { theta: Telescope, sigma: Subst },
    /// `sigma` does not factor through `ρ`.
    NoFactorization { theta: Telescope, sigma: Subst },
    /// `sigma` factors through `ρ` in two ways.
    AmbiguousFactorization { theta: Telescope, sigma: Subst, first: Subst, second: Subst },
    /// The generalization does not reproduce the item and `ρ`.
    NotFactored,
    /// A second factor `Γ → Γ0`.
    AlternateFactor { factor: Subst },
    /// The returned factor fits the budget but the search missed it.
    FactorMissed,
    /// Restricting along `sigma` changes the generic data or the factor.
    NotNatural { lambda: Telescope, sigma: Subst },
}

impl CounterExample {
    pub fn code(&self) -> &'static str {
        match self {
            CounterExample::IllTyped { .. } => "ill-typed",
            CounterExample::NotAUnifier => "not-a-unifier",
            CounterExample::SizeBound { .. } => "size-bound",
            CounterExample::MissedUnifier { .. } => "missed-unifier",
            CounterExample::NoFactorization { .. } => "no-factorization",
            CounterExample::AmbiguousFactorization { .. } => "ambiguous-factorization",
            CounterExample::NotFactored => "not-factored",
            CounterExample::AlternateFactor { .. } => "alternate-factor",
            CounterExample::FactorMissed => "factor-missed",
            CounterExample::NotNatural { .. } => "not-natural",
        }
    }

    /// One-line description with witnesses in canonical syntax. Substitutions
    /// out of `Γ` (alternate factors) are printed over `gamma_len` names.
    pub fn describe(&self, sig: &Signature, gamma_len: usize) -> String {
        let p = Printer::new(sig);
        let over = |ctx: &Telescope, s: &Subst| format!("{} |- {}", p.context(ctx), p.subst(&Names::canonical(ctx.len()), s));
        let detail = match self {
            CounterExample::IllTyped { what, error } => format!("{what}: {error}"),
            CounterExample::NotAUnifier | CounterExample::NotFactored | CounterExample::FactorMissed => String::new(),
            CounterExample::SizeBound { omega_len, gamma_len } => format!("|omega| = {omega_len}, |gamma| = {gamma_len}"),
            CounterExample::MissedUnifier { theta, sigma }
            | CounterExample::NoFactorization { theta, sigma }
            | CounterExample::NotNatural { lambda: theta, sigma } => over(theta, sigma),
            CounterExample::AmbiguousFactorization { theta, sigma, first, second } => {
                let names = Names::canonical(theta.len());
                format!("{} via {} and {}", over(theta, sigma), p.subst(&names, first), p.subst(&names, second))
            }
            CounterExample::AlternateFactor { factor } => p.subst(&Names::canonical(gamma_len), factor),
        };
        if detail.is_empty() {
            self.code().to_string()
        } else {
            format!("{}: {detail}", self.code())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Certificate(Certificate),
    CounterExample(CounterExample),
    Exhausted(Exhausted),
}

impl Verdict {
    pub fn is_certificate(&self) -> bool {
        matches!(self, Verdict::Certificate(_))
    }

    pub fn is_counter_example(&self) -> bool {
        matches!(self, Verdict::CounterExample(_))
    }
}

/// Checks that `result` is a terminal unifier of `p` among all unifiers the
/// budget reaches, or that there are none when it reports failure.
pub fn check_mgu_terminal(sig: &Signature, p: &UnifProblem, result: &MguResult, budget: &EnumBudget) -> Verdict {
    match mgu_verdict(sig, p, result, budget) {
        Ok(Ok(cert)) => Verdict::Certificate(cert),
        Ok(Err(cex)) => Verdict::CounterExample(cex),
        Err(e) => Verdict::Exhausted(e),
    }
}

fn mgu_verdict(
    sig: &Signature,
    p: &UnifProblem,
    result: &MguResult,
    budget: &EnumBudget,
) -> Result<Result<Certificate, CounterExample>, Exhausted> {
    let limit = budget.max_results;
    let depth = budget.max_term_depth;
    let mut violation = None;
    let sweep = match result {
        MguResult::NoUnifier(_) => for_each_unifier(sig, p, budget, &mut |theta, sigmas| {
            violation = Some(CounterExample::MissedUnifier { theta: theta.clone(), sigma: sigmas[0].clone() });
            Ok(false)
        })?,
        MguResult::Mgu { omega, rho } => {
            if let Err(error) = check_subst(sig, omega, rho, &p.flexible) {
                return Ok(Err(CounterExample::IllTyped { what: "rho", error }));
            }
            if !unifies(p, rho) {
                return Ok(Err(CounterExample::NotAUnifier));
            }
            if !rho.is_identity() && omega.len() >= p.flexible.len() {
                return Ok(Err(CounterExample::SizeBound { omega_len: omega.len(), gamma_len: p.flexible.len() }));
            }
            for_each_unifier(sig, p, budget, &mut |theta, sigmas| {
                let mut space = TermSpace::new(sig, theta, limit);
                for sigma in sigmas {
                    let mut taus = Vec::new();
                    search_substs(
                        &mut space,
                        omega,
                        depth,
                        &mut |tau, j| {
                            let composed = rho.compose(tau);
                            let pairs: Vec<_> = composed.0.iter().zip(&sigma.0).collect();
                            guide(&pairs, j, 0)
                        },
                        &mut |tau| {
                            if rho.compose(&tau) == sigma {
                                taus.push(tau);
                            }
                            taus.len() < 2
                        },
                    )?;
                    let theta = theta.clone();
                    violation = match taus.len() {
                        0 => Some(CounterExample::NoFactorization { theta, sigma }),
                        1 => None,
                        _ => Some(CounterExample::AmbiguousFactorization {
                            theta,
                            sigma,
                            second: taus.pop().expect("two factorizations"),
                            first: taus.pop().expect("two factorizations"),
                        }),
                    };
                    if violation.is_some() {
                        return Ok(false);
                    }
                }
                Ok(true)
            })?
        }
    };
    Ok(match violation {
        Some(cex) => Err(cex),
        None => Ok(Certificate {
            budget: *budget,
            contexts: sweep.contexts,
            witnesses: sweep.witnesses,
            witnesses_truncated: sweep.truncated,
            naturality_probes: 0,
            naturality_truncated: false,
        }),
    })
}

/// Checks that `result` reproduces the problem through its factor, that no
/// other factor within the budget does, and that the generalization of every
/// restriction of `p` within the budget has the same generic data.
pub fn check_mgg_terminal(sig: &Signature, p: &GenProblem, result: &GeneralizationResult, budget: &EnumBudget) -> Verdict {
    match mgg_verdict(sig, p, result, budget) {
        Ok(Ok(cert)) => Verdict::Certificate(cert),
        Ok(Err(cex)) => Verdict::CounterExample(cex),
        Err(e) => Verdict::Exhausted(e),
    }
}

fn mgg_verdict(
    sig: &Signature,
    p: &GenProblem,
    r: &GeneralizationResult,
    budget: &EnumBudget,
) -> Result<Result<Certificate, CounterExample>, Exhausted> {
    let limit = budget.max_results;
    let depth = budget.max_term_depth;
    if let Err(error) = check_subst(sig, &p.gamma, &r.factor, &r.gamma0) {
        return Ok(Err(CounterExample::IllTyped { what: "factor", error }));
    }
    if let Err(error) = check_subst(sig, &r.gamma0, &r.rho0, &p.omega) {
        return Ok(Err(CounterExample::IllTyped { what: "rho0", error }));
    }
    if !r.factors(p) {
        return Ok(Err(CounterExample::NotFactored));
    }

    let k = p.delta.len();
    let item = p.item.item();
    let fits = |g: &Subst| r.rho0.compose(g) == p.rho && r.item0.subst(&g.lift(k)) == item;
    let factor_guide = |g: &Subst, j: usize| {
        let rho = r.rho0.compose(g);
        let pairs: Vec<_> = rho.0.iter().zip(&p.rho.0).collect();
        let inst = r.item0.subst(&g.lift(k));
        let on_item = match item_pairs(&inst, &item) {
            Some(pairs) => guide(&pairs, j, k),
            None => Choice::Nothing,
        };
        guide(&pairs, j, 0).and(on_item)
    };
    let mut space = TermSpace::new(sig, &p.gamma, limit);
    let mut factors = Vec::new();
    search_substs(&mut space, &r.gamma0, depth, &mut |g, j| factor_guide(g, j), &mut |g| {
        if fits(&g) {
            factors.push(g);
        }
        factors.len() < 2
    })?;
    if let Some(other) = factors.iter().find(|g| **g != r.factor) {
        return Ok(Err(CounterExample::AlternateFactor { factor: other.clone() }));
    }
    if factors.is_empty() && r.factor.depth() <= depth {
        return Ok(Err(CounterExample::FactorMissed));
    }

    let lambdas = enumerate_contexts(sig, budget)?;
    let mut probes = 0;
    let mut truncated = false;
    let mut violation = None;
    for lambda in &lambdas {
        let mut space = TermSpace::new(sig, lambda, limit);
        search_substs(&mut space, &p.gamma, depth, &mut |_, _| Choice::Any, &mut |sigma| {
            if probes == limit {
                truncated = true;
                return false;
            }
            probes += 1;
            let r2 = mgg(sig, &p.restrict(lambda, &sigma));
            let natural = r2.gamma0 == r.gamma0
                && r2.rho0 == r.rho0
                && r2.item0 == r.item0
                && r2.factor == r.factor.compose(&sigma);
            if !natural {
                violation = Some(CounterExample::NotNatural { lambda: lambda.clone(), sigma });
            }
            natural
        })?;
        if violation.is_some() || truncated {
            break;
        }
    }
    Ok(match violation {
        Some(cex) => Err(cex),
        None => Ok(Certificate {
            budget: *budget,
            contexts: lambdas.len(),
            witnesses: factors.len(),
            witnesses_truncated: false,
            naturality_probes: probes,
            naturality_truncated: truncated,
        }),
    })
}
