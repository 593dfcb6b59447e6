//! Bidirectional-free typechecking: in a free theory every term has exactly
//! one type, so checking reduces to inference plus structural equality.

use thiserror::Error;

use super::{DeclId, Names, Printer, Subst, Telescope, Term, Type};
use crate::signature::{DeclKind, Signature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("variable index {index} out of range for a context of length {len}")]
    InvalidIndex { index: usize, len: usize },
    #[error("unknown declaration #{0}")]
    UnknownDecl(usize),
    #[error("`{name}` is a {actual}, expected a {expected}")]
    WrongKind { name: String, expected: DeclKind, actual: DeclKind },
    #[error("`{name}` expects {expected} argument(s), got {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("argument {index} of `{name}` has type {actual}, expected {expected}")]
    ArgMismatch { name: String, index: usize, expected: String, actual: String },
    #[error("substitution has {found} component(s), target context has {expected}")]
    SubstLength { expected: usize, found: usize },
    #[error("substitution component {index} has type {actual}, expected {expected}")]
    SubstMismatch { index: usize, expected: String, actual: String },
    #[error("term has type {actual}, expected {expected}")]
    Mismatch { expected: String, actual: String },
}

pub fn var_type(ctx: &Telescope, index: usize) -> Result<Type, TypeError> {
    ctx.var_type(index).ok_or(TypeError::InvalidIndex { index, len: ctx.len() })
}

fn decl_of(sig: &Signature, id: DeclId, want: DeclKind) -> Result<&crate::signature::Declaration, TypeError> {
    let d = sig.get(id).ok_or(TypeError::UnknownDecl(id.0))?;
    if d.kind != want {
        return Err(TypeError::WrongKind { name: d.name.clone(), expected: want, actual: d.kind });
    }
    Ok(d)
}

/// Checks `args` as a substitution from `ctx` into the boundary of `id`.
fn check_args(sig: &Signature, ctx: &Telescope, id: DeclId, want: DeclKind, args: &[Term]) -> Result<(), TypeError> {
    let d = decl_of(sig, id, want)?;
    if d.boundary.len() != args.len() {
        return Err(TypeError::Arity { name: d.name.clone(), expected: d.boundary.len(), found: args.len() });
    }
    for (j, (a, b)) in args.iter().zip(d.boundary.iter()).enumerate() {
        let actual = infer_term(sig, ctx, a)?;
        let expected = b.subst(&Subst(args[..j].to_vec()));
        if actual != expected {
            let p = Printer::new(sig);
            let names = Names::canonical(ctx.len());
            return Err(TypeError::ArgMismatch {
                name: d.name.clone(),
                index: j,
                expected: p.ty(&names, &expected),
                actual: p.ty(&names, &actual),
            });
        }
    }
    Ok(())
}

/// The unique type of `t` in `ctx`.
pub fn infer_term(sig: &Signature, ctx: &Telescope, t: &Term) -> Result<Type, TypeError> {
    match t {
        Term::Var(i) => var_type(ctx, *i),
        Term::App(f, args) => {
            check_args(sig, ctx, *f, DeclKind::Fun, args)?;
            let out = sig.decl(*f).output.as_ref().expect("term-former has an output type");
            Ok(out.subst(&Subst(args.clone())))
        }
    }
}

pub fn check_term(sig: &Signature, ctx: &Telescope, t: &Term, ty: &Type) -> Result<(), TypeError> {
    let actual = infer_term(sig, ctx, t)?;
    if &actual != ty {
        let p = Printer::new(sig);
        let names = Names::canonical(ctx.len());
        return Err(TypeError::Mismatch { expected: p.ty(&names, ty), actual: p.ty(&names, &actual) });
    }
    Ok(())
}

pub fn check_type(sig: &Signature, ctx: &Telescope, ty: &Type) -> Result<(), TypeError> {
    check_args(sig, ctx, ty.head, DeclKind::Sort, &ty.args)
}

/// Checks an open telescope over `ctx`.
pub fn check_telescope(sig: &Signature, ctx: &Telescope, tel: &Telescope) -> Result<(), TypeError> {
    let mut ext = ctx.clone();
    for ty in tel.iter() {
        check_type(sig, &ext, ty)?;
        ext.push(ty.clone());
    }
    Ok(())
}

pub fn check_context(sig: &Signature, ctx: &Telescope) -> Result<(), TypeError> {
    check_telescope(sig, &Telescope::empty(), ctx)
}

/// Checks `s : from → to`; `to` is assumed well formed.
pub fn check_subst(sig: &Signature, from: &Telescope, s: &Subst, to: &Telescope) -> Result<(), TypeError> {
    if s.len() != to.len() {
        return Err(TypeError::SubstLength { expected: to.len(), found: s.len() });
    }
    for (k, (t, b)) in s.0.iter().zip(to.iter()).enumerate() {
        let actual = infer_term(sig, from, t)?;
        let expected = b.subst(&Subst(s.0[..k].to_vec()));
        if actual != expected {
            let p = Printer::new(sig);
            let names = Names::canonical(from.len());
            return Err(TypeError::SubstMismatch {
                index: k,
                expected: p.ty(&names, &expected),
                actual: p.ty(&names, &actual),
            });
        }
    }
    Ok(())
}
