//! Canonical printing. Context variables are named `v0`, `v1`, ... in
//! binding order unless explicit names are supplied.

use super::{Subst, Telescope, Term, Type};
use crate::signature::Signature;

/// Display names for the variables of a context, outermost first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Names(Vec<String>);

impl Names {
    pub fn new() -> Names {
        Names::default()
    }

    /// `v0 .. v{len-1}`.
    pub fn canonical(len: usize) -> Names {
        Names((0..len).map(|i| format!("v{i}")).collect())
    }

    pub fn push(&mut self, name: impl Into<String>) {
        self.0.push(name.into());
    }

    /// Extends with the next canonical name, `v{len}`.
    pub fn push_canonical(&mut self) {
        let n = self.0.len();
        self.0.push(format!("v{n}"));
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    fn of_index(&self, i: usize) -> String {
        let n = self.0.len();
        if i < n {
            self.0[n - 1 - i].clone()
        } else {
            format!("#{i}")
        }
    }
}

pub struct Printer<'a> {
    sig: &'a Signature,
}

impl<'a> Printer<'a> {
    pub fn new(sig: &'a Signature) -> Printer<'a> {
        Printer { sig }
    }

    pub fn term(&self, names: &Names, t: &Term) -> String {
        let mut out = String::new();
        self.write_term(names, t, false, &mut out);
        out
    }

    fn write_term(&self, names: &Names, t: &Term, nested: bool, out: &mut String) {
        match t {
            Term::Var(i) => out.push_str(&names.of_index(*i)),
            Term::App(f, args) if args.is_empty() => out.push_str(self.sig.name(*f)),
            Term::App(f, args) => {
                if nested {
                    out.push('(');
                }
                out.push_str(self.sig.name(*f));
                for a in args {
                    out.push(' ');
                    self.write_term(names, a, true, out);
                }
                if nested {
                    out.push(')');
                }
            }
        }
    }

    pub fn ty(&self, names: &Names, ty: &Type) -> String {
        let mut out = self.sig.name(ty.head).to_string();
        for a in &ty.args {
            out.push(' ');
            self.write_term(names, a, true, &mut out);
        }
        out
    }

    pub fn subst(&self, names: &Names, s: &Subst) -> String {
        let parts: Vec<String> = s.0.iter().map(|t| self.term(names, t)).collect();
        format!("[{}]", parts.join(", "))
    }

    /// Prints `tel` over `names`, binding its entries with fresh canonical
    /// names; `()` for the empty telescope. Returns the extended names.
    pub fn telescope(&self, names: &Names, tel: &Telescope) -> (String, Names) {
        let mut names = names.clone();
        if tel.is_empty() {
            return ("()".to_string(), names);
        }
        let mut parts = Vec::with_capacity(tel.len());
        for ty in tel.iter() {
            let printed = self.ty(&names, ty);
            names.push_canonical();
            parts.push(format!("({} : {})", names.of_index(0), printed));
        }
        (parts.join(" "), names)
    }

    /// A closed context with canonical names.
    pub fn context(&self, ctx: &Telescope) -> String {
        self.telescope(&Names::new(), ctx).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::load_signature;
    use crate::syntax::{read_telescope, read_term, Scope};

    #[test]
    fn prints_canonical_names_and_parentheses() {
        let sig = load_signature("sort X\nsort Y (x : X)\nfun f1 (x : X) : X\nfun g (x : X) (y : Y x) : X").unwrap();
        let mut scope = Scope::new();
        let ctx = read_telescope(&sig, &mut scope, "(a : X) (b : Y (f1 a))").unwrap();
        let t = read_term(&sig, &scope, "g (f1 a) b").unwrap();
        let p = Printer::new(&sig);
        assert_eq!(p.context(&ctx), "(v0 : X) (v1 : Y (f1 v0))");
        assert_eq!(p.term(&Names::canonical(2), &t), "g (f1 v0) v1");
        assert_eq!(p.context(&Telescope::empty()), "()");
        assert_eq!(p.subst(&Names::canonical(2), &Subst::identity(2)), "[v0, v1]");
    }
}
