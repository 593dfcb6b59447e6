//! Free realization of a weakly stable weak identity structure: every
//! introduction and elimination context gets its own freshly declared
//! symbols, memoized by the context's canonical printed form.

use std::collections::{BTreeSet, HashMap};

use super::{IdElim, IdIntro, StrictifyError, WeakIdentity};
use crate::signature::{DeclKind, Declaration, Signature};
use crate::syntax::{DeclId, Item, Names, Printer, Subst, Telescope, Term, Type};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GroupKind {
    Intro,
    Elim,
}

/// Symbols minted together: `Id`/`refl` for an introduction context,
/// `J`/`Jbeta` for an elimination context.
#[derive(Debug, Clone)]
struct Group {
    kind: GroupKind,
    decls: Vec<DeclId>,
}

/// A signature extended on demand with the symbols of a weak identity
/// structure. The user's signature is kept as an untouched prefix.
#[derive(Debug, Clone)]
pub struct IdStructureTable {
    sig: Signature,
    user_len: usize,
    intro_memo: HashMap<String, (DeclId, DeclId)>,
    elim_memo: HashMap<String, (DeclId, DeclId)>,
    groups: Vec<Group>,
}

impl IdStructureTable {
    pub fn new(base: &Signature) -> IdStructureTable {
        IdStructureTable {
            sig: base.clone(),
            user_len: base.len(),
            intro_memo: HashMap::new(),
            elim_memo: HashMap::new(),
            groups: Vec::new(),
        }
    }

    /// Declarations added beyond the user's signature, in minting order.
    pub fn minted(&self) -> &[Declaration] {
        &self.sig.declarations()[self.user_len..]
    }

    pub fn user_len(&self) -> usize {
        self.user_len
    }

    pub fn intro_count(&self) -> usize {
        self.intro_memo.len()
    }

    pub fn elim_count(&self) -> usize {
        self.elim_memo.len()
    }

    fn intro_key(&self, intro: &IdIntro) -> String {
        let p = Printer::new(&self.sig);
        let (ctx, names) = p.telescope(&Names::new(), &intro.gamma);
        format!("{ctx} |- {} : {}", p.term(&names, &intro.point), p.ty(&names, &intro.ty))
    }

    fn elim_key(&self, elim: &IdElim) -> String {
        let p = Printer::new(&self.sig);
        let (delta, names) = p.telescope(&Names::new(), &elim.delta);
        let mut ext = names.clone();
        ext.push_canonical();
        ext.push_canonical();
        format!(
            "{} || {delta} ; {} ; {} ; {}",
            self.intro_key(&elim.intro),
            p.subst(&names, &elim.gamma_map),
            p.ty(&ext, &elim.motive),
            p.term(&names, &elim.base),
        )
    }

    fn mint(&mut self, decl: Declaration) -> Result<DeclId, StrictifyError> {
        Ok(self.sig.push(decl)?)
    }

    fn declaration(&self, base: &str, kind: DeclKind, boundary: Telescope, output: Option<Type>) -> Declaration {
        let binders = (0..boundary.len()).map(|i| format!("v{i}")).collect();
        Declaration { name: self.sig.fresh_name(base), kind, boundary, output, binders, span: None }
    }

    fn intro_symbols(&mut self, intro: &IdIntro) -> Result<(DeclId, DeclId), StrictifyError> {
        let key = self.intro_key(intro);
        if let Some(ids) = self.intro_memo.get(&key) {
            return Ok(*ids);
        }
        let n = intro.gamma.len();
        let k = self.intro_memo.len() + 1;
        let id_decl =
            self.declaration(&format!("Id{k}"), DeclKind::Sort, intro.gamma.extended(intro.ty.clone()), None);
        let id = self.mint(id_decl)?;
        let mut refl_ty_args = Subst::identity(n).0;
        refl_ty_args.push(intro.point.clone());
        let refl_decl = self.declaration(
            &format!("refl{k}"),
            DeclKind::Fun,
            intro.gamma.clone(),
            Some(Type::new(id, refl_ty_args)),
        );
        let refl = match self.mint(refl_decl) {
            Ok(r) => r,
            Err(e) => {
                // roll back the half-minted pair
                self.sig = self.sig.prefix(self.sig.len() - 1);
                return Err(e);
            }
        };
        self.intro_memo.insert(key, (id, refl));
        self.groups.push(Group { kind: GroupKind::Intro, decls: vec![id, refl] });
        Ok((id, refl))
    }

    fn registered_intro(&self, intro: &IdIntro) -> Result<(DeclId, DeclId), StrictifyError> {
        let key = self.intro_key(intro);
        self.intro_memo.get(&key).copied().ok_or(StrictifyError::UnregisteredIntro(key))
    }

    fn elim_symbols(&mut self, elim: &IdElim) -> Result<(DeclId, DeclId), StrictifyError> {
        let key = self.elim_key(elim);
        if let Some(ids) = self.elim_memo.get(&key) {
            return Ok(*ids);
        }
        let (id, refl) = self.registered_intro(&elim.intro)?;
        let m = elim.delta.len();
        let rollback = self.sig.len();

        // J : Δ.(y : A[γ]).(p : Id(γ, y)) ⊢ P
        let mut boundary = elim.delta.clone();
        boundary.push(elim.intro.ty.subst(&elim.gamma_map));
        let mut id_args = elim.gamma_map.shift(1).0;
        id_args.push(Term::Var(0));
        boundary.push(Type::new(id, id_args));
        let k = self.elim_memo.len() + 1;
        let j_decl = self.declaration(&format!("J{k}"), DeclKind::Fun, boundary, Some(elim.motive.clone()));
        let result = (|| {
            let j = self.mint(j_decl)?;
            // Jbeta : Δ ⊢ Id_(Δ, P', d)(id, J(id, x[γ], refl(γ)))
            let refl_at = Term::App(refl, elim.gamma_map.0.clone());
            let at_refl = Subst::identity(m).extended(elim.intro.point.subst(&elim.gamma_map)).extended(refl_at);
            let motive_at_refl = elim.motive.subst(&at_refl);
            let target = IdIntro { gamma: elim.delta.clone(), ty: motive_at_refl, point: elim.base.clone() };
            let (target_id, _) = self.intro_symbols(&target)?;
            let j_at_refl = Term::App(j, at_refl.0.clone());
            let mut out_args = Subst::identity(m).0;
            out_args.push(j_at_refl);
            let jbeta_decl = self.declaration(
                &format!("Jbeta{k}"),
                DeclKind::Fun,
                elim.delta.clone(),
                Some(Type::new(target_id, out_args)),
            );
            let jbeta = self.mint(jbeta_decl)?;
            Ok((j, jbeta))
        })();
        match result {
            Ok((j, jbeta)) => {
                self.elim_memo.insert(key, (j, jbeta));
                self.groups.push(Group { kind: GroupKind::Elim, decls: vec![j, jbeta] });
                Ok((j, jbeta))
            }
            Err(e) => {
                self.sig = self.sig.prefix(rollback);
                self.intro_memo.retain(|_, (id, _)| id.0 < rollback);
                self.groups.retain(|g| g.decls[0].0 < rollback);
                Err(e)
            }
        }
    }

    /// The extended signature with minted symbols reordered canonically
    /// and renamed sequentially, so that it depends only on the set of
    /// contexts queried and not on the order of the queries.
    pub fn canonical_extension(&self) -> Signature {
        self.canonicalize().0
    }

    /// Maps items over the minting-order signature to the canonical one.
    pub fn canonical_renaming(&self) -> Renaming {
        self.canonicalize().1
    }

    fn canonicalize(&self) -> (Signature, Renaming) {
        let mut out = self.sig.prefix(self.user_len);
        let mut map: HashMap<DeclId, DeclId> = HashMap::new();
        let mut remaining: Vec<&Group> = self.groups.iter().collect();
        let (mut intros, mut elims) = (0, 0);
        while !remaining.is_empty() {
            let mut best: Option<(String, usize)> = None;
            for (idx, g) in remaining.iter().enumerate() {
                if !self.group_refs(g).iter().all(|r| map.contains_key(r) || r.0 < self.user_len) {
                    continue;
                }
                let mut tmp = out.clone();
                let mut local = map.clone();
                let placeholder = |d: &Declaration| format!("{}?", d.name.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_'));
                for &d in &g.decls {
                    let decl = self.sig.decl(d);
                    let new = remap_decl(decl, &local, placeholder(decl));
                    local.insert(d, tmp.push_unchecked(new).expect("placeholders are unique"));
                }
                let rendered: Vec<String> =
                    (out.len()..tmp.len()).map(|i| tmp.render_declaration(DeclId(i))).collect();
                let rendered = rendered.join("\n");
                if best.as_ref().is_none_or(|(b, _)| rendered < *b) {
                    best = Some((rendered, idx));
                }
            }
            let (_, idx) = best.expect("minted symbols only reference earlier ones");
            let g = remaining.remove(idx);
            let n = match g.kind {
                GroupKind::Intro => {
                    intros += 1;
                    intros
                }
                GroupKind::Elim => {
                    elims += 1;
                    elims
                }
            };
            let bases: &[&str] = match g.kind {
                GroupKind::Intro => &["Id", "refl"],
                GroupKind::Elim => &["J", "Jbeta"],
            };
            for (&d, base) in g.decls.iter().zip(bases) {
                let name = out.fresh_name(&format!("{base}{n}"));
                let new = remap_decl(self.sig.decl(d), &map, name);
                map.insert(d, out.push_unchecked(new).expect("fresh names are unique"));
            }
        }
        (out, Renaming(map))
    }

    /// Minted symbols a group mentions outside itself.
    fn group_refs(&self, g: &Group) -> BTreeSet<DeclId> {
        let mut refs = BTreeSet::new();
        for &d in &g.decls {
            let decl = self.sig.decl(d);
            decl.boundary.iter().for_each(|t| t.heads(&mut refs));
            if let Some(o) = &decl.output {
                o.heads(&mut refs);
            }
        }
        for d in &g.decls {
            refs.remove(d);
        }
        refs.retain(|r| r.0 >= self.user_len);
        refs
    }
}

/// Renaming of minted declarations; user declarations are fixed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Renaming(HashMap<DeclId, DeclId>);

impl Renaming {
    pub fn term(&self, t: &Term) -> Term {
        remap_term(t, &self.0)
    }

    pub fn ty(&self, t: &Type) -> Type {
        remap_type(t, &self.0)
    }

    pub fn telescope(&self, t: &Telescope) -> Telescope {
        t.iter().map(|ty| self.ty(ty)).collect()
    }

    pub fn item(&self, item: &Item) -> Item {
        match item {
            Item::Term(t) => Item::Term(self.term(t)),
            Item::Type(t) => Item::Type(self.ty(t)),
            Item::Subst(s) => Item::Subst(s.0.iter().map(|t| self.term(t)).collect()),
        }
    }
}

fn remap_term(t: &Term, map: &HashMap<DeclId, DeclId>) -> Term {
    match t {
        Term::Var(i) => Term::Var(*i),
        Term::App(f, args) => {
            Term::App(*map.get(f).unwrap_or(f), args.iter().map(|a| remap_term(a, map)).collect())
        }
    }
}

fn remap_type(t: &Type, map: &HashMap<DeclId, DeclId>) -> Type {
    Type::new(*map.get(&t.head).unwrap_or(&t.head), t.args.iter().map(|a| remap_term(a, map)).collect())
}

fn remap_decl(d: &Declaration, map: &HashMap<DeclId, DeclId>, name: String) -> Declaration {
    Declaration {
        name,
        kind: d.kind,
        boundary: d.boundary.iter().map(|t| remap_type(t, map)).collect(),
        output: d.output.as_ref().map(|o| remap_type(o, map)),
        binders: d.binders.clone(),
        span: None,
    }
}

impl WeakIdentity for IdStructureTable {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn id(&mut self, intro: &IdIntro) -> Result<Type, StrictifyError> {
        let (id, _) = self.intro_symbols(intro)?;
        Ok(Type::new(id, Subst::identity(intro.gamma.len() + 1).0))
    }

    fn refl(&mut self, intro: &IdIntro) -> Result<Term, StrictifyError> {
        let (_, refl) = self.intro_symbols(intro)?;
        Ok(Term::App(refl, Subst::identity(intro.gamma.len()).0))
    }

    fn j(&mut self, elim: &IdElim) -> Result<Term, StrictifyError> {
        let (j, _) = self.elim_symbols(elim)?;
        Ok(Term::App(j, Subst::identity(elim.delta.len() + 2).0))
    }

    fn jbeta(&mut self, elim: &IdElim) -> Result<Term, StrictifyError> {
        let (_, jbeta) = self.elim_symbols(elim)?;
        Ok(Term::App(jbeta, Subst::identity(elim.delta.len()).0))
    }
}
