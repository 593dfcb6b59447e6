//! Problem files: a signature section followed by tagged problem blocks.
//!
//! ```text
//! sort X
//! fun f1 (x : X) : X
//!
//! [unify first]
//! flexible = (x : X) (y : X)
//! kind = term
//! lhs = f1 x
//! rhs = f1 y
//! ```

use std::fmt;

use gatforge_core::generalize::{GenItem, GenProblem};
use gatforge_core::signature::{parse_signature, validate_signature, Signature};
use gatforge_core::strictify::{StrictOp, StrictQuery};
use gatforge_core::syntax::{
    check_type, infer_term, read_subst, read_telescope, read_term, read_type, Item, ReadError, Scope, Subst,
    Telescope,
};
use gatforge_core::unify::{UnifKind, UnifProblem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemError {
    pub line: usize,
    pub col: usize,
    /// Header of the enclosing block, e.g. `[unify first]`.
    pub block: Option<String>,
    pub message: String,
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.col)?;
        if let Some(b) = &self.block {
            write!(f, "in block `{b}`: ")?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Unify,
    Generalize,
    StrictifyId,
}

impl Tag {
    fn parse(s: &str) -> Option<Tag> {
        match s {
            "unify" => Some(Tag::Unify),
            "generalize" => Some(Tag::Generalize),
            "strictify-id" => Some(Tag::StrictifyId),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Unify => "unify",
            Tag::Generalize => "generalize",
            Tag::StrictifyId => "strictify-id",
        }
    }

    fn fields(self) -> &'static [&'static str] {
        match self {
            Tag::Unify => &["flexible", "rigid", "kind", "target", "lhs", "rhs"],
            Tag::Generalize => &["omega", "delta", "gamma", "rho", "kind", "type", "target", "item"],
            Tag::StrictifyId => &["context", "op", "type", "point", "index", "motive", "base"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    Unify(UnifProblem),
    Generalize(GenProblem),
    StrictifyId(StrictQuery),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub tag: Tag,
    pub name: String,
    pub line: usize,
    pub body: Body,
}

impl Block {
    pub fn header(&self) -> String {
        format!("[{} {}]", self.tag.as_str(), self.name)
    }
}

#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub signature: Signature,
    pub blocks: Vec<Block>,
}

struct Field {
    key: String,
    value: String,
    line: usize,
    col: usize,
}

/// The fields of one block, consumed as they are read.
struct Fields<'a> {
    sig: &'a Signature,
    header: String,
    line: usize,
    fields: Vec<Field>,
}

impl Fields<'_> {
    fn error(&self, line: usize, col: usize, message: impl Into<String>) -> ProblemError {
        ProblemError { line, col, block: Some(self.header.clone()), message: message.into() }
    }

    fn get(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|f| f.key == key)
    }

    fn require(&self, key: &str) -> Result<&Field, ProblemError> {
        self.get(key).ok_or_else(|| self.error(self.line, 1, format!("missing field `{key}`")))
    }

    fn read_err(&self, f: &Field, e: ReadError) -> ProblemError {
        self.error(f.line, f.col + e.col.saturating_sub(1), format!("in `{}`: {}", f.key, e.message))
    }

    fn at<T>(&self, key: &str, r: Result<T, impl fmt::Display>) -> Result<T, ProblemError> {
        let f = self.require(key)?;
        r.map_err(|e| self.error(f.line, f.col, format!("in `{key}`: {e}")))
    }

    fn value_or<'s>(&'s self, key: &str, default: &'s str) -> (&'s str, Option<&'s Field>) {
        match self.get(key) {
            Some(f) => (&f.value, Some(f)),
            None => (default, None),
        }
    }

    fn telescope(&self, key: &str, default: Option<&str>, scope: &mut Scope) -> Result<Telescope, ProblemError> {
        let (src, field) = match default {
            Some(d) => self.value_or(key, d),
            None => {
                let f = self.require(key)?;
                (f.value.as_str(), Some(f))
            }
        };
        read_telescope(self.sig, scope, src).map_err(|e| match field {
            Some(f) => self.read_err(f, e),
            None => self.error(self.line, 1, e.message),
        })
    }

    fn term(&self, key: &str, scope: &Scope) -> Result<gatforge_core::syntax::Term, ProblemError> {
        let f = self.require(key)?;
        read_term(self.sig, scope, &f.value).map_err(|e| self.read_err(f, e))
    }

    fn ty(&self, key: &str, scope: &Scope) -> Result<gatforge_core::syntax::Type, ProblemError> {
        let f = self.require(key)?;
        read_type(self.sig, scope, &f.value).map_err(|e| self.read_err(f, e))
    }

    fn subst(&self, key: &str, default: Option<&str>, scope: &Scope) -> Result<Subst, ProblemError> {
        let (src, field) = match default {
            Some(d) => self.value_or(key, d),
            None => {
                let f = self.require(key)?;
                (f.value.as_str(), Some(f))
            }
        };
        read_subst(self.sig, scope, src).map_err(|e| match field {
            Some(f) => self.read_err(f, e),
            None => self.error(self.line, 1, e.message),
        })
    }

    fn word(&self, key: &str, allowed: &[&str]) -> Result<String, ProblemError> {
        let f = self.require(key)?;
        if allowed.contains(&f.value.as_str()) {
            Ok(f.value.clone())
        } else {
            Err(self.error(f.line, f.col, format!("`{key}` must be one of {}, found `{}`", allowed.join(", "), f.value)))
        }
    }

    fn forbid(&self, keys: &[&str], why: &str) -> Result<(), ProblemError> {
        for k in keys {
            if let Some(f) = self.get(k) {
                return Err(self.error(f.line, 1, format!("field `{k}` is not used {why}")));
            }
        }
        Ok(())
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Parses and checks a problem file. A file without blocks is a plain
/// signature.
pub fn parse_problem_file(source: &str) -> Result<ProblemFile, ProblemError> {
    let lines: Vec<&str> = source.lines().collect();
    let first_block = lines.iter().position(|l| strip_comment(l).trim_start().starts_with('[')).unwrap_or(lines.len());
    let signature = load_section(&lines[..first_block].join("\n"))?;

    let mut blocks = Vec::new();
    let mut i = first_block;
    while i < lines.len() {
        let header_line = i + 1;
        let raw = strip_comment(lines[i]);
        let start = raw.find('[').expect("block lines start with `[`");
        let Some(end) = raw.find(']') else {
            return Err(ProblemError { line: header_line, col: start + 1, block: None, message: "unclosed block header".into() });
        };
        let inner = raw[start + 1..end].trim();
        let (tag_str, name) = inner.split_once(char::is_whitespace).unwrap_or((inner, ""));
        let tag = Tag::parse(tag_str).ok_or_else(|| ProblemError {
            line: header_line,
            col: start + 2,
            block: None,
            message: format!("unknown block tag `{tag_str}`"),
        })?;
        if !raw[end + 1..].trim().is_empty() {
            return Err(ProblemError {
                line: header_line,
                col: end + 2,
                block: None,
                message: "unexpected text after block header".into(),
            });
        }
        let name = if name.trim().is_empty() { format!("#{}", blocks.len() + 1) } else { name.trim().to_string() };
        let header = format!("[{} {}]", tag.as_str(), name);

        let mut fields: Vec<Field> = Vec::new();
        i += 1;
        while i < lines.len() && !strip_comment(lines[i]).trim_start().starts_with('[') {
            let raw = strip_comment(lines[i]);
            let line = i + 1;
            i += 1;
            if raw.trim().is_empty() {
                continue;
            }
            let err = |col: usize, message: String| ProblemError { line, col, block: Some(header.clone()), message };
            let Some(eq) = raw.find('=') else {
                return Err(err(1, "expected `field = value`".into()));
            };
            let key = raw[..eq].trim().to_string();
            let key_col = raw.len() - raw.trim_start().len() + 1;
            if !tag.fields().contains(&key.as_str()) {
                return Err(err(key_col, format!("unknown field `{key}` for a {} block", tag.as_str())));
            }
            if fields.iter().any(|f| f.key == key) {
                return Err(err(key_col, format!("duplicate field `{key}`")));
            }
            let rest = &raw[eq + 1..];
            let value = rest.trim();
            let col = eq + 2 + (rest.len() - rest.trim_start().len());
            fields.push(Field { key, value: value.to_string(), line, col });
        }
        let f = Fields { sig: &signature, header, line: header_line, fields };
        let body = match tag {
            Tag::Unify => Body::Unify(unify_block(&f)?),
            Tag::Generalize => Body::Generalize(generalize_block(&f)?),
            Tag::StrictifyId => Body::StrictifyId(strictify_block(&f)?),
        };
        blocks.push(Block { tag, name, line: header_line, body });
    }
    Ok(ProblemFile { signature, blocks })
}

fn load_section(source: &str) -> Result<Signature, ProblemError> {
    let sig = parse_signature(source).map_err(|errs| {
        let e = &errs.0[0];
        let message = match &e.declaration {
            Some(d) => format!("in declaration `{d}`: {}", e.message),
            None => e.message.clone(),
        };
        ProblemError { line: e.line, col: e.col, block: None, message }
    })?;
    validate_signature(&sig).map_err(|errs| {
        let e = &errs.0[0];
        let span = sig.id_of(e.declaration()).and_then(|id| sig.decl(id).span).unwrap_or_default();
        ProblemError { line: span.line, col: span.col, block: None, message: e.to_string() }
    })?;
    Ok(sig)
}

fn unify_block(f: &Fields<'_>) -> Result<UnifProblem, ProblemError> {
    let mut scope = Scope::new();
    let flexible = f.telescope("flexible", None, &mut scope)?;
    let rigid = f.telescope("rigid", Some("()"), &mut scope)?;
    let ctx = flexible.concat(&rigid);
    let kind = f.word("kind", &["term", "type", "subst"])?;
    let (kind, lhs, rhs) = match kind.as_str() {
        "term" => {
            f.forbid(&["target"], "by term problems")?;
            let lhs = f.term("lhs", &scope)?;
            let rhs = f.term("rhs", &scope)?;
            let ty = f.at("lhs", infer_term(f.sig, &ctx, &lhs))?;
            (UnifKind::Term(ty), Item::Term(lhs), Item::Term(rhs))
        }
        "type" => {
            f.forbid(&["target"], "by type problems")?;
            (UnifKind::Type, Item::Type(f.ty("lhs", &scope)?), Item::Type(f.ty("rhs", &scope)?))
        }
        _ => {
            let xi = f.telescope("target", None, &mut Scope::new())?;
            (UnifKind::Subst(xi), Item::Subst(f.subst("lhs", None, &scope)?), Item::Subst(f.subst("rhs", None, &scope)?))
        }
    };
    let p = UnifProblem { flexible, rigid, kind, lhs, rhs };
    let check = p.check(f.sig);
    f.at("rhs", check)?;
    Ok(p)
}

fn generalize_block(f: &Fields<'_>) -> Result<GenProblem, ProblemError> {
    let mut omega_scope = Scope::new();
    let omega = f.telescope("omega", Some("()"), &mut omega_scope)?;
    let mut delta_scope = omega_scope.clone();
    let delta = f.telescope("delta", Some("()"), &mut delta_scope)?;
    let mut gamma_scope = Scope::new();
    let gamma = f.telescope("gamma", None, &mut gamma_scope)?;
    let rho = f.subst("rho", Some("[]"), &gamma_scope)?;
    let mut item_scope = gamma_scope.clone();
    for name in &delta_scope.names()[omega_scope.len()..] {
        item_scope.push(name.clone());
    }
    let kind = f.word("kind", &["term", "type", "subst"])?;
    let item = match kind.as_str() {
        "type" => {
            f.forbid(&["type", "target"], "by type problems")?;
            GenItem::Type(f.ty("item", &item_scope)?)
        }
        "term" => {
            f.forbid(&["target"], "by term problems")?;
            let ty = f.ty("type", &delta_scope)?;
            f.at("type", check_type(f.sig, &omega.concat(&delta), &ty))?;
            GenItem::Term { ty, value: f.term("item", &item_scope)? }
        }
        _ => {
            f.forbid(&["type"], "by substitution problems")?;
            let target = f.telescope("target", None, &mut Scope::new())?;
            GenItem::Subst { target, value: f.subst("item", None, &item_scope)? }
        }
    };
    let p = GenProblem { omega, delta, gamma, rho, item };
    let check = p.check(f.sig);
    f.at("item", check)?;
    Ok(p)
}

fn strictify_block(f: &Fields<'_>) -> Result<StrictQuery, ProblemError> {
    let mut scope = Scope::new();
    let context = f.telescope("context", Some("()"), &mut scope)?;
    let ty = f.ty("type", &scope)?;
    let point = f.term("point", &scope)?;
    let op = match f.word("op", &["id", "refl", "j", "jbeta"])?.as_str() {
        "id" => {
            f.forbid(&["motive", "base"], "by `id`")?;
            StrictOp::Id { index: f.term("index", &scope)? }
        }
        "refl" => {
            f.forbid(&["index", "motive", "base"], "by `refl`")?;
            StrictOp::Refl
        }
        op => {
            f.forbid(&["index"], "by eliminators")?;
            let m = f.require("motive")?;
            let Some((binders, body)) = m.value.split_once("=>") else {
                return Err(f.error(m.line, m.col, "motive must read `y p => TYPE`"));
            };
            let names: Vec<&str> = binders.split_whitespace().collect();
            if names.len() != 2 {
                return Err(f.error(m.line, m.col, "motive must bind exactly two names, the index and the path"));
            }
            let mut inner = scope.clone();
            names.iter().for_each(|n| inner.push(*n));
            let offset = binders.len() + 2;
            let motive = read_type(f.sig, &inner, body).map_err(|e| {
                f.error(m.line, m.col + offset + e.col.saturating_sub(1), format!("in `motive`: {}", e.message))
            })?;
            let base = f.term("base", &scope)?;
            if op == "j" {
                StrictOp::J { motive, base }
            } else {
                StrictOp::JBeta { motive, base }
            }
        }
    };
    let q = StrictQuery { context, ty, point, op };
    // motives and bases are checked once the strict identity type exists
    f.at("type", check_type(f.sig, &q.context, &q.ty))?;
    let point_ok = gatforge_core::syntax::check_term(f.sig, &q.context, &q.point, &q.ty);
    f.at("point", point_ok)?;
    if let StrictOp::Id { index } = &q.op {
        f.at("index", gatforge_core::syntax::check_term(f.sig, &q.context, index, &q.ty))?;
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIG: &str = "sort X\nsort Y (x : X)\nfun f1 (x : X) : X\nfun f2 (x : X) (y : X) : X\n";

    #[test]
    fn signature_only() {
        let file = parse_problem_file(SIG).unwrap();
        assert_eq!(file.signature.len(), 4);
        assert!(file.blocks.is_empty());
    }

    #[test]
    fn blocks_in_order() {
        let src = format!(
            "{SIG}\n[unify a]\nflexible = (x : X) (y : X)\nkind = term\nlhs = f2 x (f1 y)\nrhs = f2 (f1 y) x\n\n\
             [generalize b]  # comment\ngamma = (x : X)\nkind = type\nitem = Y (f1 x)\n\n\
             [strictify-id]\ncontext = (x : X)\nop = refl\ntype = X\npoint = x\n"
        );
        let file = parse_problem_file(&src).unwrap();
        let headers: Vec<String> = file.blocks.iter().map(Block::header).collect();
        assert_eq!(headers, ["[unify a]", "[generalize b]", "[strictify-id #3]"]);
    }

    fn err(src: &str) -> String {
        parse_problem_file(&format!("{SIG}{src}")).unwrap_err().to_string()
    }

    #[test]
    fn unknown_tag_is_an_error() {
        assert_eq!(err("[solve a]\n"), "5:2: unknown block tag `solve`");
    }

    #[test]
    fn errors_name_block_and_position() {
        assert_eq!(
            err("[unify a]\nflexible = (x : X)\nkind = term\nlhs = f1 z\nrhs = x\n"),
            "8:10: in block `[unify a]`: in `lhs`: undeclared name `z`"
        );
        assert_eq!(err("[unify a]\nflexible = (x : X)\nkind = term\nlhs = x\n"), "5:1: in block `[unify a]`: missing field `rhs`");
        assert_eq!(err("[unify a]\nflavour = 3\n"), "6:1: in block `[unify a]`: unknown field `flavour` for a unify block");
        assert!(err("[generalize g]\ngamma = (x : X)\nkind = type\nitem = f1 x\n").starts_with("8:8: in block `[generalize g]`"));
    }

    #[test]
    fn signature_errors_have_positions() {
        let e = parse_problem_file("sort X\nfun f (x : W) : X\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.block.is_none());
    }
}
