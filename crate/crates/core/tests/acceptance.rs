//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! with its elapsed time and limit, and exits non-zero if any fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gatforge_core::generalize::{mgg, mgg_natural_check, GenItem, GenProblem};
use gatforge_core::oracle::{check_mgg_terminal, check_mgu_terminal, EnumBudget, Verdict};
use gatforge_core::random::{Generator, MAX_DECLS};
use gatforge_core::signature::{load_signature, Signature};
use gatforge_core::strictify::{StrictIdStructure, StrictOp, StrictQuery};
use gatforge_core::syntax::{
    check_subst, check_term, check_type, read_subst, read_telescope, read_term, read_type, strengthen, Item,
    Names, Printer, Scope, Subst, Telescope, Term, Type,
};
use gatforge_core::unify::{instantiate, mgu, MguResult, Reason, UnifKind, UnifProblem};

const SEED: u64 = 0x6a7f;
const SIGNATURES: usize = 20;
const UNIFY_PER_SIG: usize = 10;
const GEN_PER_SIG: usize = 5;

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome { failures: Vec::new(), detail: String::new() }
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }
}

fn criterion(n: usize, title: &str, limit: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = body();
    let elapsed = start.elapsed();
    let slow = elapsed > limit;
    let pass = out.failures.is_empty() && !slow;
    println!(
        "criterion {n}: {} {title} ({:.2} s, limit {} s) {}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs(),
        out.detail
    );
    for f in out.failures.iter().take(5) {
        println!("  failure: {f}");
    }
    if out.failures.len() > 5 {
        println!("  ... {} more", out.failures.len() - 5);
    }
    if slow {
        println!("  failure: over the time limit");
    }
    pass
}

fn signatures(g: &mut Generator) -> Vec<Signature> {
    (0..SIGNATURES).map(|_| g.signature()).collect()
}

fn collect<T>(per_sig: usize, mut make: impl FnMut() -> Option<T>) -> Vec<T> {
    let mut out = Vec::new();
    for _ in 0..per_sig * 50 {
        if out.len() == per_sig {
            break;
        }
        if let Some(x) = make() {
            out.push(x);
        }
    }
    out
}

fn unify_suite() -> Vec<(Signature, UnifProblem)> {
    let mut g = Generator::new(SEED);
    let mut suite = Vec::new();
    for sig in signatures(&mut g) {
        for p in collect(UNIFY_PER_SIG, || g.unify_problem(&sig)) {
            suite.push((sig.clone(), p));
        }
    }
    suite
}

fn gen_suite() -> Vec<(Signature, GenProblem)> {
    let mut g = Generator::new(SEED + 1);
    let mut suite = Vec::new();
    for sig in signatures(&mut g) {
        for p in collect(GEN_PER_SIG, || g.gen_problem(&sig)) {
            suite.push((sig.clone(), p));
        }
    }
    suite
}

// Worked generalizations over the signature below, rendered like `gatforge generalize`.

const WORKED: &str = "sort X\nsort Y (x : X)\nfun f1 (x : X) : X\nfun f2 (x : X) (y : X) : X\nfun g (x : X) (y : Y x) : X\nfun h (x : X) (y : Y x) : Y (f1 x)";

const WORKED_CASES: &[(&str, &str, &str, &str, &str, &str)] = &[
    ("closed-subterm", "()", "()", "(x : X)", "[]", "Y (f1 x)"),
    ("rigid-structure", "()", "(xr : X)", "()", "[]", "Y (f1 xr)"),
    ("mixed-arguments", "()", "(yr : X)", "(x : X)", "[]", "Y (f2 (f1 x) (f1 yr))"),
    ("rigid-variable-type", "(w : X)", "(yr : Y w)", "(x : X)", "[f1 x]", "Y (g (f1 x) yr)"),
    ("typing-constraints", "(w : X)", "(yr : Y w)", "(x : X)", "[x]", "Y (g (f1 x) (h x yr))"),
];

fn worked_problem(sig: &Signature, omega: &str, delta: &str, gamma: &str, rho: &str, item: &str) -> GenProblem {
    let mut so = Scope::new();
    let omega = read_telescope(sig, &mut so, omega).unwrap();
    let mut sd = so.clone();
    let delta = read_telescope(sig, &mut sd, delta).unwrap();
    let mut sg = Scope::new();
    let gamma = read_telescope(sig, &mut sg, gamma).unwrap();
    let rho = read_subst(sig, &sg, rho).unwrap();
    for name in &sd.names()[so.len()..] {
        sg.push(name.clone());
    }
    let item = GenItem::Type(read_type(sig, &sg, item).unwrap());
    GenProblem { omega, delta, gamma, rho, item }
}

fn render_worked() -> String {
    let sig = load_signature(WORKED).unwrap();
    let pr = Printer::new(&sig);
    let mut blocks = Vec::new();
    for &(name, omega, delta, gamma, rho, item) in WORKED_CASES {
        let p = worked_problem(&sig, omega, delta, gamma, rho, item);
        let r = mgg(&sig, &p);
        let g0 = Names::canonical(r.gamma0.len());
        let (_, ext) = pr.telescope(&g0, &p.delta.subst(&r.rho0));
        let Item::Type(item0) = &r.item0 else { panic!("type item expected") };
        blocks.push(format!(
            "[generalize {name}]\nstatus = ok\ngamma0 = {}\nrho0 = {}\nitem0 = {}\nfactor = {}\n",
            pr.context(&r.gamma0),
            pr.subst(&g0, &r.rho0),
            pr.ty(&ext, item0),
            pr.subst(&Names::canonical(p.gamma.len()), &r.factor)
        ));
    }
    blocks.join("\n")
}

fn golden_suite() -> Outcome {
    let mut out = Outcome::new();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/worked_mgg.txt");
    let expected = std::fs::read_to_string(path).unwrap();
    let actual = render_worked();
    if actual != expected {
        for (a, e) in actual.lines().zip(expected.lines()).filter(|(a, e)| a != e) {
            out.fail(format!("got `{a}`, expected `{e}`"));
        }
        if actual.lines().count() != expected.lines().count() {
            out.fail("line counts differ");
        }
    }
    out.detail = format!("{} cases byte-identical", WORKED_CASES.len());
    out
}

fn unify_soundness() -> Outcome {
    let mut out = Outcome::new();
    let suite = unify_suite();
    let mut mgus = 0;
    for (i, (sig, p)) in suite.iter().enumerate() {
        let MguResult::Mgu { omega, rho } = mgu(sig, p) else { continue };
        mgus += 1;
        let lift = rho.lift(p.rigid.len());
        if p.lhs.subst(&lift) != p.rhs.subst(&lift) {
            out.fail(format!("problem {i}: rho does not unify"));
        }
        if let Err(e) = check_subst(sig, &omega, &rho, &p.flexible) {
            out.fail(format!("problem {i}: ill-typed rho: {e}"));
        }
        if !(rho.is_identity() || omega.len() < p.flexible.len()) {
            out.fail(format!("problem {i}: |omega| = {} not below |gamma| = {}", omega.len(), p.flexible.len()));
        }
    }
    if suite.len() != SIGNATURES * UNIFY_PER_SIG {
        out.fail(format!("generated {} problems", suite.len()));
    }
    out.detail = format!("{} problems, {mgus} unifiable, max {MAX_DECLS} declarations", suite.len());
    out
}

fn terminality() -> Outcome {
    let mut out = Outcome::new();
    let budget = EnumBudget::new(3, 3, 100_000).unwrap();
    let mut certs = 0;
    let mut truncated = 0;
    let mut mutations = 0;
    let mut expect_cert = |out: &mut Outcome, what: String, v: Verdict| match v {
        Verdict::Certificate(c) => {
            certs += 1;
            truncated += usize::from(c.witnesses_truncated || c.naturality_truncated);
        }
        other => out.fail(format!("{what}: {other:?}")),
    };
    let mut expect_cex = |out: &mut Outcome, what: String, v: Verdict| {
        mutations += 1;
        if !v.is_counter_example() {
            out.fail(format!("mutation {what}: {v:?}"));
        }
    };

    for (i, (sig, p)) in unify_suite().iter().enumerate() {
        let r = mgu(sig, p);
        expect_cert(&mut out, format!("unify {i}"), check_mgu_terminal(sig, p, &r, &budget));
        if i % 4 != 0 {
            continue;
        }
        match &r {
            MguResult::Mgu { rho, .. } if !rho.is_identity() => {
                let id = MguResult::Mgu { omega: p.flexible.clone(), rho: Subst::identity(p.flexible.len()) };
                expect_cex(&mut out, format!("unify {i} identity"), check_mgu_terminal(sig, p, &id, &budget));
                let none = MguResult::NoUnifier(Reason::HeadClash);
                expect_cex(&mut out, format!("unify {i} no-unifier"), check_mgu_terminal(sig, p, &none, &budget));
            }
            MguResult::Mgu { .. } => {}
            MguResult::NoUnifier(_) => {
                let id = MguResult::Mgu { omega: p.flexible.clone(), rho: Subst::identity(p.flexible.len()) };
                expect_cex(&mut out, format!("unify {i} claimed"), check_mgu_terminal(sig, p, &id, &budget));
            }
        }
    }

    for (i, (sig, p)) in gen_suite().iter().enumerate() {
        let r = mgg(sig, p);
        expect_cert(&mut out, format!("generalize {i}"), check_mgg_terminal(sig, p, &r, &budget));
        if i % 2 != 0 || r.factor.is_identity() {
            continue;
        }
        let mut trivial = r.clone();
        trivial.gamma0 = p.gamma.clone();
        trivial.rho0 = p.rho.clone();
        trivial.item0 = p.item.item();
        trivial.factor = Subst::identity(p.gamma.len());
        expect_cex(&mut out, format!("generalize {i} trivial"), check_mgg_terminal(sig, p, &trivial, &budget));
        let mut unfactored = r.clone();
        unfactored.factor = Subst::identity(p.gamma.len());
        if r.gamma0.len() == p.gamma.len() && !unfactored.factors(p) {
            expect_cex(&mut out, format!("generalize {i} factor"), check_mgg_terminal(sig, p, &unfactored, &budget));
        }
    }
    out.detail = format!("{certs} certificates at {budget} ({truncated} stopped at max), {mutations} mutations caught");
    out
}

fn naturality() -> Outcome {
    let mut out = Outcome::new();
    let mut g = Generator::new(SEED + 2);
    let sigs = signatures(&mut g);
    let mut pairs = 0;
    let mut variable = 0;
    for sig in &sigs {
        let cases = collect(5, || g.variable_case(sig));
        for (p, lambda, sigma) in cases {
            variable += 1;
            pairs += 1;
            if !mgg_natural_check(sig, &p, &lambda, &sigma) {
                out.fail(format!("variable case {variable}"));
            }
        }
        let rest = collect(20, || {
            let p = g.gen_problem(sig)?;
            let (lambda, sigma) = g.probe(sig, &p.gamma, 3)?;
            Some((p, lambda, sigma))
        });
        for (p, lambda, sigma) in rest {
            pairs += 1;
            if check_subst(sig, &lambda, &sigma, &p.gamma).is_err() {
                out.fail(format!("pair {pairs}: ill-typed sigma"));
            } else if !mgg_natural_check(sig, &p, &lambda, &sigma) {
                out.fail(format!("pair {pairs}"));
            }
        }
    }
    if pairs < 500 || variable < 50 {
        out.fail(format!("only {pairs} pairs, {variable} variable cases"));
    }
    out.detail = format!("{pairs} pairs, {variable} variable-under-substitution cases");
    out
}

/// Random strictification queries over `sig`, cycling through the four
/// operations.
fn strict_queries(g: &mut Generator, st: &mut StrictIdStructure<impl gatforge_core::strictify::WeakIdentity>, sig: &Signature, n: usize) -> Vec<StrictQuery> {
    let mut queries = Vec::new();
    for attempt in 0..n * 40 {
        if queries.len() == n {
            break;
        }
        let len = attempt % 3;
        let context = g.telescope(sig, &Telescope::empty(), len);
        let Some((ty, point)) = g.typed_term(sig, &context) else { continue };
        let op = match queries.len() % 4 {
            0 => {
                let Some(index) = g.term(sig, &context, &ty, 2) else { continue };
                StrictOp::Id { index }
            }
            1 => StrictOp::Refl,
            k => {
                let Some((motive, base)) = motive(g, st, sig, &context, &ty, &point, attempt) else { continue };
                if k == 2 {
                    StrictOp::J { motive, base }
                } else {
                    StrictOp::JBeta { motive, base }
                }
            }
        };
        queries.push(StrictQuery { context, ty, point, op });
    }
    queries
}

/// A motive over `Γ.(y : A).(p : Id(A, x, y))` with a base at `refl`:
/// constant, a sort indexed by `y`, or the identity type itself.
fn motive(
    g: &mut Generator,
    st: &mut StrictIdStructure<impl gatforge_core::strictify::WeakIdentity>,
    sig: &Signature,
    ctx: &Telescope,
    ty: &Type,
    point: &Term,
    choice: usize,
) -> Option<(Type, Term)> {
    match choice % 3 {
        0 => {
            let c = g.ty(sig, ctx, 2);
            let base = g.term(sig, ctx, &c, 3)?;
            Some((c.shift(2), base))
        }
        1 => {
            let d = sig.ids().find(|&d| {
                let decl = sig.decl(d);
                decl.output.is_none() && decl.boundary.len() == 1 && decl.boundary.0[0] == *ty
            })?;
            let base = g.term(sig, ctx, &Type::new(d, vec![point.clone()]), 3)?;
            Some((Type::new(d, vec![Term::Var(1)]), base))
        }
        _ => {
            let arity = st.motive_arity(ctx, ty, point).ok()?;
            let ext = ctx.concat(&arity);
            let motive = st.strict_id(&ext, &ty.shift(2), &point.shift(2), &Term::Var(1)).ok()?;
            let base = st.strict_refl(ctx, ty, point).ok()?;
            Some((motive, base))
        }
    }
}

fn strict_stability() -> Outcome {
    let mut out = Outcome::new();
    let mut g = Generator::new(SEED + 3);
    let mut probes = 0;
    let mut per_op = [0usize; 4];
    for sig in signatures(&mut g) {
        let mut st = StrictIdStructure::free(&sig);
        for q in strict_queries(&mut g, &mut st, &sig, 10) {
            let Some((lambda, sigma)) = g.probe(&sig, &q.context, 3) else { continue };
            probes += 1;
            let op = q.op.name();
            match st.probe(&q, &lambda, &sigma) {
                Ok(o) => {
                    per_op[["id", "refl", "j", "jbeta"].iter().position(|&n| n == op).unwrap()] += 1;
                    if !o.stable() {
                        out.fail(format!("{op} probe {probes}: unstable"));
                    }
                    let r = &o.restricted;
                    let typed = match (&r.output, &r.ty) {
                        (Item::Type(t), None) => check_type(st.signature(), &r.ambient, t).is_ok(),
                        (Item::Term(t), Some(ty)) => check_term(st.signature(), &r.ambient, t, ty).is_ok(),
                        _ => false,
                    };
                    if !typed {
                        out.fail(format!("{op} probe {probes}: output does not typecheck"));
                    }
                }
                Err(e) => out.fail(format!("{op} probe {probes}: {e}")),
            }
        }
    }
    if probes < 200 || per_op.contains(&0) {
        out.fail(format!("only {probes} probes, per operation {per_op:?}"));
    }
    out.detail = format!("{probes} probes (id {}, refl {}, j {}, jbeta {})", per_op[0], per_op[1], per_op[2], per_op[3]);
    out
}

fn calculus_laws() -> Outcome {
    let mut out = Outcome::new();
    let mut g = Generator::new(SEED + 4);
    let sigs = signatures(&mut g);
    let mut items = 0;
    let mut attempts = 0;
    while items < 1000 && attempts < 20_000 {
        attempts += 1;
        let sig = &sigs[attempts % sigs.len()];
        let gamma_len = attempts % 4;
        let gamma = g.telescope(sig, &Telescope::empty(), gamma_len);
        let item = match attempts % 3 {
            0 => Item::Type(g.ty(sig, &gamma, 3)),
            1 => match g.typed_term(sig, &gamma) {
                Some((_, t)) => Item::Term(t),
                None => continue,
            },
            _ => {
                let target = g.telescope(sig, &Telescope::empty(), 2);
                match g.subst(sig, &gamma, &target, 2) {
                    Some(s) => Item::Subst(s),
                    None => continue,
                }
            }
        };
        let Some((lambda, sigma)) = g.probe(sig, &gamma, 3) else { continue };
        let Some((_, tau)) = g.probe(sig, &lambda, 3) else { continue };
        items += 1;
        if item.subst(&Subst::identity(gamma.len())) != item {
            out.fail(format!("item {items}: a[id] != a"));
        }
        if item.subst(&sigma).subst(&tau) != item.subst(&sigma.compose(&tau)) {
            out.fail(format!("item {items}: a[s][t] != a[s . t]"));
        }
        let by = 1 + attempts % 3;
        if strengthen(&item.shift(by), by) != Ok(item.clone()) {
            out.fail(format!("item {items}: strengthen does not undo weakening"));
        }
        let pr = Printer::new(sig);
        let names = Names::canonical(gamma.len());
        let scope = Scope::from_names(names.as_slice().iter().cloned());
        let back = match &item {
            Item::Type(t) => read_type(sig, &scope, &pr.ty(&names, t)).map(Item::Type),
            Item::Term(t) => read_term(sig, &scope, &pr.term(&names, t)).map(Item::Term),
            Item::Subst(s) => read_subst(sig, &scope, &pr.subst(&names, s)).map(Item::Subst),
        };
        if back.as_ref() != Ok(&item) {
            out.fail(format!("item {items}: print/read round trip gave {back:?}"));
        }
        if lambda.len() != sigma.len() && sigma.len() != gamma.len() {
            out.fail(format!("item {items}: malformed probe"));
        }
    }
    if items < 1000 {
        out.fail(format!("only {items} items"));
    }
    out.detail = format!("{items} items");
    out
}

/// Variables the item mentions, closed under the types of the context.
fn closed_support(ctx: &Telescope, t: &Term) -> BTreeSet<usize> {
    let n = ctx.len();
    let mut levels: BTreeSet<usize> = t.vars().into_iter().map(|i| n - 1 - i).collect();
    loop {
        let mut next = levels.clone();
        for &l in &levels {
            for i in ctx.0[l].vars() {
                next.insert(l - 1 - i);
            }
        }
        if next == levels {
            return levels;
        }
        levels = next;
    }
}

fn instantiation_bound() -> Outcome {
    let mut out = Outcome::new();
    let mut g = Generator::new(SEED + 5);
    let sigs = signatures(&mut g);
    let (mut ok, mut occurs) = (0, 0);
    for (k, sig) in sigs.iter().enumerate() {
        for j in 0..60 {
            let gamma = g.telescope(sig, &Telescope::empty(), 1 + j % 3);
            let n = gamma.len();
            let level = j % n;
            let ty = gamma.var_type(n - 1 - level).unwrap();
            // half the right-hand sides are built over the variable itself
            let b = if j % 2 == 0 {
                g.term(sig, &gamma, &ty, 3)
            } else {
                let f = sig.ids().find(|&f| {
                    let d = sig.decl(f);
                    d.output.as_ref() == Some(&ty) && d.boundary.len() == 1 && d.boundary.0[0] == ty
                });
                f.map(|f| Term::app(f, vec![Term::Var(n - 1 - level)]))
            };
            let Some(b) = b else { continue };
            if b == Term::Var(n - 1 - level) {
                continue;
            }
            let in_support = closed_support(&gamma, &b).contains(&level);
            match instantiate(&gamma, level, &b) {
                Ok(inst) => {
                    ok += 1;
                    if inst.gamma_prime.len() >= n {
                        out.fail(format!("sig {k} case {j}: length {} not below {n}", inst.gamma_prime.len()));
                    }
                    if in_support {
                        out.fail(format!("sig {k} case {j}: occurs case instantiated"));
                    }
                    if Term::Var(n - 1 - level).subst(&inst.rho) != b.subst(&inst.rho) {
                        out.fail(format!("sig {k} case {j}: not a unifier"));
                    }
                    if let Err(e) = check_subst(sig, &inst.gamma_prime, &inst.rho, &gamma) {
                        out.fail(format!("sig {k} case {j}: ill-typed rho: {e}"));
                    }
                }
                Err(reason) => {
                    if !in_support || reason != Reason::Occurs {
                        out.fail(format!("sig {k} case {j}: unexpected {reason}"));
                        continue;
                    }
                    occurs += 1;
                    let p = UnifProblem {
                        flexible: gamma.clone(),
                        rigid: Telescope::empty(),
                        kind: UnifKind::Term(ty.clone()),
                        lhs: Item::Term(Term::Var(n - 1 - level)),
                        rhs: Item::Term(b.clone()),
                    };
                    if mgu(sig, &p) != MguResult::NoUnifier(Reason::Occurs) {
                        out.fail(format!("sig {k} case {j}: mgu missed the occurs check"));
                    }
                }
            }
        }
    }
    if ok == 0 || occurs == 0 {
        out.fail(format!("degenerate suite: {ok} instantiations, {occurs} occurs cases"));
    }
    out.detail = format!("{ok} instantiations, {occurs} occurs cases");
    out
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let results = [
        criterion(1, "worked generalizations match goldens", s(1), golden_suite),
        criterion(2, "unifier soundness and size bound", s(10), unify_soundness),
        criterion(3, "terminality certificates and mutations", s(60), terminality),
        criterion(4, "strict naturality of generalization", s(10), naturality),
        criterion(5, "strict stability of strictified identity types", s(30), strict_stability),
        criterion(6, "substitution, weakening and printing laws", s(5), calculus_laws),
        criterion(7, "instantiation shortens the context", s(5), instantiation_bound),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
