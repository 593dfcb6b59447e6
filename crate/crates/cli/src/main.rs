//! `gatforge`: batch front end for signatures, unification, generalization,
//! identity-type strictification and oracle verification.
//!
//! Exit codes: 0 success, 1 input error, 2 property violation, 3 budget
//! exhausted without a verdict.

mod problem;
mod report;

use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gatforge_core::generalize::{mgg, GeneralizationResult};
use gatforge_core::oracle::{check_mgg_terminal, check_mgu_terminal, EnumBudget, Verdict};
use gatforge_core::random::Generator;
use gatforge_core::signature::Signature;
use gatforge_core::strictify::{QueryResult, StrictIdStructure};
use gatforge_core::syntax::{Item, Names, Printer, Telescope};
use gatforge_core::unify::{mgu, MguResult};

use problem::{parse_problem_file, Block, Body, ProblemFile};
use report::{BlockResult, Format, Report};

#[derive(Debug, Parser)]
#[command(name = "gatforge", version, about = "Unification, generalization and identity-type strictification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Maximum term depth for enumeration and random probes.
    #[arg(long, global = true, default_value_t = 3)]
    depth: usize,
    /// Maximum length of enumerated or random source contexts.
    #[arg(long = "ctx-len", global = true, default_value_t = 3)]
    ctx_len: usize,
    /// Maximum number of results per enumeration.
    #[arg(long, global = true, default_value_t = 100_000)]
    max: usize,
    /// Random substitutions per strictification query.
    #[arg(long, global = true, default_value_t = 20)]
    probe: usize,
    /// Seed of the probe generator.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and typecheck a signature or problem file.
    Check { file: PathBuf },
    /// Compute most general unifiers for `[unify]` blocks.
    Unify { file: PathBuf },
    /// Compute most general generalizations for `[generalize]` blocks.
    Generalize { file: PathBuf },
    /// Evaluate `[strictify-id]` queries and probe their stability.
    #[command(name = "strictify-id")]
    StrictifyId { file: PathBuf },
    /// Certify `[unify]` and `[generalize]` results against the bounded oracle.
    Verify { file: PathBuf },
}

/// An error that aborts the run with exit code 1.
struct InputError(String);

struct Outcome {
    report: Report,
    code: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let text = outcome.report.render(cli.format);
            let written = match &cli.out {
                Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: cannot write: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::from(outcome.code),
                Err(msg) => {
                    report_error(&msg);
                    ExitCode::from(1)
                }
            }
        }
        Err(InputError(msg)) => {
            report_error(&msg);
            ExitCode::from(1)
        }
    }
}

fn report_error(msg: &str) {
    let styled = std::io::stderr().is_terminal() && std::env::var_os("GATFORGE_NO_COLOR").is_none();
    if styled {
        eprintln!("\x1b[1;31merror\x1b[0m: {msg}");
    } else {
        eprintln!("error: {msg}");
    }
}

fn load(path: &Path) -> Result<ProblemFile, InputError> {
    let source =
        std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: cannot read: {e}", path.display())))?;
    parse_problem_file(&source).map_err(|e| InputError(format!("{}:{e}", path.display())))
}

fn run(cli: &Cli) -> Result<Outcome, InputError> {
    let (command, file) = match &cli.command {
        Command::Check { file } => ("check", file),
        Command::Unify { file } => ("unify", file),
        Command::Generalize { file } => ("generalize", file),
        Command::StrictifyId { file } => ("strictify-id", file),
        Command::Verify { file } => ("verify", file),
    };
    let problems = load(file)?;
    let mut report =
        Report { command, file: file.display().to_string(), results: Vec::new(), signature_extension: None };
    let mut code = 0;
    match &cli.command {
        Command::Check { .. } => {
            report.results = problems.blocks.iter().map(|b| result(b, "ok")).collect();
        }
        Command::Unify { .. } => {
            report.results = problems.blocks.iter().filter_map(|b| unify_block(&problems.signature, b)).collect();
        }
        Command::Generalize { .. } => {
            report.results =
                problems.blocks.iter().filter_map(|b| generalize_block(&problems.signature, b)).collect();
        }
        Command::StrictifyId { .. } => code = strictify(cli, file, &problems, &mut report)?,
        Command::Verify { .. } => {
            let budget = EnumBudget::new(cli.depth, cli.ctx_len, cli.max)
                .map_err(|e| InputError(format!("invalid budget: {e}")))?;
            for block in &problems.blocks {
                if let Some((r, verdict)) = verify_block(&problems.signature, block, &budget) {
                    code = code.max(match verdict {
                        Verdict::Certificate(_) => 0,
                        Verdict::Exhausted(_) => 3,
                        Verdict::CounterExample(_) => 2,
                    });
                    report.results.push(r);
                }
            }
            // a violation outranks exhaustion
            if report.results.iter().any(|r| r.status == "counter-example") {
                code = 2;
            }
        }
    }
    Ok(Outcome { report, code })
}

fn result(block: &Block, status: &str) -> BlockResult {
    BlockResult::new(block.tag.as_str(), &block.name, block.line, status)
}

fn render_item(p: &Printer<'_>, names: &Names, item: &Item) -> String {
    match item {
        Item::Type(t) => p.ty(names, t),
        Item::Term(t) => p.term(names, t),
        Item::Subst(s) => p.subst(names, s),
    }
}

fn unify_block(sig: &Signature, block: &Block) -> Option<BlockResult> {
    let Body::Unify(p) = &block.body else { return None };
    let pr = Printer::new(sig);
    Some(match mgu(sig, p) {
        MguResult::Mgu { omega, rho } => result(block, "mgu")
            .field("omega", pr.context(&omega))
            .field("rho", pr.subst(&Names::canonical(omega.len()), &rho)),
        MguResult::NoUnifier(reason) => result(block, "no-unifier").field("reason", reason.code()),
    })
}

fn generalization_fields(sig: &Signature, delta: &Telescope, gamma_len: usize, r: &GeneralizationResult, out: BlockResult) -> BlockResult {
    let pr = Printer::new(sig);
    let g0 = Names::canonical(r.gamma0.len());
    let (_, ext) = pr.telescope(&g0, &delta.subst(&r.rho0));
    out.field("gamma0", pr.context(&r.gamma0))
        .field("rho0", pr.subst(&g0, &r.rho0))
        .field("item0", render_item(&pr, &ext, &r.item0))
        .field("factor", pr.subst(&Names::canonical(gamma_len), &r.factor))
}

fn generalize_block(sig: &Signature, block: &Block) -> Option<BlockResult> {
    let Body::Generalize(p) = &block.body else { return None };
    let r = mgg(sig, p);
    Some(generalization_fields(sig, &p.delta, p.gamma.len(), &r, result(block, "ok")))
}

fn verify_block(sig: &Signature, block: &Block, budget: &EnumBudget) -> Option<(BlockResult, Verdict)> {
    let (verdict, gamma_len) = match &block.body {
        Body::Unify(p) => (check_mgu_terminal(sig, p, &mgu(sig, p), budget), p.flexible.len()),
        Body::Generalize(p) => (check_mgg_terminal(sig, p, &mgg(sig, p), budget), p.gamma.len()),
        Body::StrictifyId(_) => return None,
    };
    let r = match &verdict {
        Verdict::Certificate(c) => {
            let mut r = result(block, "certificate")
                .field("budget", c.budget.to_string())
                .field("contexts", c.contexts.to_string())
                .field("witnesses", c.witnesses.to_string())
                .field("witnesses-truncated", c.witnesses_truncated.to_string());
            if matches!(block.body, Body::Generalize(_)) {
                r = r.field("naturality-probes", c.naturality_probes.to_string());
                r = r.field("naturality-truncated", c.naturality_truncated.to_string());
            }
            r
        }
        Verdict::CounterExample(cex) => result(block, "counter-example")
            .field("budget", budget.to_string())
            .field("witness", cex.describe(sig, gamma_len)),
        Verdict::Exhausted(e) => result(block, "exhausted").field("budget", budget.to_string()).field("reason", e.to_string()),
    };
    Some((r, verdict))
}

fn strictify(cli: &Cli, file: &Path, problems: &ProblemFile, report: &mut Report) -> Result<u8, InputError> {
    let user = &problems.signature;
    let mut st = StrictIdStructure::free(user);
    let mut gen = Generator::new(cli.seed);
    gen.depth = cli.depth.max(1);
    let mut runs: Vec<(&Block, QueryResult, usize, Vec<String>)> = Vec::new();
    for block in &problems.blocks {
        let Body::StrictifyId(q) = &block.body else { continue };
        let out = st.run(q).map_err(|e| InputError(format!("{}:{}:1: in block `{}`: {e}", file.display(), block.line, block.header())))?;
        let mut probes = 0;
        let mut violations = Vec::new();
        for _ in 0..cli.probe {
            let Some((lambda, sigma)) = gen.probe(user, &q.context, cli.ctx_len) else { break };
            probes += 1;
            let stable = st.probe(q, &lambda, &sigma).map(|o| o.stable()).unwrap_or(false);
            if !stable {
                let pr = Printer::new(user);
                violations.push(format!("{} |- {}", pr.context(&lambda), pr.subst(&Names::canonical(lambda.len()), &sigma)));
            }
        }
        runs.push((block, out, probes, violations));
    }

    let table = st.weak();
    let canonical = table.canonical_extension();
    let renaming = table.canonical_renaming();
    let pr = Printer::new(&canonical);
    let mut code = 0;
    for (block, out, probes, violations) in runs {
        let ambient = renaming.telescope(&out.ambient);
        let names = Names::canonical(ambient.len());
        let mut r = result(block, if violations.is_empty() { "stable" } else { "unstable" })
            .field("context", pr.context(&ambient))
            .field("output", render_item(&pr, &names, &renaming.item(&out.output)));
        if let Some(ty) = &out.ty {
            r = r.field("type", pr.ty(&names, &renaming.ty(ty)));
        }
        r = r.field("probes", probes.to_string()).field("violations", violations.len().to_string());
        if let Some(first) = violations.first() {
            r = r.field("first-violation", first.clone());
            code = 2;
        }
        report.results.push(r);
    }
    report.signature_extension = Some((table.user_len()..canonical.len()).map(|i| canonical.render_declaration(gatforge_core::syntax::DeclId(i))).collect());
    Ok(code)
}
