use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use obsdual_core::dataset::{
    corpus_stats, deserialize, generate_records_parallel, serialize_to_string, verify_corpus, DatasetError, GenConfig,
    ProofArtifact,
};
use obsdual_core::dsl::{builtin_theory, parse_problem, parse_theory, print_formula, print_sequent, Problem, SourceFile};
use obsdual_core::dual::{check_sieve_proof, compile_proof, dualize_proof, DualError};
use obsdual_core::engine::{is_inconsistent, Engine, EngineError, Limits, Provenance};
use obsdual_core::kernel::check_proof;
use obsdual_core::logic::Theory;

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const USAGE: u8 = 2;
const IO: u8 = 3;
const LIMITS: u8 = 4;
const UNSUPPORTED: u8 = 5;

#[derive(Parser)]
#[command(name = "obsdual", version, about = "Observable-logic proofs and their sieve duals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and well-formedness check a theory file.
    Check { theory: PathBuf },
    /// Saturate a problem's premises and list the closure.
    Close {
        theory: PathBuf,
        problem: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Derive a problem's goal and emit a proof file.
    Prove {
        theory: PathBuf,
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t = Emit::Logic)]
        emit: Emit,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Check a proof file.
    Checkproof {
        theory: PathBuf,
        proof: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Logic)]
        kind: Kind,
    },
    /// Translate a logic proof into a sieve proof.
    Dualize {
        theory: PathBuf,
        proof: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Translate a sieve proof back into a logic proof.
    Compile {
        theory: PathBuf,
        proof: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a paired corpus.
    Gen(GenArgs),
    /// Re-check every record of a corpus.
    Verify {
        corpus: PathBuf,
        /// Theory files for ids that are not builtin.
        #[arg(long = "theory")]
        theories: Vec<PathBuf>,
    },
    /// Summarize a corpus.
    Stats { corpus: PathBuf },
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = Limits::default().max_facts)]
    max_facts: usize,
    #[arg(long, default_value_t = Limits::default().max_rounds)]
    max_rounds: usize,
}

impl LimitArgs {
    fn limits(&self) -> Limits {
        Limits {
            max_facts: self.max_facts,
            max_rounds: self.max_rounds,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    theory: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    constants: usize,
    #[arg(long, default_value_t = 3)]
    premises: usize,
    #[arg(long, default_value_t = 100)]
    records: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Logic,
    Dual,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Logic,
    Sieve,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

struct Term {
    color: bool,
}

impl Term {
    fn from_env() -> Self {
        let color = match std::env::var("OBS_COLOR").as_deref() {
            Ok("always") => true,
            Ok("never") => false,
            _ => io::stderr().is_terminal(),
        };
        Term { color }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn error(&self, msg: &str) {
        eprintln!("{}: {msg}", self.paint("1;31", "error"));
    }

    fn note(&self, msg: &str) {
        eprintln!("{}: {msg}", self.paint("1;36", "note"));
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let term = Term::from_env();
    let code = match run(cli.command, &term) {
        Ok(code) => code,
        Err(f) => {
            if !f.message.is_empty() {
                term.error(&f.message);
            }
            f.code
        }
    };
    ExitCode::from(code)
}

fn run(cmd: Command, term: &Term) -> Outcome {
    match cmd {
        Command::Check { theory } => check(&theory, term),
        Command::Close { theory, problem, limits } => close(&theory, &problem, limits.limits(), term),
        Command::Prove {
            theory,
            problem,
            emit,
            output,
            limits,
        } => prove(&theory, &problem, emit, output.as_deref(), limits.limits(), term),
        Command::Checkproof { theory, proof, kind } => checkproof(&theory, &proof, kind, term),
        Command::Dualize { theory, proof, output } => dualize(&theory, &proof, output.as_deref(), term),
        Command::Compile { theory, proof, output } => compile(&theory, &proof, output.as_deref(), term),
        Command::Gen(args) => gen(&args, term),
        Command::Verify { corpus, theories } => verify(&corpus, &theories, term),
        Command::Stats { corpus } => stats(&corpus),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(IO, format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Outcome {
    let res = match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    res.map(|_| OK).map_err(|e| fail(IO, e))
}

fn report(src: &SourceFile, diags: &[obsdual_core::dsl::ParseDiagnostic], term: &Term) -> Failure {
    let name = src.display_name();
    for d in diags {
        let line = src.text.lines().nth(d.span.start.line.saturating_sub(1)).unwrap_or("");
        let width = if d.span.end.line == d.span.start.line {
            d.span.end.col.saturating_sub(d.span.start.col).max(1)
        } else {
            1
        };
        eprintln!(
            "{name}:{}:{}: {}: {}",
            d.span.start.line,
            d.span.start.col,
            term.paint("1;31", "error"),
            d.message
        );
        eprintln!("  {line}");
        eprintln!("  {}{}", " ".repeat(d.span.start.col.saturating_sub(1)), term.paint("1;31", &"^".repeat(width)));
    }
    fail(USAGE, "")
}

fn load_theory(path: &Path, term: &Term) -> Result<Theory, Failure> {
    let src = SourceFile::new(Some(path.to_path_buf()), read(path)?);
    parse_theory(&src).map_err(|d| report(&src, &d, term))
}

fn load_problem(path: &Path, t: &Theory, term: &Term) -> Result<Problem, Failure> {
    let src = SourceFile::new(Some(path.to_path_buf()), read(path)?);
    parse_problem(&src, t).map_err(|d| report(&src, &d, term))
}

fn engine_failure(e: EngineError) -> Failure {
    match e {
        EngineError::LimitExceeded { .. } => fail(LIMITS, e.to_string()),
        EngineError::InvalidPremise { .. } => fail(USAGE, e.to_string()),
        EngineError::TargetAbsent { .. } => fail(NEGATIVE, e.to_string()),
        EngineError::ElaborationFailed { .. } => fail(UNSUPPORTED, e.to_string()),
    }
}

fn dual_failure(e: DualError) -> Failure {
    match e {
        DualError::UnsupportedRule { .. } | DualError::NotADualStatement { .. } => fail(UNSUPPORTED, e.to_string()),
        _ => fail(NEGATIVE, e.to_string()),
    }
}

fn check(path: &Path, term: &Term) -> Outcome {
    let t = load_theory(path, term)?;
    let sig = &t.signature;
    println!(
        "ok {}: {} sorts, {} functions, {} relations, {} axioms",
        t.id,
        sig.sorts().len(),
        sig.functions().count(),
        sig.relations().count(),
        t.axioms.len()
    );
    Ok(OK)
}

fn close(theory: &Path, problem: &Path, limits: Limits, term: &Term) -> Outcome {
    let t = load_theory(theory, term)?;
    let pb = load_problem(problem, &t, term)?;
    let engine = Engine::new(&pb.theory);
    let fb = engine.saturate(&pb.premises, limits).map_err(engine_failure)?;
    let mut out = String::new();
    for (i, (fact, prov)) in fb.iter().enumerate() {
        let how = match prov {
            Provenance::Premise => "premise".to_string(),
            Provenance::Derived { rule, parents, .. } => {
                let ps: Vec<String> = parents.iter().map(|p| p.to_string()).collect();
                format!("{rule} {}", ps.join(" ")).trim_end().to_string()
            }
        };
        out.push_str(&format!("{i}\t{}\t{how}\n", print_formula(fact)));
    }
    let inconsistent = is_inconsistent(&fb);
    if inconsistent {
        out.push_str("INCONSISTENT\n");
    }
    write_out(None, &out)?;
    Ok(if inconsistent { NEGATIVE } else { OK })
}

fn prove(theory: &Path, problem: &Path, emit: Emit, output: Option<&Path>, limits: Limits, term: &Term) -> Outcome {
    let t = load_theory(theory, term)?;
    let pb = load_problem(problem, &t, term)?;
    let goal = pb.goal.clone().ok_or_else(|| fail(USAGE, format!("{} declares no goal", problem.display())))?;
    if !goal.is_atom() {
        return Err(fail(UNSUPPORTED, format!("goal `{}` is not an atom", print_formula(&goal))));
    }
    let engine = Engine::new(&pb.theory);
    let fb = engine.saturate(&pb.premises, limits).map_err(engine_failure)?;
    if !fb.contains(&goal) {
        println!("UNPROVED {}", print_formula(&goal));
        return Ok(NEGATIVE);
    }
    let g = engine.traceback(&fb, &goal).map_err(engine_failure)?;
    let proof = engine.elaborate(&g).map_err(engine_failure)?;
    let consts = pb.constants.iter().map(|c| (c.name.clone(), c.result_sort.clone())).collect();
    let mut art = ProofArtifact::new(t.id.clone(), consts);
    if emit != Emit::Logic {
        art.sieve = Some(dualize_proof(&pb.theory, &proof).map_err(dual_failure)?);
    }
    if emit != Emit::Dual {
        art.logic = Some(proof);
    }
    term.note(&format!("proved {}", print_sequent(&g.sequent())));
    write_out(output, &art.to_text())
}

/// Loads a proof file against a theory. Header and entry problems are
/// reported with `malformed`'s exit code.
fn load_artifact(theory: &Path, proof: &Path, malformed: u8, term: &Term) -> Result<(ProofArtifact, Theory), Failure> {
    let t = load_theory(theory, term)?;
    let text = read(proof)?;
    let art = ProofArtifact::parse(&text).map_err(|e| {
        let code = match e {
            DatasetError::MalformedLine { line: 1, .. } => USAGE,
            _ => malformed,
        };
        fail(code, format!("{}: {e}", proof.display()))
    })?;
    if art.theory_id != t.id {
        return Err(fail(
            USAGE,
            format!("proof is for theory `{}` but `{}` was loaded", art.theory_id, t.id),
        ));
    }
    let ext = art.extend(&t).map_err(|e| fail(USAGE, e.to_string()))?;
    Ok((art, ext))
}

fn checkproof(theory: &Path, proof: &Path, kind: Kind, term: &Term) -> Outcome {
    let (art, t) = match load_artifact(theory, proof, NEGATIVE, term) {
        Ok(x) => x,
        Err(f) if f.code == NEGATIVE => {
            println!("REJECTED {}", f.message);
            return Ok(NEGATIVE);
        }
        Err(f) => return Err(f),
    };
    let verdict = match kind {
        Kind::Logic => {
            let p = art.logic.as_ref().ok_or_else(|| fail(USAGE, "proof file holds no logic proof"))?;
            check_proof(&t, p).map(|s| print_sequent(&s)).map_err(|e| e.to_string())
        }
        Kind::Sieve => {
            let q = art.sieve.as_ref().ok_or_else(|| fail(USAGE, "proof file holds no sieve proof"))?;
            check_sieve_proof(&t, q)
                .map(|c| match c.as_sequent() {
                    Some(s) => print_sequent(&s),
                    None => format!("covering claim with {} members", c.family.len()),
                })
                .map_err(|e| e.to_string())
        }
    };
    match verdict {
        Ok(s) => {
            println!("ACCEPTED {s}");
            Ok(OK)
        }
        Err(reason) => {
            println!("REJECTED {reason}");
            Ok(NEGATIVE)
        }
    }
}

fn dualize(theory: &Path, proof: &Path, output: Option<&Path>, term: &Term) -> Outcome {
    let (art, t) = load_artifact(theory, proof, USAGE, term)?;
    let p = art.logic.as_ref().ok_or_else(|| fail(USAGE, "proof file holds no logic proof"))?;
    let q = dualize_proof(&t, p).map_err(dual_failure)?;
    let mut out = ProofArtifact::new(art.theory_id.clone(), art.constants.clone());
    out.sieve = Some(q);
    write_out(output, &out.to_text())
}

fn compile(theory: &Path, proof: &Path, output: Option<&Path>, term: &Term) -> Outcome {
    let (art, t) = load_artifact(theory, proof, USAGE, term)?;
    let q = art.sieve.as_ref().ok_or_else(|| fail(USAGE, "proof file holds no sieve proof"))?;
    let p = compile_proof(&t, q).map_err(dual_failure)?;
    let mut out = ProofArtifact::new(art.theory_id.clone(), art.constants.clone());
    out.logic = Some(p);
    write_out(output, &out.to_text())
}

fn gen(args: &GenArgs, term: &Term) -> Outcome {
    let t = load_theory(&args.theory, term)?;
    let cfg = GenConfig {
        constant_count: args.constants,
        premise_count: args.premises,
        max_records: args.records,
        limits: args.limits.limits(),
        ..GenConfig::new(t.id.clone(), args.seed)
    };
    let g = generate_records_parallel(&t, &cfg, args.workers).map_err(|e| match e {
        DatasetError::NoHornRules(_) => fail(UNSUPPORTED, e.to_string()),
        DatasetError::Engine(e) => engine_failure(e),
        other => fail(NEGATIVE, other.to_string()),
    })?;
    let skipped: Vec<String> = g.skipped.iter().map(|(k, n)| format!("{k} {n}")).collect();
    term.note(&format!(
        "{} records from {} rounds; skipped: {}",
        g.records.len(),
        g.rounds,
        if skipped.is_empty() { "none".to_string() } else { skipped.join(", ") }
    ));
    write_out(args.output.as_deref(), &serialize_to_string(&g.records))
}

fn verify(corpus: &Path, theory_files: &[PathBuf], term: &Term) -> Outcome {
    let mut extra = Vec::new();
    for p in theory_files {
        extra.push(load_theory(p, term)?);
    }
    let text = read(corpus)?;
    let resolve = |id: &str| extra.iter().find(|t| t.id == id).cloned().or_else(|| builtin_theory(id));
    let rep = verify_corpus(&text, &resolve).map_err(|e| fail(USAGE, format!("{}: {e}", corpus.display())))?;
    for (line, reason) in &rep.invalid {
        term.error(&format!("{}:{line}: {reason}", corpus.display()));
    }
    println!("{} of {} records valid", rep.records - rep.invalid.len(), rep.records);
    Ok(if rep.ok() { OK } else { NEGATIVE })
}

fn stats(corpus: &Path) -> Outcome {
    let text = read(corpus)?;
    let records = deserialize(&text).map_err(|e| fail(USAGE, format!("{}: {e}", corpus.display())))?;
    println!("{}", corpus_stats(&records));
    Ok(OK)
}
